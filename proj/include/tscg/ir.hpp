#pragma once
// Prompt intermediate representation: an ordered list of role-tagged atoms.
// Lowering produces per tool one tool-def atom, one param-block atom, and the
// description segmented into plain text, filler spans, and delimiter glyphs.
// Filler spans carry everything the lexicon matched so their removal is a
// whole-atom operation; delimiter atoms give the delimiter substitution pass
// an exact, isolated span to rewrite.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tscg/errors.hpp"
#include "tscg/lexicon.hpp"
#include "tscg/schema.hpp"
#include "tscg/util.hpp"

namespace tscg {

enum class AtomRole {
    tool_def,
    param_block,
    description,
    delimiter,
    filler_span,
    constraint,
    closure,
    anchor_dup,
};

inline const char* atom_role_name(AtomRole r) {
    switch (r) {
        case AtomRole::tool_def: return "tool-def";
        case AtomRole::param_block: return "param-block";
        case AtomRole::description: return "description";
        case AtomRole::delimiter: return "delimiter";
        case AtomRole::filler_span: return "filler-span";
        case AtomRole::constraint: return "constraint";
        case AtomRole::closure: return "closure";
        case AtomRole::anchor_dup: return "anchor-dup";
    }
    return "?";
}

inline double default_importance(AtomRole r) {
    switch (r) {
        case AtomRole::tool_def: return 1.0;
        case AtomRole::constraint: return 1.0;
        case AtomRole::param_block: return 0.9;
        case AtomRole::description: return 0.5;
        case AtomRole::delimiter: return 0.1;
        case AtomRole::filler_span: return 0.0;
        case AtomRole::closure: return 0.0;
        case AtomRole::anchor_dup: return 0.0;
    }
    return 0.0;
}

struct Atom {
    int id = 0;            // stable identity across passes
    AtomRole role = AtomRole::description;
    std::string text;
    double importance = 0.0;
    std::string tool;      // owning tool name, empty for unowned atoms
};

struct PromptIR {
    std::vector<Atom> atoms;
    // (prerequisite, dependent) pairs, both sides are tool names
    std::vector<std::pair<std::string, std::string>> dependency_edges;
    int next_id = 0;

    Atom& add(AtomRole role, std::string text, const std::string& tool = "") {
        Atom a;
        a.id = next_id++;
        a.role = role;
        a.text = std::move(text);
        a.importance = default_importance(role);
        a.tool = tool;
        atoms.push_back(std::move(a));
        return atoms.back();
    }
};

namespace detail {

struct Seg {
    std::size_t begin, length;
    AtomRole role;
};

// Split a description into filler / delimiter / plain segments. Filler spans
// win over delimiter glyphs when they overlap (fillers were matched first).
inline std::vector<Seg> segment_description(const std::string& text,
                                            const FillerLexicon& lexicon,
                                            const std::vector<std::string>& variants) {
    std::vector<Seg> segs;
    auto fillers = lexicon.find_spans(text);
    std::size_t fi = 0;
    std::size_t pos = 0;
    std::size_t plain_start = 0;

    auto flush_plain = [&](std::size_t end) {
        if (end > plain_start) segs.push_back({plain_start, end - plain_start, AtomRole::description});
    };

    while (pos < text.size()) {
        if (fi < fillers.size() && fillers[fi].begin == pos) {
            flush_plain(pos);
            segs.push_back({pos, fillers[fi].length, AtomRole::filler_span});
            pos += fillers[fi].length;
            plain_start = pos;
            ++fi;
            continue;
        }
        std::size_t next_filler = fi < fillers.size() ? fillers[fi].begin : text.size();
        bool matched = false;
        for (const auto& v : variants) {
            if (pos + v.size() <= next_filler && text.compare(pos, v.size(), v) == 0) {
                flush_plain(pos);
                segs.push_back({pos, v.size(), AtomRole::delimiter});
                pos += v.size();
                plain_start = pos;
                matched = true;
                break;
            }
        }
        if (!matched) ++pos;
    }
    flush_plain(text.size());
    return segs;
}

inline void extract_dependency_edges(PromptIR& ir, const ToolCatalog& cat) {
    std::map<std::string, std::string> by_lower;
    for (const auto& t : cat.tools) by_lower[to_lower_ascii(t.name)] = t.name;

    for (const auto& t : cat.tools) {
        std::string lower = to_lower_ascii(t.description);
        for (const char* marker : {"after ", "requires "}) {
            std::size_t at = 0;
            std::size_t mlen = std::string(marker).size();
            while ((at = lower.find(marker, at)) != std::string::npos) {
                if (at > 0 && is_word_char(static_cast<unsigned char>(lower[at - 1]))) {
                    at += mlen;
                    continue;
                }
                std::size_t start = at + mlen;
                std::size_t end = start;
                while (end < lower.size() &&
                       (std::isalnum(static_cast<unsigned char>(lower[end])) ||
                        lower[end] == '_' || lower[end] == '.' || lower[end] == '-'))
                    ++end;
                std::string ref = lower.substr(start, end - start);
                // sentence punctuation can ride along on the captured name
                while (!ref.empty() && !by_lower.count(ref) &&
                       (ref.back() == '.' || ref.back() == '-' || ref.back() == '_'))
                    ref.pop_back();
                auto hit = by_lower.find(ref);
                if (hit != by_lower.end() && hit->second != t.name) {
                    std::pair<std::string, std::string> edge{hit->second, t.name};
                    bool seen = false;
                    for (const auto& e : ir.dependency_edges)
                        if (e == edge) seen = true;
                    if (!seen) ir.dependency_edges.push_back(edge);
                }
                at = end;
            }
        }
    }
}

}  // namespace detail

// Lower a catalog into IR order: per tool [tool-def, param-block,
// description segments...], then the output constraint (when given) at its
// source position, the end.
inline PromptIR lower_to_ir(const ToolCatalog& cat, const FillerLexicon& lexicon,
                            const DelimiterTable& delimiters,
                            const std::string& constraint_text = "") {
    PromptIR ir;
    auto variants = delimiters.all_variants();
    for (const auto& t : cat.tools) {
        ir.add(AtomRole::tool_def, t.name, t.name);
        ir.add(AtomRole::param_block, render_param_block(t), t.name);
        for (const auto& seg : detail::segment_description(t.description, lexicon, variants))
            ir.add(seg.role, t.description.substr(seg.begin, seg.length), t.name);
    }
    detail::extract_dependency_edges(ir, cat);
    if (!constraint_text.empty())
        ir.add(AtomRole::constraint, collapse_whitespace(constraint_text));
    return ir;
}

// F(a) = alpha * importance(a) + (1 - alpha) * distance_penalty(a), where the
// accessibility proxy is U-shaped over positions: endpoints 1, middle 0.5,
// and the penalty is 1 - proxy.
inline std::vector<double> score_fragility(const PromptIR& ir, double alpha = 0.5) {
    if (ir.atoms.empty()) throw EmptyIr("cannot score an empty IR");
    if (alpha < 0.0 || alpha > 1.0)
        throw Error("fragility alpha must be in [0, 1], got " + canonical_number(alpha));
    const std::size_t count = ir.atoms.size();
    std::vector<double> scores(count);
    for (std::size_t i = 0; i < count; ++i) {
        double proxy = 1.0;
        if (count > 1) {
            double frac = static_cast<double>(i) / static_cast<double>(count - 1);
            proxy = std::max(1.0 - frac, frac);
        }
        double penalty = 1.0 - proxy;
        scores[i] = alpha * ir.atoms[i].importance + (1.0 - alpha) * penalty;
    }
    return scores;
}

// Contiguous runs of atoms owned by the same tool.
struct AtomGroup {
    std::string tool;
    std::size_t begin, end;  // [begin, end)
};

inline std::vector<AtomGroup> tool_groups(const PromptIR& ir) {
    std::vector<AtomGroup> groups;
    std::size_t i = 0;
    while (i < ir.atoms.size()) {
        if (ir.atoms[i].tool.empty()) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < ir.atoms.size() && ir.atoms[j].tool == ir.atoms[i].tool) ++j;
        groups.push_back({ir.atoms[i].tool, i, j});
        i = j;
    }
    return groups;
}

namespace detail {

inline std::string strip_answer_prefix(const std::string& text) {
    std::string t = rtrim(text);
    std::string lower = to_lower_ascii(t);
    if (lower.rfind("answer:", 0) == 0) t = t.substr(7);
    while (!t.empty() && t.front() == ' ') t.erase(t.begin());
    return t;
}

}  // namespace detail

// Render one tool group as its compact single-line form:
// name(p1:ty p2?:ty)|description
inline std::string render_tool_line(const PromptIR& ir, const AtomGroup& g) {
    std::string head, desc;
    for (std::size_t i = g.begin; i < g.end; ++i) {
        const Atom& a = ir.atoms[i];
        if (a.role == AtomRole::tool_def || a.role == AtomRole::param_block)
            head += a.text;
        else
            desc += a.text;
    }
    desc = rtrim(desc);
    if (desc.empty()) return head;
    return head + "|" + desc;
}

// Compiled text grammar, one record per line:
//   [ANSWER:<type>]          output constraint, wherever its atom sits
//   name(p:ty p2?:ty ...)    tool signature
//   |<description>           continuation of the preceding tool
//   [RECAP] ...              anchor duplicates and the closure recap, last
inline std::string emit(const PromptIR& ir) {
    std::vector<std::string> lines;
    std::size_t i = 0;
    while (i < ir.atoms.size()) {
        const Atom& a = ir.atoms[i];
        if (a.tool.empty()) {
            if (a.role == AtomRole::constraint) {
                lines.push_back("[ANSWER:" + detail::strip_answer_prefix(a.text) + "]");
            } else if (a.role == AtomRole::closure || a.role == AtomRole::anchor_dup) {
                lines.push_back("[RECAP] " + a.text);
            } else {
                lines.push_back(a.text);
            }
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < ir.atoms.size() && ir.atoms[j].tool == a.tool) ++j;
        AtomGroup g{a.tool, i, j};
        std::string head, desc;
        for (std::size_t k = g.begin; k < g.end; ++k) {
            const Atom& atom = ir.atoms[k];
            if (atom.role == AtomRole::tool_def || atom.role == AtomRole::param_block)
                head += atom.text;
            else
                desc += atom.text;
        }
        lines.push_back(head);
        desc = rtrim(desc);
        if (!desc.empty()) lines.push_back("|" + desc);
        i = j;
    }
    std::string out;
    for (std::size_t k = 0; k < lines.size(); ++k) {
        if (k) out += '\n';
        out += lines[k];
    }
    return out;
}

// Stable JSON dump for golden tests and debugging.
inline ojson ir_to_json(const PromptIR& ir) {
    ojson atoms = ojson::array();
    for (const auto& a : ir.atoms) {
        ojson o;
        o["id"] = a.id;
        o["role"] = atom_role_name(a.role);
        o["text"] = a.text;
        o["importance"] = a.importance;
        o["tool"] = a.tool;
        atoms.push_back(o);
    }
    ojson edges = ojson::array();
    for (const auto& [a, b] : ir.dependency_edges) edges.push_back(ojson::array({a, b}));
    ojson out;
    out["atoms"] = atoms;
    out["dependency_edges"] = edges;
    return out;
}

}  // namespace tscg
