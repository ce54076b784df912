#pragma once
// The eight IR passes. Three classes by token-count direction: reducing
// (filler removal, delimiter rewriting, delimiter substitution, constraint
// fronting), reordering (dependency ordering, fragility ordering), and
// expanding (anchor duplication, closure recap). Every pass is a pure
// function on the IR; disabled passes simply never run.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "tscg/errors.hpp"
#include "tscg/ir.hpp"
#include "tscg/lexicon.hpp"
#include "tscg/tokenizer.hpp"

namespace tscg {

// SDM: drop filler-span atoms that match the lexicon. Only filler spans are
// removable; every other role passes through untouched.
inline PromptIR sdm(const PromptIR& ir, const FillerLexicon& lexicon) {
    PromptIR out;
    out.dependency_edges = ir.dependency_edges;
    out.next_id = ir.next_id;
    for (const auto& a : ir.atoms) {
        if (a.role == AtomRole::filler_span && lexicon.matches_exactly(a.text)) continue;
        out.atoms.push_back(a);
    }
    return out;
}

// TAS: rewrite each delimiter atom to the cheapest spelling in its variant
// set; ties keep the earliest variant. Needs real token counts.
inline PromptIR tas(const PromptIR& ir, const DelimiterTable& table, const Tokenizer& tok) {
    if (tok.is_heuristic())
        throw HeuristicTokenizerForbidden("delimiter substitution needs an exact tokenizer");
    PromptIR out = ir;
    for (auto& a : out.atoms) {
        if (a.role != AtomRole::delimiter) continue;
        const DelimiterRow* row = table.row_for_variant(a.text);
        if (!row) continue;
        std::string best = row->variants.front();
        std::int64_t best_cost = tok.count_tokens(best);
        for (std::size_t i = 1; i < row->variants.size(); ++i) {
            std::int64_t c = tok.count_tokens(row->variants[i]);
            if (c < best_cost) {
                best = row->variants[i];
                best_cost = c;
            }
        }
        a.text = best;
    }
    return out;
}

namespace detail {

inline bool glue_both_sides(const std::string& compact) {
    return compact != ":" && compact != ";";
}

// Replace word-bounded occurrences of `verbose` (already lowercase) with
// `compact`. Connector forms consume one space on each side so "a maps to b"
// becomes "a→b"; colon-like forms consume only the left space. A compact
// string already present right after the match is folded in rather than
// doubled.
inline std::string replace_verbose_phrase(const std::string& text, const std::string& verbose,
                                          const std::string& compact) {
    std::string lower = to_lower_ascii(text);
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    bool both = glue_both_sides(compact);
    while (pos < text.size()) {
        std::size_t hit = std::string::npos;
        for (std::size_t p = pos; p + verbose.size() <= lower.size(); ++p) {
            if (phrase_at(lower, p, verbose)) {
                hit = p;
                break;
            }
        }
        if (hit == std::string::npos) {
            out += text.substr(pos);
            break;
        }
        std::size_t left = hit;
        std::size_t right = hit + verbose.size();
        if (left > pos && text[left - 1] == ' ') --left;
        if (both && right < text.size() && text[right] == ' ') ++right;
        if (text.compare(right, compact.size(), compact) == 0) right += compact.size();
        out += text.substr(pos, left - pos);
        out += compact;
        pos = right;
    }
    return out;
}

}  // namespace detail

// DRO: rewrite verbose structural phrases inside description atoms to their
// compact delimiter forms, longest phrase first.
inline PromptIR dro(const PromptIR& ir, const DelimiterTable& table) {
    PromptIR out = ir;
    for (auto& a : out.atoms) {
        if (a.role != AtomRole::description) continue;
        for (const auto& row : table.rows())
            a.text = detail::replace_verbose_phrase(a.text, row.verbose, row.compact);
    }
    return out;
}

// CFL: move the output constraint to index 0 and normalize its text to the
// bare answer type. Identity when no constraint atom exists.
inline PromptIR cfl(const PromptIR& ir) {
    std::size_t at = ir.atoms.size();
    for (std::size_t i = 0; i < ir.atoms.size(); ++i) {
        if (ir.atoms[i].role == AtomRole::constraint) {
            at = i;
            break;
        }
    }
    if (at == ir.atoms.size()) return ir;
    PromptIR out;
    out.dependency_edges = ir.dependency_edges;
    out.next_id = ir.next_id;
    Atom c = ir.atoms[at];
    c.text = detail::strip_answer_prefix(c.text);
    out.atoms.push_back(std::move(c));
    for (std::size_t i = 0; i < ir.atoms.size(); ++i)
        if (i != at) out.atoms.push_back(ir.atoms[i]);
    return out;
}

namespace detail {

// Rebuild the IR with tool groups in `order`; unowned atoms keep their side
// (before the first group / after the last).
inline PromptIR rebuild_with_group_order(const PromptIR& ir, const std::vector<AtomGroup>& groups,
                                         const std::vector<std::size_t>& order) {
    PromptIR out;
    out.dependency_edges = ir.dependency_edges;
    out.next_id = ir.next_id;
    std::size_t first_group_at = groups.empty() ? ir.atoms.size() : groups.front().begin;
    for (std::size_t i = 0; i < first_group_at; ++i)
        if (ir.atoms[i].tool.empty()) out.atoms.push_back(ir.atoms[i]);
    for (std::size_t gi : order) {
        for (std::size_t i = groups[gi].begin; i < groups[gi].end; ++i)
            out.atoms.push_back(ir.atoms[i]);
    }
    for (std::size_t i = first_group_at; i < ir.atoms.size(); ++i)
        if (ir.atoms[i].tool.empty()) out.atoms.push_back(ir.atoms[i]);
    return out;
}

}  // namespace detail

// CFO: stable topological order of tool groups under the dependency edges.
// Groups without constraints keep their relative order; a cycle is an error
// that names its members.
inline PromptIR cfo(const PromptIR& ir) {
    auto groups = tool_groups(ir);
    if (groups.size() <= 1) return ir;

    std::map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < groups.size(); ++i) index_of[groups[i].tool] = i;

    std::vector<std::vector<std::size_t>> out_edges(groups.size());
    std::vector<int> indegree(groups.size(), 0);
    for (const auto& [pre, post] : ir.dependency_edges) {
        auto a = index_of.find(pre);
        auto b = index_of.find(post);
        if (a == index_of.end() || b == index_of.end() || a->second == b->second) continue;
        out_edges[a->second].push_back(b->second);
        ++indegree[b->second];
    }

    // Kahn's algorithm; the ready set is drained smallest original index
    // first, which is exactly the stability rule.
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < groups.size(); ++i)
        if (indegree[i] == 0) ready.insert(i);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        std::size_t g = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(g);
        for (std::size_t next : out_edges[g])
            if (--indegree[next] == 0) ready.insert(next);
    }
    if (order.size() != groups.size()) {
        std::vector<std::string> cycle;
        for (std::size_t i = 0; i < groups.size(); ++i)
            if (indegree[i] > 0) cycle.push_back(groups[i].tool);
        std::string msg = "dependency cycle among:";
        for (const auto& t : cycle) msg += " " + t;
        throw CyclicDependency(msg, std::move(cycle));
    }
    return detail::rebuild_with_group_order(ir, groups, order);
}

// CAS: order tool groups by descending fragility of their tool-def atom,
// stable so equal scores keep the original order. The highest-fragility
// group lands at the front (position 0); the closure passes that run later
// supply the matching high-fragility copy at the tail.
inline PromptIR cas(const PromptIR& ir, const std::vector<double>& scores) {
    if (scores.size() != ir.atoms.size())
        throw Error("fragility scores do not cover the IR");
    auto groups = tool_groups(ir);
    if (groups.size() <= 1) return ir;

    std::vector<double> group_score(groups.size(), 0.0);
    for (std::size_t i = 0; i < groups.size(); ++i) {
        group_score[i] = scores[groups[i].begin];
        for (std::size_t k = groups[i].begin; k < groups[i].end; ++k)
            if (ir.atoms[k].role == AtomRole::tool_def) group_score[i] = scores[k];
    }
    std::vector<std::size_t> order(groups.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return group_score[a] > group_score[b];
    });
    return detail::rebuild_with_group_order(ir, groups, order);
}

namespace detail {

inline bool recap_candidate(AtomRole r) {
    return r == AtomRole::tool_def || r == AtomRole::param_block ||
           r == AtomRole::description || r == AtomRole::constraint;
}

// Recap text for an atom: tool-def atoms stand for their whole group and
// recap as the full single-line form; param blocks carry their tool name;
// other atoms recap verbatim.
inline std::string recap_text(const PromptIR& ir, std::size_t idx) {
    const Atom& a = ir.atoms[idx];
    if (a.role == AtomRole::param_block) return a.tool + a.text;
    if (a.role != AtomRole::tool_def) return a.text;
    for (const auto& g : tool_groups(ir))
        if (idx >= g.begin && idx < g.end) return render_tool_line(ir, g);
    return a.text;
}

}  // namespace detail

// SAD-F: greedily duplicate high fragility-per-token atoms into the closure
// region while the duplicates' measured cost fits the budget. Cost is
// charged as the actual emitted token increase, so the output never exceeds
// input + budget. A zero budget is the identity.
inline PromptIR sad_f(const PromptIR& ir, const std::vector<double>& scores, int budget,
                      const Tokenizer& tok) {
    if (tok.is_heuristic())
        throw HeuristicTokenizerForbidden("anchor duplication needs an exact tokenizer");
    if (scores.size() != ir.atoms.size())
        throw Error("fragility scores do not cover the IR");
    if (budget <= 0) return ir;

    struct Cand {
        std::size_t idx;
        double ratio;
    };
    std::vector<Cand> cands;
    for (std::size_t i = 0; i < ir.atoms.size(); ++i) {
        if (!detail::recap_candidate(ir.atoms[i].role)) continue;
        std::int64_t cost = std::max<std::int64_t>(1, tok.count_tokens(ir.atoms[i].text));
        cands.push_back({i, scores[i] / static_cast<double>(cost)});
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Cand& a, const Cand& b) { return a.ratio > b.ratio; });

    PromptIR out = ir;
    std::int64_t used = 0;
    std::int64_t current = tok.count_tokens(emit(out));
    for (const auto& c : cands) {
        PromptIR trial = out;
        trial.add(AtomRole::anchor_dup, ir.atoms[c.idx].text);
        std::int64_t total = tok.count_tokens(emit(trial));
        std::int64_t marginal = total - current;
        if (used + marginal > budget) continue;
        out = std::move(trial);
        used += marginal;
        current = total;
    }
    return out;
}

// CCP: replace any existing closure with one recap atom carrying the top-k
// fragility texts. Atoms already sitting in the final tool group are not
// recapped (they are at position n already, so repeating them bridges no
// distance); a single-tool prompt therefore gets no closure. k = 0 removes
// the closure outright.
inline PromptIR ccp(const PromptIR& ir, const std::vector<double>& scores, int k) {
    if (scores.size() != ir.atoms.size())
        throw Error("fragility scores do not cover the IR");
    PromptIR out;
    out.dependency_edges = ir.dependency_edges;
    out.next_id = ir.next_id;
    for (const auto& a : ir.atoms)
        if (a.role != AtomRole::closure) out.atoms.push_back(a);
    if (k <= 0) return out;

    auto groups = tool_groups(ir);
    std::size_t tail_begin = ir.atoms.size(), tail_end = ir.atoms.size();
    if (!groups.empty()) {
        tail_begin = groups.back().begin;
        tail_end = groups.back().end;
    }
    std::vector<std::size_t> picks;
    for (std::size_t i = 0; i < ir.atoms.size(); ++i) {
        if (i >= tail_begin && i < tail_end) continue;
        if (detail::recap_candidate(ir.atoms[i].role)) picks.push_back(i);
    }
    std::stable_sort(picks.begin(), picks.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    if (picks.size() > static_cast<std::size_t>(k)) picks.resize(static_cast<std::size_t>(k));

    std::string text;
    for (std::size_t i = 0; i < picks.size(); ++i) {
        if (i) text += " | ";
        text += detail::recap_text(ir, picks[i]);
    }
    if (text.empty()) return out;
    out.add(AtomRole::closure, text);
    return out;
}

}  // namespace tscg
