#pragma once
// Inverse of the emit grammar plus the preservation check: every structural
// fact of the source catalog (names, params, types, optionality, enums,
// bounds) must survive into the compiled text; description words are checked
// in a separate advisory tier because filler removal is allowed to drop them.

#include <cstdlib>
#include <string>
#include <vector>

#include "tscg/errors.hpp"
#include "tscg/lexicon.hpp"
#include "tscg/schema.hpp"
#include "tscg/util.hpp"

namespace tscg {

namespace detail {

inline double parse_grammar_number(const std::string& s, int line, int col) {
    if (s.empty()) throw GrammarError("empty numeric bound", line, col);
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + s.size())
        throw GrammarError("malformed numeric bound '" + s + "'", line, col);
    return v;
}

inline ParamSpec parse_param_entry(const std::string& entry, int line, int col) {
    ParamSpec p;
    std::size_t colon = entry.find(':');
    if (colon == std::string::npos)
        throw GrammarError("expected ':' between parameter name and type", line,
                           col + static_cast<int>(entry.size()));
    std::string name = entry.substr(0, colon);
    if (!name.empty() && name.back() == '?') {
        p.required = false;
        name.pop_back();
    }
    if (name.empty()) throw GrammarError("empty parameter name", line, col);
    p.name = name;

    int type_col = col + static_cast<int>(colon) + 1;
    std::string ty = entry.substr(colon + 1);
    if (ty.empty()) throw GrammarError("missing parameter type", line, type_col);

    if (ty.rfind("enum[", 0) == 0) {
        if (ty.back() != ']')
            throw GrammarError("unterminated enum value list", line, type_col);
        std::string inner = ty.substr(5, ty.size() - 6);
        if (inner.empty()) throw GrammarError("empty enum value list", line, type_col);
        p.type = JsonType::enum_t;
        std::size_t start = 0;
        while (true) {
            std::size_t bar = inner.find('|', start);
            std::string value = inner.substr(start, bar - start);
            if (value.empty()) throw GrammarError("empty enum value", line, type_col);
            p.enum_values.push_back(value);
            if (bar == std::string::npos) break;
            start = bar + 1;
        }
        return p;
    }

    std::size_t bracket = ty.find('[');
    std::string base = ty.substr(0, bracket);
    if (base == "str")
        p.type = JsonType::string_t;
    else if (base == "int")
        p.type = JsonType::integer_t;
    else if (base == "num")
        p.type = JsonType::number_t;
    else if (base == "bool")
        p.type = JsonType::boolean_t;
    else if (base == "arr")
        p.type = JsonType::array_t;
    else if (base == "obj")
        p.type = JsonType::object_t;
    else
        throw GrammarError("unknown type '" + base + "'", line, type_col);

    if (bracket != std::string::npos) {
        if (p.type != JsonType::integer_t && p.type != JsonType::number_t)
            throw GrammarError("bounds are not allowed on type '" + base + "'", line, type_col);
        if (ty.back() != ']')
            throw GrammarError("unterminated bounds", line, type_col);
        std::string inner = ty.substr(bracket + 1, ty.size() - bracket - 2);
        std::size_t dots = inner.find("..");
        if (dots == std::string::npos)
            throw GrammarError("bounds must use 'lo..hi'", line, type_col);
        std::string lo = inner.substr(0, dots);
        std::string hi = inner.substr(dots + 2);
        if (lo.empty() && hi.empty())
            throw GrammarError("bounds must give at least one endpoint", line, type_col);
        int bound_col = type_col + static_cast<int>(bracket) + 1;
        if (!lo.empty()) p.min_bound = parse_grammar_number(lo, line, bound_col);
        if (!hi.empty()) p.max_bound = parse_grammar_number(hi, line, bound_col);
    }
    return p;
}

}  // namespace detail

inline ToolCatalog parse_compiled(const std::string& text) {
    ToolCatalog cat;
    cat.source_dialect = Dialect::compiled_text;
    cat.source_text = text;
    cat.source_bytes_hash = fnv1a64_hex(text);

    int line_no = 0;
    for (const std::string& line : split_lines(text)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.rfind("[ANSWER:", 0) == 0) {
            if (line.back() != ']')
                throw GrammarError("unterminated [ANSWER:] record", line_no,
                                   static_cast<int>(line.size()) + 1);
            continue;
        }
        if (line.rfind("[RECAP]", 0) == 0) continue;
        if (line.front() == '|') {
            if (cat.tools.empty())
                throw GrammarError("description continuation without a preceding tool", line_no,
                                   1);
            ToolSchema& tool = cat.tools.back();
            if (!tool.description.empty()) tool.description += ' ';
            tool.description += line.substr(1);
            continue;
        }

        std::size_t lparen = line.find('(');
        if (lparen == std::string::npos)
            throw GrammarError("expected '(' in tool signature", line_no,
                               static_cast<int>(line.size()) + 1);
        ToolSchema tool;
        tool.name = line.substr(0, lparen);
        if (tool.name.empty()) throw GrammarError("empty tool name", line_no, 1);
        for (std::size_t i = 0; i < tool.name.size(); ++i)
            if (is_space_char(tool.name[i]))
                throw GrammarError("whitespace in tool name", line_no, static_cast<int>(i) + 1);

        std::size_t rparen = line.find(')', lparen);
        if (rparen == std::string::npos)
            throw GrammarError("unterminated parameter list", line_no,
                               static_cast<int>(lparen) + 1);
        std::string inner = line.substr(lparen + 1, rparen - lparen - 1);
        std::size_t start = 0;
        while (start < inner.size()) {
            std::size_t space = inner.find(' ', start);
            std::size_t len = (space == std::string::npos ? inner.size() : space) - start;
            int col = static_cast<int>(lparen) + 2 + static_cast<int>(start);
            if (len == 0) throw GrammarError("empty parameter entry", line_no, col);
            ParamSpec p = detail::parse_param_entry(inner.substr(start, len), line_no, col);
            for (const auto& existing : tool.params)
                if (existing.name == p.name)
                    throw GrammarError("duplicate parameter '" + p.name + "'", line_no, col);
            tool.params.push_back(std::move(p));
            if (space == std::string::npos) break;
            start = space + 1;
        }

        std::string rest = line.substr(rparen + 1);
        if (!rest.empty()) {
            if (rest.front() != '|')
                throw GrammarError("unexpected text after ')'", line_no,
                                   static_cast<int>(rparen) + 2);
            tool.description = rest.substr(1);
        }
        for (const auto& existing : cat.tools)
            if (existing.name == tool.name)
                throw DuplicateToolName("duplicate tool name: " + tool.name);
        cat.tools.push_back(std::move(tool));
    }
    return cat;
}

struct SupersetVerdict {
    bool ok = false;  // structural tier only
    std::vector<SemanticAtom> missing_structural;
    // Advisory: description words absent from the compiled text. Filler
    // removal and delimiter rewriting may legitimately drop these.
    std::vector<SemanticAtom> missing_content_words;
};

inline SupersetVerdict verify_superset(const ToolCatalog& original,
                                       const std::string& compiled_text,
                                       const FillerLexicon& fillers = FillerLexicon::builtin()) {
    ToolCatalog compiled = parse_compiled(compiled_text);
    SemanticAtomSet want = semantic_atoms(original, fillers);
    SemanticAtomSet have = semantic_atoms(compiled, fillers);
    SupersetVerdict verdict;
    for (const auto& atom : want) {
        if (have.count(atom)) continue;
        if (is_structural_kind(atom.kind))
            verdict.missing_structural.push_back(atom);
        else
            verdict.missing_content_words.push_back(atom);
    }
    verdict.ok = verdict.missing_structural.empty();
    return verdict;
}

}  // namespace tscg
