#pragma once
// Filler lexicon (removable low-content phrases, four categories) and the
// delimiter table (verbose phrase -> compact form, plus interchangeable
// delimiter variant sets). Both ship as embedded defaults mirrored by the
// files under data/, and both can be loaded from user files.

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tscg/errors.hpp"
#include "tscg/tokenizer.hpp"
#include "tscg/util.hpp"

namespace tscg {

namespace detail {

inline bool is_word_char(unsigned char c) {
    return std::isalnum(c) || c == '_';
}

// Case-insensitive phrase match at `pos` with word boundaries on both ends.
inline bool phrase_at(const std::string& lower_text, std::size_t pos,
                      const std::string& lower_phrase) {
    if (pos + lower_phrase.size() > lower_text.size()) return false;
    if (lower_text.compare(pos, lower_phrase.size(), lower_phrase) != 0) return false;
    if (pos > 0 && is_word_char(static_cast<unsigned char>(lower_text[pos - 1]))) return false;
    std::size_t end = pos + lower_phrase.size();
    if (end < lower_text.size() && is_word_char(static_cast<unsigned char>(lower_text[end])))
        return false;
    return true;
}

}  // namespace detail

enum class FillerCategory { politeness, hedging, redundant_connective, boilerplate };

inline const char* filler_category_name(FillerCategory c) {
    switch (c) {
        case FillerCategory::politeness: return "politeness";
        case FillerCategory::hedging: return "hedging";
        case FillerCategory::redundant_connective: return "redundant-connective";
        case FillerCategory::boilerplate: return "boilerplate";
    }
    return "?";
}

inline FillerCategory filler_category_from(const std::string& s) {
    if (s == "politeness") return FillerCategory::politeness;
    if (s == "hedging") return FillerCategory::hedging;
    if (s == "redundant-connective") return FillerCategory::redundant_connective;
    if (s == "boilerplate") return FillerCategory::boilerplate;
    throw Error("unknown filler category: " + s);
}

struct FillerEntry {
    std::string pattern;  // lowercase, single-spaced
    FillerCategory category;
};

struct FillerSpan {
    std::size_t begin, length;  // byte span in the original text
};

class FillerLexicon {
public:
    FillerLexicon() = default;
    explicit FillerLexicon(std::vector<FillerEntry> entries) : entries_(std::move(entries)) {
        // longest pattern first so a longer phrase wins over its prefix
        std::stable_sort(entries_.begin(), entries_.end(),
                         [](const FillerEntry& a, const FillerEntry& b) {
                             return a.pattern.size() > b.pattern.size();
                         });
    }

    const std::vector<FillerEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    // Non-overlapping matched spans, leftmost-longest. A span swallows one
    // trailing space so removal never leaves double spacing. Matching is
    // word-bounded, so patterns never fire inside identifiers.
    std::vector<FillerSpan> find_spans(const std::string& text) const {
        std::string lower = to_lower_ascii(text);
        std::vector<FillerSpan> spans;
        std::size_t pos = 0;
        while (pos < lower.size()) {
            bool matched = false;
            if (!detail::is_word_char(static_cast<unsigned char>(lower[pos])) &&
                lower[pos] != ' ') {
                ++pos;
                continue;
            }
            for (const auto& e : entries_) {
                if (detail::phrase_at(lower, pos, e.pattern)) {
                    std::size_t len = e.pattern.size();
                    if (pos + len < text.size() && text[pos + len] == ' ') ++len;
                    spans.push_back({pos, len});
                    pos += len;
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                // skip the whole word; patterns start on word boundaries
                while (pos < lower.size() &&
                       detail::is_word_char(static_cast<unsigned char>(lower[pos])))
                    ++pos;
                while (pos < lower.size() &&
                       !detail::is_word_char(static_cast<unsigned char>(lower[pos])))
                    ++pos;
            }
        }
        return spans;
    }

    bool matches_exactly(const std::string& text) const {
        std::string t = rtrim(text);
        std::string lower = to_lower_ascii(t);
        for (const auto& e : entries_)
            if (lower == e.pattern) return true;
        return false;
    }

    std::string strip(const std::string& text) const {
        auto spans = find_spans(text);
        std::string out;
        out.reserve(text.size());
        std::size_t cursor = 0;
        for (const auto& sp : spans) {
            out += text.substr(cursor, sp.begin - cursor);
            cursor = sp.begin + sp.length;
        }
        out += text.substr(cursor);
        return out;
    }

    static const FillerLexicon& builtin();
    static FillerLexicon load(const std::string& path);
    static FillerLexicon parse(const std::string& text);

private:
    std::vector<FillerEntry> entries_;
};

// category <TAB> pattern, one per line, '#' comments
inline FillerLexicon FillerLexicon::parse(const std::string& text) {
    std::vector<FillerEntry> entries;
    for (auto& line : split_lines(text)) {
        std::string t = rtrim(line);
        if (t.empty() || t[0] == '#') continue;
        auto tab = t.find('\t');
        if (tab == std::string::npos) throw Error("filler lexicon: missing tab in line: " + t);
        entries.push_back(
            {to_lower_ascii(t.substr(tab + 1)), filler_category_from(t.substr(0, tab))});
    }
    return FillerLexicon(std::move(entries));
}

inline FillerLexicon FillerLexicon::load(const std::string& path) {
    return parse(read_file_or_throw(path));
}

struct DelimiterRow {
    std::string verbose;                 // lowercase phrase to rewrite
    std::string compact;                 // replacement delimiter
    std::vector<std::string> variants;   // interchangeable spellings, preference order
};

class DelimiterTable {
public:
    DelimiterTable() = default;
    explicit DelimiterTable(std::vector<DelimiterRow> rows) : rows_(std::move(rows)) {
        std::stable_sort(rows_.begin(), rows_.end(),
                         [](const DelimiterRow& a, const DelimiterRow& b) {
                             return a.verbose.size() > b.verbose.size();
                         });
    }

    const std::vector<DelimiterRow>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

    // Every delimiter spelling that may appear in text, longest first; used
    // to segment descriptions into delimiter atoms.
    std::vector<std::string> all_variants() const {
        std::vector<std::string> out;
        for (const auto& r : rows_)
            for (const auto& v : r.variants)
                if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
        std::stable_sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
            return a.size() > b.size();
        });
        return out;
    }

    const DelimiterRow* row_for_variant(const std::string& v) const {
        for (const auto& r : rows_)
            if (std::find(r.variants.begin(), r.variants.end(), v) != r.variants.end())
                return &r;
        return nullptr;
    }

    // Each compact form must cost no more tokens than the phrase it replaces.
    void validate(const Tokenizer& tok) const {
        for (const auto& r : rows_) {
            if (tok.count_tokens(r.compact) > tok.count_tokens(r.verbose))
                throw InvalidDelimiterTable("compact form '" + r.compact +
                                            "' costs more tokens than '" + r.verbose + "'");
        }
    }

    static const DelimiterTable& builtin();
    static DelimiterTable parse(const std::string& json_text);
    static DelimiterTable load(const std::string& path, const Tokenizer& tok) {
        DelimiterTable t = parse(read_file_or_throw(path));
        t.validate(tok);
        return t;
    }

private:
    std::vector<DelimiterRow> rows_;
};

inline DelimiterTable DelimiterTable::parse(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedJson(std::string("delimiter table: ") + e.what());
    }
    if (!j.is_array()) throw MalformedJson("delimiter table: expected a JSON array");
    std::vector<DelimiterRow> rows;
    for (const auto& item : j) {
        DelimiterRow r;
        r.verbose = to_lower_ascii(item.at("verbose").get<std::string>());
        r.compact = item.at("compact").get<std::string>();
        for (const auto& v : item.at("variants")) r.variants.push_back(v.get<std::string>());
        if (r.variants.empty()) throw MalformedJson("delimiter table: empty variant set");
        rows.push_back(std::move(r));
    }
    return DelimiterTable(std::move(rows));
}

inline const FillerLexicon& FillerLexicon::builtin() {
    static const FillerLexicon lex = [] {
        using C = FillerCategory;
        std::vector<FillerEntry> e;
        auto add = [&](C c, std::initializer_list<const char*> pats) {
            for (const char* p : pats) e.push_back({p, c});
        };
        add(C::politeness,
            {"please note that", "please note", "please ensure that", "please ensure",
             "please remember to", "please remember", "please be aware that",
             "please be aware", "please", "kindly", "thank you", "thanks in advance",
             "feel free to", "don't hesitate to", "do not hesitate to",
             "we kindly ask that", "we kindly ask", "you are welcome to",
             "you're welcome to", "be sure to", "make sure to", "if you wish",
             "at your convenience", "we appreciate your"});
        add(C::hedging,
            {"note that", "it should be noted that", "it is worth noting that",
             "it's worth noting that", "keep in mind that", "bear in mind that",
             "generally speaking", "generally", "usually", "typically", "basically",
             "essentially", "arguably", "perhaps", "possibly", "probably",
             "presumably", "seemingly", "apparently", "somewhat", "relatively",
             "more or less", "in most cases", "in general", "as a rule",
             "to some extent", "sort of", "kind of", "in a sense", "roughly speaking"});
        add(C::redundant_connective,
            {"in order to", "so as to", "as well as", "in addition to", "in addition",
             "additionally", "furthermore", "moreover", "as mentioned above",
             "as mentioned earlier", "as described above", "as noted above",
             "that is to say", "in other words", "needless to say", "of course",
             "naturally", "obviously", "clearly", "simply put", "to be clear",
             "with that said", "that being said", "at the end of the day",
             "first and foremost", "last but not least", "each and every",
             "any and all"});
        add(C::boilerplate,
            {"this tool", "this function", "this method", "this endpoint",
             "can be used to", "may be used to", "is used to", "is used for",
             "is useful for", "allows you to", "allows the user to", "enables you to",
             "lets you", "provides the ability to", "is responsible for",
             "is designed to", "is intended to", "serves to", "the purpose of this",
             "makes it possible to", "as needed", "if necessary", "if needed",
             "where applicable", "when appropriate", "and so on", "and so forth",
             "a wrapper around"});
        return FillerLexicon(std::move(e));
    }();
    return lex;
}

inline const DelimiterTable& DelimiterTable::builtin() {
    static const DelimiterTable table = [] {
        std::vector<DelimiterRow> r;
        auto add = [&](const char* verbose, const char* compact,
                       std::initializer_list<const char*> vars) {
            DelimiterRow row;
            row.verbose = verbose;
            row.compact = compact;
            for (const char* v : vars) row.variants.push_back(v);
            r.push_back(std::move(row));
        };
        add("corresponds to", "→", {"->", "→"});
        add("maps to", "→", {"->", "→"});
        add("refers to", "→", {"->", "→"});
        add("points to", "→", {"->", "→"});
        add("leads to", "→", {"->", "→"});
        add("results in", "→", {"->", "→"});
        add("is converted to", "→", {"->", "→"});
        add("translates to", "→", {"->", "→"});
        add("implies", "⇒", {"=>", "⇒"});
        add("if and only if", "⇔", {"<=>", "⇔"});
        add("the following items", ":", {":"});
        add("the following", ":", {":"});
        add("as follows", ":", {":"});
        add("consisting of", ":", {":"});
        add("consists of", ":", {":"});
        add("is defined as", ":=", {":=", "≜"});
        add("is equal to", "=", {"="});
        add("is the same as", "=", {"="});
        add("is not equal to", "≠", {"!=", "≠"});
        add("greater than or equal to", "≥", {">=", "≥"});
        add("less than or equal to", "≤", {"<=", "≤"});
        add("greater than", ">", {">"});
        add("less than", "<", {"<"});
        add("is one of", "∈", {"∈"});
        add("is an element of", "∈", {"∈"});
        return DelimiterTable(std::move(r));
    }();
    return table;
}

}  // namespace tscg
