#pragma once
// Byte-level BPE tokenizer loaded from GPT-2-layout artifacts (vocab.json +
// merges.txt). Every input byte is first mapped to a printable code point via
// the standard byte-level table, then adjacent symbol pairs are merged in
// rank order: repeatedly take the lowest-rank pair, leftmost occurrence
// first, until no listed merge applies. Tokenization is lossless; detokenize
// inverts the byte mapping exactly.
//
// A heuristic counting mode (ceil(bytes / 4)) stands in where only rough
// counts are needed. Passes that depend on token identities refuse it.

#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tscg/errors.hpp"
#include "tscg/util.hpp"

namespace tscg {

using TokenId = std::int32_t;

namespace detail {

inline std::string codepoint_to_utf8(int cp) {
    std::string out;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
    return out;
}

// byte value -> code point of the printable stand-in character
inline const std::vector<int>& byte_to_codepoint() {
    static const std::vector<int> table = [] {
        std::vector<int> t(256, -1);
        auto printable = [](int b) {
            return (b >= 33 && b <= 126) || (b >= 161 && b <= 172) || (b >= 174 && b <= 255);
        };
        int next = 0;
        for (int b = 0; b < 256; ++b) {
            if (printable(b))
                t[b] = b;
            else
                t[b] = 256 + next++;
        }
        return t;
    }();
    return table;
}

inline const std::unordered_map<int, unsigned char>& codepoint_to_byte() {
    static const std::unordered_map<int, unsigned char> table = [] {
        std::unordered_map<int, unsigned char> t;
        const auto& fwd = byte_to_codepoint();
        for (int b = 0; b < 256; ++b) t.emplace(fwd[b], static_cast<unsigned char>(b));
        return t;
    }();
    return table;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Open-addressed hash map from a packed symbol-id pair to a packed
// (rank, merged-id) value. Insert-only, capacity fixed at construction,
// key 0 reserved as the empty-slot marker. The merge loop probes this table
// once per adjacent pair, so it is kept flat and allocation-free.
class PairMap {
public:
    PairMap() = default;

    explicit PairMap(std::size_t expected) {
        std::size_t cap = 16;
        while (cap < expected * 2 + 1) cap <<= 1;
        keys_.assign(cap, 0);
        vals_.assign(cap, 0);
        mask_ = cap - 1;
    }

    bool insert(std::uint64_t key, std::uint64_t val) {
        std::size_t i = splitmix64(key) & mask_;
        while (keys_[i] != 0) {
            if (keys_[i] == key) return false;
            i = (i + 1) & mask_;
        }
        keys_[i] = key;
        vals_[i] = val;
        return true;
    }

    bool find(std::uint64_t key, std::uint64_t& val) const {
        if (keys_.empty()) return false;
        std::size_t i = splitmix64(key) & mask_;
        while (keys_[i] != 0) {
            if (keys_[i] == key) {
                val = vals_[i];
                return true;
            }
            i = (i + 1) & mask_;
        }
        return false;
    }

private:
    std::vector<std::uint64_t> keys_;
    std::vector<std::uint64_t> vals_;
    std::size_t mask_ = 0;
};

}  // namespace detail

// The 256 single-byte symbols in byte order; entry i is the mapped string for
// byte value i. Toy vocabularies in tests are built from this.
inline const std::vector<std::string>& byte_level_alphabet() {
    static const std::vector<std::string> alphabet = [] {
        std::vector<std::string> a(256);
        const auto& fwd = detail::byte_to_codepoint();
        for (int b = 0; b < 256; ++b) a[b] = detail::codepoint_to_utf8(fwd[b]);
        return a;
    }();
    return alphabet;
}

class BpeTokenizer {
public:
    BpeTokenizer() = default;

    BpeTokenizer(std::unordered_map<std::string, TokenId> vocab,
                 std::vector<std::pair<std::string, std::string>> merges)
        : vocab_(std::move(vocab)), merges_(std::move(merges)) {
        intern_strings_.reserve(vocab_.size() + 300);
        for (const auto& [tok, id] : vocab_) {
            id_to_token_.emplace(id, tok);
            std::int32_t sym = intern(tok);
            intern_vocab_[static_cast<std::size_t>(sym)] = id;
            intern_in_vocab_[static_cast<std::size_t>(sym)] = 1;
        }
        byte_fallback_ = true;
        const auto& alphabet = byte_level_alphabet();
        for (int b = 0; b < 256; ++b) {
            if (!vocab_.count(alphabet[static_cast<std::size_t>(b)])) byte_fallback_ = false;
            byte_sym_[b] = intern(alphabet[static_cast<std::size_t>(b)]);
        }
        pair_merge_ = detail::PairMap(merges_.size());
        for (std::size_t r = 0; r < merges_.size(); ++r) {
            const auto& [l, rgt] = merges_[r];
            if (!vocab_.count(l + rgt))
                throw MergeWithoutVocabEntry("merge result missing from vocab: " + l + rgt);
            std::uint64_t key = pack_pair(intern(l), intern(rgt));
            std::uint64_t val = (static_cast<std::uint64_t>(r) << 32) |
                                static_cast<std::uint32_t>(intern(l + rgt));
            if (!pair_merge_.insert(key, val))
                throw DuplicateMerge("duplicate merge: " + l + " " + rgt);
        }
        chunk_split_safe_ = no_token_puts_whitespace_after_nonspace();
    }

    bool byte_fallback() const { return byte_fallback_; }
    std::size_t vocab_size() const { return vocab_.size(); }
    std::size_t merge_count() const { return merges_.size(); }

    // Splits the input into mapped single-byte symbols, then runs the merge
    // loop with a (rank, position) priority queue over adjacent pairs. Symbols
    // are tracked as interned integer ids; strings never enter the loop.
    //
    // When no vocab token places a whitespace byte after a non-whitespace byte
    // (true of the shipped artifact, where tokens are either all-whitespace or
    // one optional leading space plus a non-space run), no merge can cross a
    // boundary between a non-whitespace byte and a following whitespace byte.
    // The input is then cut at those points and each [ws*][non-ws+] chunk runs
    // through the merge loop independently: the candidate pairs on either side
    // never interact, so the concatenated result equals the whole-text run.
    std::vector<std::string> tokenize_symbols(const std::string& text) const {
        std::vector<std::string> out;
        for_each_chunk(text, [&](const char* p, std::size_t n) {
            auto syms = tokenize_interned(p, n);
            for (std::int32_t s : syms)
                out.push_back(intern_strings_[static_cast<std::size_t>(s)]);
        });
        return out;
    }

    std::vector<TokenId> tokenize(const std::string& text) const {
        std::vector<TokenId> ids;
        ids.reserve(text.size() / 3);
        for_each_chunk(text, [&](const char* p, std::size_t n) {
            auto syms = tokenize_interned(p, n);
            for (std::int32_t s : syms) {
                if (!intern_in_vocab_[static_cast<std::size_t>(s)])
                    throw UnencodableByte("no vocab entry for symbol '" +
                                          intern_strings_[static_cast<std::size_t>(s)] + "'");
                ids.push_back(intern_vocab_[static_cast<std::size_t>(s)]);
            }
        });
        return ids;
    }

    // Token count with per-chunk memoization. Chunks recur heavily across the
    // texts the compiler counts (schema keys, repeated lines), so this is the
    // hot path backing every report. Single-threaded use assumed.
    std::int64_t count_tokens(const std::string& text) const {
        std::int64_t total = 0;
        for_each_chunk(text, [&](const char* p, std::size_t n) {
            std::string_view chunk(p, n);
            auto it = count_cache_.find(chunk);
            if (it != count_cache_.end()) {
                total += it->second;
                return;
            }
            auto syms = tokenize_interned(p, n);
            for (std::int32_t s : syms) {
                if (!intern_in_vocab_[static_cast<std::size_t>(s)])
                    throw UnencodableByte("no vocab entry for symbol '" +
                                          intern_strings_[static_cast<std::size_t>(s)] + "'");
            }
            auto count = static_cast<std::int64_t>(syms.size());
            if (count_cache_.size() >= kCountCacheCap) count_cache_.clear();
            count_cache_.emplace(std::string(chunk), count);
            total += count;
        });
        return total;
    }

    std::string detokenize(const std::vector<TokenId>& ids) const {
        std::string mapped;
        for (TokenId id : ids) {
            auto it = id_to_token_.find(id);
            if (it == id_to_token_.end())
                throw Error("unknown token id " + std::to_string(id));
            mapped += it->second;
        }
        // undo the byte-to-printable mapping
        const auto& rev = detail::codepoint_to_byte();
        std::string out;
        out.reserve(mapped.size());
        std::size_t i = 0;
        while (i < mapped.size()) {
            unsigned char c = static_cast<unsigned char>(mapped[i]);
            int cp;
            std::size_t len;
            if (c < 0x80) {
                cp = c;
                len = 1;
            } else if ((c & 0xE0) == 0xC0 && i + 1 < mapped.size()) {
                cp = ((c & 0x1F) << 6) | (static_cast<unsigned char>(mapped[i + 1]) & 0x3F);
                len = 2;
            } else if ((c & 0xF0) == 0xE0 && i + 2 < mapped.size()) {
                cp = ((c & 0x0F) << 12) |
                     ((static_cast<unsigned char>(mapped[i + 1]) & 0x3F) << 6) |
                     (static_cast<unsigned char>(mapped[i + 2]) & 0x3F);
                len = 3;
            } else {
                throw Error("token text is not valid mapped UTF-8");
            }
            auto it = rev.find(cp);
            if (it == rev.end()) throw Error("token code point outside byte alphabet");
            out.push_back(static_cast<char>(it->second));
            i += len;
        }
        return out;
    }

private:
    static constexpr std::size_t kCountCacheCap = 1u << 20;

    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const {
            return std::hash<std::string_view>{}(s);
        }
        std::size_t operator()(const std::string& s) const {
            return std::hash<std::string_view>{}(s);
        }
    };

    static bool is_ws_byte(unsigned char b) {
        return b == ' ' || b == '\t' || b == '\n' || b == '\r' || b == '\v' || b == '\f';
    }

    // True when no vocab token contains a whitespace byte after a
    // non-whitespace byte; this licenses the chunked tokenization above.
    bool no_token_puts_whitespace_after_nonspace() const {
        const auto& rev = detail::codepoint_to_byte();
        for (const auto& [tok, id] : vocab_) {
            bool prev_nonws = false;
            std::size_t i = 0;
            while (i < tok.size()) {
                unsigned char c = static_cast<unsigned char>(tok[i]);
                int cp;
                std::size_t len;
                if (c < 0x80) {
                    cp = c;
                    len = 1;
                } else if ((c & 0xE0) == 0xC0 && i + 1 < tok.size()) {
                    cp = ((c & 0x1F) << 6) | (static_cast<unsigned char>(tok[i + 1]) & 0x3F);
                    len = 2;
                } else if ((c & 0xF0) == 0xE0 && i + 2 < tok.size()) {
                    cp = ((c & 0x0F) << 12) |
                         ((static_cast<unsigned char>(tok[i + 1]) & 0x3F) << 6) |
                         (static_cast<unsigned char>(tok[i + 2]) & 0x3F);
                    len = 3;
                } else {
                    return false;
                }
                auto it = rev.find(cp);
                if (it == rev.end()) return false;
                bool ws = is_ws_byte(it->second);
                if (ws && prev_nonws) return false;
                prev_nonws = !ws;
                i += len;
            }
        }
        return true;
    }

    // Calls f(ptr, len) for each chunk; one whole-text call when chunk
    // splitting is not licensed by the vocabulary shape.
    template <typename F>
    void for_each_chunk(const std::string& text, F&& f) const {
        if (text.empty()) return;
        if (!chunk_split_safe_) {
            f(text.data(), text.size());
            return;
        }
        std::size_t start = 0;
        for (std::size_t i = 1; i < text.size(); ++i) {
            if (is_ws_byte(static_cast<unsigned char>(text[i])) &&
                !is_ws_byte(static_cast<unsigned char>(text[i - 1]))) {
                f(text.data() + start, i - start);
                start = i;
            }
        }
        f(text.data() + start, text.size() - start);
    }

    // Intern ids are dense indices into intern_strings_; both offset by one in
    // pack_pair so a packed key is never the PairMap empty marker.
    static std::uint64_t pack_pair(std::int32_t l, std::int32_t r) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(l) + 1) << 32) |
               (static_cast<std::uint32_t>(r) + 1);
    }

    std::int32_t intern(const std::string& sym) {
        auto it = sym_ids_.find(sym);
        if (it != sym_ids_.end()) return it->second;
        auto id = static_cast<std::int32_t>(intern_strings_.size());
        intern_strings_.push_back(sym);
        intern_vocab_.push_back(-1);
        intern_in_vocab_.push_back(0);
        sym_ids_.emplace(sym, id);
        return id;
    }

    std::vector<std::int32_t> tokenize_interned(const char* text, std::size_t n) const {
        if (n == 0) return {};

        struct Node {
            std::int32_t sym;
            std::int32_t prev, next;
            std::uint32_t version = 0;
            bool alive = true;
        };
        std::vector<Node> nodes;
        nodes.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            Node nd;
            nd.sym = byte_sym_[static_cast<unsigned char>(text[i])];
            nd.prev = static_cast<std::int32_t>(i) - 1;
            nd.next = (i + 1 < n) ? static_cast<std::int32_t>(i) + 1 : -1;
            nodes.push_back(nd);
        }

        struct Cand {
            std::int32_t rank;
            std::int32_t left;
            std::int32_t merged;
            std::uint32_t lver, rver;
            bool operator>(const Cand& other) const {
                if (rank != other.rank) return rank > other.rank;
                return left > other.left;
            }
        };
        std::vector<Cand> store;
        store.reserve(n);
        std::priority_queue<Cand, std::vector<Cand>, std::greater<Cand>> heap(
            std::greater<Cand>{}, std::move(store));

        auto push_pair = [&](std::int32_t li) {
            std::int32_t ri = nodes[li].next;
            if (ri < 0) return;
            std::uint64_t val;
            if (!pair_merge_.find(pack_pair(nodes[li].sym, nodes[ri].sym), val)) return;
            heap.push({static_cast<std::int32_t>(val >> 32),
                       li,
                       static_cast<std::int32_t>(val & 0xFFFFFFFFu),
                       nodes[li].version,
                       nodes[ri].version});
        };
        for (std::size_t i = 0; i + 1 < n; ++i) push_pair(static_cast<std::int32_t>(i));

        while (!heap.empty()) {
            Cand c = heap.top();
            heap.pop();
            Node& left = nodes[c.left];
            if (!left.alive || left.version != c.lver) continue;
            std::int32_t ri = left.next;
            if (ri < 0) continue;
            Node& right = nodes[ri];
            if (right.version != c.rver) continue;

            left.sym = c.merged;
            ++left.version;
            right.alive = false;
            left.next = right.next;
            if (right.next >= 0) nodes[right.next].prev = c.left;

            if (left.prev >= 0) push_pair(left.prev);
            push_pair(c.left);
        }

        std::vector<std::int32_t> out;
        for (std::int32_t i = 0; i >= 0 && i < static_cast<std::int32_t>(nodes.size());
             i = nodes[i].next) {
            if (i == 0 && !nodes[0].alive) break;
            out.push_back(nodes[i].sym);
        }
        return out;
    }

    std::unordered_map<std::string, TokenId> vocab_;
    std::vector<std::pair<std::string, std::string>> merges_;
    std::unordered_map<TokenId, std::string> id_to_token_;
    std::unordered_map<std::string, std::int32_t> sym_ids_;
    std::vector<std::string> intern_strings_;
    std::vector<TokenId> intern_vocab_;
    std::vector<char> intern_in_vocab_;
    detail::PairMap pair_merge_;
    mutable std::unordered_map<std::string, std::int64_t, StringHash, std::equal_to<>>
        count_cache_;
    std::int32_t byte_sym_[256] = {};
    bool byte_fallback_ = false;
    bool chunk_split_safe_ = false;
};

// Exact BPE tokenizer or a chars/4 estimator behind one interface.
class Tokenizer {
public:
    static Tokenizer heuristic() {
        Tokenizer t;
        t.heuristic_ = true;
        return t;
    }
    static Tokenizer exact(BpeTokenizer bpe) {
        Tokenizer t;
        t.bpe_ = std::move(bpe);
        return t;
    }

    bool is_heuristic() const { return heuristic_; }
    const BpeTokenizer& bpe() const {
        if (heuristic_) throw HeuristicTokenizerForbidden("exact tokenizer required");
        return bpe_;
    }

    std::vector<TokenId> tokenize(const std::string& text) const {
        if (heuristic_)
            throw HeuristicTokenizerForbidden("token identities unavailable in heuristic mode");
        return bpe_.tokenize(text);
    }

    std::string detokenize(const std::vector<TokenId>& ids) const {
        if (heuristic_)
            throw HeuristicTokenizerForbidden("token identities unavailable in heuristic mode");
        return bpe_.detokenize(ids);
    }

    std::int64_t count_tokens(const std::string& text) const {
        if (heuristic_)
            return static_cast<std::int64_t>((text.size() + 3) / 4);
        return bpe_.count_tokens(text);
    }

private:
    bool heuristic_ = false;
    BpeTokenizer bpe_;
};

// vocab: JSON object token -> id. merges: one "left right" pair per line,
// '#'-prefixed lines and blanks skipped, rank = order of appearance.
inline Tokenizer load_tokenizer_from_strings(const std::string& vocab_json,
                                             const std::string& merges_text) {
    nlohmann::json vj;
    try {
        vj = nlohmann::json::parse(vocab_json);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedJson(std::string("vocab file: ") + e.what());
    }
    if (!vj.is_object()) throw MalformedJson("vocab file: expected a JSON object");
    std::unordered_map<std::string, TokenId> vocab;
    vocab.reserve(vj.size());
    for (auto it = vj.begin(); it != vj.end(); ++it) {
        if (!it.value().is_number_integer())
            throw MalformedJson("vocab file: id for '" + it.key() + "' is not an integer");
        vocab.emplace(it.key(), it.value().get<TokenId>());
    }

    std::vector<std::pair<std::string, std::string>> merges;
    std::istringstream in(merges_text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto sp = line.find(' ');
        if (sp == std::string::npos || sp == 0 || sp + 1 >= line.size() ||
            line.find(' ', sp + 1) != std::string::npos)
            throw Error("merges file: malformed line " + std::to_string(line_no));
        merges.emplace_back(line.substr(0, sp), line.substr(sp + 1));
    }
    return Tokenizer::exact(BpeTokenizer(std::move(vocab), std::move(merges)));
}

inline std::string read_file_or_throw(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline Tokenizer load_tokenizer(const std::string& vocab_path, const std::string& merges_path) {
    return load_tokenizer_from_strings(read_file_or_throw(vocab_path),
                                       read_file_or_throw(merges_path));
}

// First candidate pair (s1, s2) where s1 is strictly shorter in code points
// yet takes strictly more tokens; BPE admits such pairs because token count
// is not monotone in string length.
inline std::optional<std::pair<std::string, std::string>> find_nonmonotonic_witness(
    const Tokenizer& tok,
    const std::vector<std::pair<std::string, std::string>>& candidates) {
    for (const auto& [s1, s2] : candidates) {
        if (utf8_length(s1) < utf8_length(s2) &&
            tok.count_tokens(s1) > tok.count_tokens(s2))
            return std::make_pair(s1, s2);
    }
    return std::nullopt;
}

}  // namespace tscg
