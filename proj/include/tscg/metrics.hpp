#pragma once
// Offline evaluation on recorded transcripts: tool-selection accuracy,
// parameter micro-F1 and the 0.6/0.4 composite, accuracy-retained ratio,
// format/compression decomposition, an OLS gap predictor, the filler-removal
// attention uplift factor, and the statistics kit (bootstrap percentile CI,
// exact McNemar, Holm-Bonferroni). No model APIs anywhere.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tscg/errors.hpp"
#include "tscg/schema.hpp"
#include "tscg/util.hpp"

namespace tscg {

struct ToolCall {
    std::string tool;
    std::vector<std::pair<std::string, std::string>> params;  // key, normalized value
};

struct TranscriptRecord {
    std::string task_id;
    std::string condition;
    std::int64_t seed = 0;
    std::vector<ToolCall> predicted;
    std::vector<ToolCall> gold;
};

struct Transcript {
    std::vector<TranscriptRecord> records;
};

namespace detail {

inline std::string trim_copy(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space_char(s[b])) ++b;
    while (e > b && is_space_char(s[e - 1])) --e;
    return s.substr(b, e - b);
}

// Values compare after normalization: strings trimmed (case preserved),
// numbers canonically formatted, everything else in JSON spelling.
inline std::string normalize_param_value(const ojson& v) {
    if (v.is_string()) return trim_copy(v.get<std::string>());
    if (v.is_number()) return canonical_number(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_null()) return "null";
    return v.dump();
}

inline std::vector<ToolCall> parse_calls(const ojson& arr, const char* field) {
    if (!arr.is_array())
        throw MalformedTranscript(std::string(field) + " must be an array of tool calls");
    std::vector<ToolCall> calls;
    for (const auto& item : arr) {
        if (!item.is_object() || !item.contains("tool") || !item.at("tool").is_string())
            throw MalformedTranscript(std::string(field) + " entries need a string 'tool'");
        ToolCall call;
        call.tool = item.at("tool").get<std::string>();
        if (item.contains("params")) {
            if (!item.at("params").is_object())
                throw MalformedTranscript("'params' must be an object");
            for (const auto& [k, v] : item.at("params").items())
                call.params.emplace_back(k, normalize_param_value(v));
        }
        calls.push_back(std::move(call));
    }
    return calls;
}

using ParamTriple = std::tuple<std::string, std::string, std::string>;

inline std::map<ParamTriple, int> param_triples(const std::vector<ToolCall>& calls) {
    std::map<ParamTriple, int> counts;
    for (const auto& c : calls)
        for (const auto& [k, v] : c.params) ++counts[{c.tool, k, v}];
    return counts;
}

struct PairCounts {
    std::int64_t tp = 0, predicted = 0, gold = 0;
};

inline PairCounts count_pairs(const TranscriptRecord& r) {
    auto pred = param_triples(r.predicted);
    auto gold = param_triples(r.gold);
    PairCounts c;
    for (const auto& [t, n] : pred) c.predicted += n;
    for (const auto& [t, n] : gold) c.gold += n;
    for (const auto& [t, n] : gold) {
        auto it = pred.find(t);
        if (it != pred.end()) c.tp += std::min(n, it->second);
    }
    return c;
}

inline double f1_from_counts(const PairCounts& c) {
    if (c.predicted == 0 && c.gold == 0) return 1.0;  // vacuously perfect
    if (c.tp == 0) return 0.0;
    double precision = static_cast<double>(c.tp) / static_cast<double>(c.predicted);
    double recall = static_cast<double>(c.tp) / static_cast<double>(c.gold);
    return 2.0 * precision * recall / (precision + recall);
}

inline bool tool_sets_equal(const TranscriptRecord& r) {
    std::set<std::string> pred, gold;
    for (const auto& c : r.predicted) pred.insert(c.tool);
    for (const auto& c : r.gold) gold.insert(c.tool);
    return pred == gold;
}

}  // namespace detail

inline Transcript parse_transcript(const std::string& jsonl_text) {
    Transcript t;
    std::set<std::tuple<std::string, std::string, std::int64_t>> keys;
    int line_no = 0;
    for (const std::string& line : split_lines(jsonl_text)) {
        ++line_no;
        if (detail::trim_copy(line).empty()) continue;
        ojson doc;
        try {
            doc = ojson::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw MalformedTranscript("line " + std::to_string(line_no) + ": " + e.what());
        }
        try {
            TranscriptRecord r;
            r.task_id = doc.at("task_id").get<std::string>();
            r.condition = doc.at("condition").get<std::string>();
            r.seed = doc.at("seed").get<std::int64_t>();
            r.predicted = detail::parse_calls(doc.at("predicted"), "predicted");
            r.gold = detail::parse_calls(doc.at("gold"), "gold");
            if (!keys.insert({r.task_id, r.condition, r.seed}).second)
                throw MalformedTranscript("line " + std::to_string(line_no) +
                                          ": duplicate (task_id, condition, seed)");
            t.records.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw MalformedTranscript("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return t;
}

struct ScoreResult {
    double tsa = 0.0;
    double pf1 = 0.0;
    double overall = 0.0;  // 0.6 * tsa + 0.4 * pf1
};

inline ScoreResult score_transcript(const Transcript& t, const std::string& condition,
                                    bool macro_pf1 = false) {
    if (t.records.empty()) throw EmptyTranscript("transcript has no records");
    std::vector<const TranscriptRecord*> records;
    for (const auto& r : t.records)
        if (r.condition == condition) records.push_back(&r);
    if (records.empty()) throw UnknownCondition("no records for condition: " + condition);

    std::int64_t exact = 0;
    detail::PairCounts pooled;
    double f1_sum = 0.0;
    for (const auto* r : records) {
        if (detail::tool_sets_equal(*r)) ++exact;
        detail::PairCounts c = detail::count_pairs(*r);
        pooled.tp += c.tp;
        pooled.predicted += c.predicted;
        pooled.gold += c.gold;
        f1_sum += detail::f1_from_counts(c);
    }
    ScoreResult s;
    s.tsa = static_cast<double>(exact) / static_cast<double>(records.size());
    s.pf1 = macro_pf1 ? f1_sum / static_cast<double>(records.size())
                      : detail::f1_from_counts(pooled);
    s.overall = 0.6 * s.tsa + 0.4 * s.pf1;
    return s;
}

inline std::vector<std::string> transcript_conditions(const Transcript& t) {
    std::set<std::string> seen;
    std::vector<std::string> out;
    for (const auto& r : t.records)
        if (seen.insert(r.condition).second) out.push_back(r.condition);
    return out;
}

inline double arr(double tscg_acc, double natural_fc_acc) {
    if (natural_fc_acc <= 0.0)
        throw DivisionByZeroBaseline("natural function-calling baseline must be positive");
    return tscg_acc / natural_fc_acc;
}

// Splits the compiled-vs-native accuracy gap into the JSON-to-text share and
// the text-to-compressed share; the two always sum to tscg - natural_fc.
inline std::pair<double, double> decompose(double natural_fc, double natural_text, double tscg) {
    return {natural_text - natural_fc, tscg - natural_text};
}

struct GapPredictor {
    double alpha_slope = 0.0;
    double beta_intercept = 0.0;
    double r_squared = 0.0;
};

inline GapPredictor fit_gap_predictor(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw DegenerateDesign("need at least 3 points, got " + std::to_string(points.size()));
    double n = static_cast<double>(points.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& [x, y] : points) {
        mean_x += x;
        mean_y += y;
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    if (sxx == 0.0) throw DegenerateDesign("all predictor values are equal");
    GapPredictor fit;
    fit.alpha_slope = sxy / sxx;
    fit.beta_intercept = mean_y - fit.alpha_slope * mean_x;
    double ss_res = 0.0;
    for (const auto& [x, y] : points) {
        double e = y - (fit.alpha_slope * x + fit.beta_intercept);
        ss_res += e * e;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.r_squared = std::min(1.0, std::max(0.0, fit.r_squared));
    return fit;
}

// Removing k filler tokens from an n-token prompt concentrates attention on
// the survivors by n/(n-k).
inline double sdm_attention_uplift(std::int64_t n, std::int64_t k) {
    if (n <= 0 || k < 0 || k >= n)
        throw InvalidLengths("need 0 <= fillers-removed < prompt-length, got n=" +
                             std::to_string(n) + " k=" + std::to_string(k));
    return static_cast<double>(n) / static_cast<double>(n - k);
}

// Percentile bootstrap over resample means. The engine draws indices via
// modulo so results are identical across standard library implementations.
inline std::pair<double, double> bootstrap_ci(const std::vector<double>& samples,
                                              int resamples = 1000, std::uint64_t seed = 42,
                                              double level = 0.95) {
    if (samples.empty()) throw EmptySamples("bootstrap needs at least one sample");
    std::mt19937_64 eng(seed);
    std::size_t n = samples.size();
    std::vector<double> means;
    means.reserve(static_cast<std::size_t>(resamples));
    for (int r = 0; r < resamples; ++r) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += samples[eng() % n];
        means.push_back(sum / static_cast<double>(n));
    }
    std::sort(means.begin(), means.end());
    auto percentile = [&](double q) {
        double pos = q * static_cast<double>(means.size() - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        double frac = pos - static_cast<double>(lo);
        if (lo + 1 >= means.size()) return means.back();
        return means[lo] + (means[lo + 1] - means[lo]) * frac;
    };
    double tail = (1.0 - level) / 2.0;
    return {percentile(tail), percentile(1.0 - tail)};
}

// Exact two-sided McNemar test on discordant pair counts: twice the binomial
// tail P(X <= min(b,c)) at p = 1/2, capped at 1.
inline double mcnemar(std::int64_t b, std::int64_t c) {
    if (b < 0 || c < 0) throw Error("discordant counts must be non-negative");
    std::int64_t n = b + c;
    if (n == 0) return 1.0;
    std::int64_t m = std::min(b, c);
    double log_half_n = static_cast<double>(n) * std::log(0.5);
    double tail = 0.0;
    for (std::int64_t i = 0; i <= m; ++i) {
        double log_choose = std::lgamma(static_cast<double>(n) + 1.0) -
                            std::lgamma(static_cast<double>(i) + 1.0) -
                            std::lgamma(static_cast<double>(n - i) + 1.0);
        tail += std::exp(log_choose + log_half_n);
    }
    return std::min(1.0, 2.0 * tail);
}

struct HolmEntry {
    double adjusted_p = 0.0;
    bool significant = false;
};

// Step-down Holm-Bonferroni: sort ascending, scale by (m - rank), enforce
// monotonicity, cap at 1; entries return in the input order.
inline std::vector<HolmEntry> holm_bonferroni(const std::vector<double>& p_values,
                                              double alpha = 0.05) {
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0))
            throw OutOfRangeP("p-value outside [0, 1]: " + canonical_number(p));
    std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::vector<HolmEntry> out(m);
    double running = 0.0;
    bool rejected_so_far = true;
    for (std::size_t rank = 0; rank < m; ++rank) {
        std::size_t idx = order[rank];
        double adjusted = static_cast<double>(m - rank) * p_values[idx];
        running = std::max(running, adjusted);
        double clamped = std::min(1.0, running);
        rejected_so_far = rejected_so_far && clamped <= alpha;
        out[idx].adjusted_p = clamped;
        out[idx].significant = rejected_so_far;
    }
    return out;
}

}  // namespace tscg
