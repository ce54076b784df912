#pragma once
// Fixed-order pass composition: Parse, SDM, TAS, DRO, CFL, CFO, CAS, SAD-F,
// CCP, Emit. Profiles pick which passes run (with tool-count auto-disable
// rules and a per-model-family guard table); every compile produces a
// CompressionReport with per-pass token accounting and a savings bound.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tscg/errors.hpp"
#include "tscg/ir.hpp"
#include "tscg/lexicon.hpp"
#include "tscg/operators.hpp"
#include "tscg/schema.hpp"
#include "tscg/tokenizer.hpp"
#include "tscg/util.hpp"

namespace tscg {

enum class Op { SDM, TAS, DRO, CFL, CFO, CAS, SADF, CCP };

inline constexpr std::array<Op, 8> kPipelineOrder = {Op::SDM, Op::TAS, Op::DRO, Op::CFL,
                                                     Op::CFO, Op::CAS, Op::SADF, Op::CCP};

inline const char* op_name(Op op) {
    switch (op) {
        case Op::SDM: return "SDM";
        case Op::TAS: return "TAS";
        case Op::DRO: return "DRO";
        case Op::CFL: return "CFL";
        case Op::CFO: return "CFO";
        case Op::CAS: return "CAS";
        case Op::SADF: return "SAD-F";
        case Op::CCP: return "CCP";
    }
    return "?";
}

inline Op op_from_name(const std::string& name) {
    std::string n = to_lower_ascii(name);
    if (n == "sdm") return Op::SDM;
    if (n == "tas") return Op::TAS;
    if (n == "dro") return Op::DRO;
    if (n == "cfl") return Op::CFL;
    if (n == "cfo") return Op::CFO;
    if (n == "cas") return Op::CAS;
    if (n == "sad-f" || n == "sadf" || n == "sad_f") return Op::SADF;
    if (n == "ccp") return Op::CCP;
    throw Error("unknown operator name: " + name);
}

inline bool is_token_reducing(Op op) {
    return op == Op::SDM || op == Op::TAS || op == Op::DRO || op == Op::CFL;
}
inline bool is_structure_reordering(Op op) { return op == Op::CAS || op == Op::CFO; }
inline bool is_token_expanding(Op op) { return op == Op::SADF || op == Op::CCP; }

enum class Profile { conservative, balanced, aggressive, adaptive };

inline const char* profile_tag(Profile p) {
    switch (p) {
        case Profile::conservative: return "conservative";
        case Profile::balanced: return "balanced";
        case Profile::aggressive: return "aggressive";
        case Profile::adaptive: return "auto";
    }
    return "?";
}

inline Profile profile_from_tag(const std::string& tag) {
    std::string t = to_lower_ascii(tag);
    if (t == "conservative") return Profile::conservative;
    if (t == "balanced") return Profile::balanced;
    if (t == "aggressive") return Profile::aggressive;
    if (t == "auto" || t == "adaptive") return Profile::adaptive;
    throw Error("unknown profile: " + tag);
}

struct Thresholds {
    int t_low = 20;
    int t_mid = 30;
    int t_high = 40;
};

// Guard table: whether a model family reliably echoes duplicated anchors
// back (gates the aggressive profile's CFL/SAD-F), plus per-family passes
// known to hurt and therefore force-disabled.
struct ModelFamilyRule {
    std::string family;  // prefix, matched case-insensitively
    bool echo_back_safe = false;
    std::vector<Op> disabled_ops;
};

class ModelFamilyTable {
  public:
    ModelFamilyTable() = default;
    explicit ModelFamilyTable(std::vector<ModelFamilyRule> rules) : rules_(std::move(rules)) {}

    const std::vector<ModelFamilyRule>& rules() const { return rules_; }

    // Longest matching prefix wins ("gpt-5.2" beats "gpt").
    const ModelFamilyRule* match(const std::string& model_family) const {
        std::string tag = to_lower_ascii(model_family);
        const ModelFamilyRule* best = nullptr;
        for (const auto& r : rules_) {
            std::string fam = to_lower_ascii(r.family);
            if (tag.compare(0, fam.size(), fam) != 0) continue;
            if (!best || fam.size() > to_lower_ascii(best->family).size()) best = &r;
        }
        return best;
    }

    static ModelFamilyTable parse(const std::string& json_text) {
        ojson doc;
        try {
            doc = ojson::parse(json_text);
        } catch (const nlohmann::json::exception& e) {
            throw MalformedJson(std::string("model family table: ") + e.what());
        }
        if (!doc.is_array()) throw MalformedJson("model family table: expected a JSON array");
        std::vector<ModelFamilyRule> rules;
        for (const auto& item : doc) {
            ModelFamilyRule r;
            r.family = item.at("family").get<std::string>();
            r.echo_back_safe = item.at("echo_back_safe").get<bool>();
            if (item.contains("disabled_ops"))
                for (const auto& o : item.at("disabled_ops"))
                    r.disabled_ops.push_back(op_from_name(o.get<std::string>()));
            rules.push_back(std::move(r));
        }
        return ModelFamilyTable(std::move(rules));
    }

    static ModelFamilyTable load(const std::string& path) {
        return parse(read_file_or_throw(path));
    }

    static const ModelFamilyTable& builtin() {
        static const ModelFamilyTable table{std::vector<ModelFamilyRule>{
            {"claude", true, {}},
            {"opus", true, {}},
            {"sonnet", true, {}},
            {"gpt-5.2", false, {Op::CFO}},
            {"gpt", false, {}},
            {"gemini", false, {}},
            {"llama", false, {}},
            {"mistral", false, {}},
        }};
        return table;
    }

  private:
    std::vector<ModelFamilyRule> rules_;
};

struct PipelineConfig {
    Profile profile = Profile::balanced;
    std::string model_family;
    int sad_budget = 0;
    int ccp_k = 3;
    double fragility_alpha = 0.5;
    Thresholds thresholds;
    std::string constraint_text;
    std::map<Op, bool> op_overrides;  // final say: true forces on, false forces off
    FillerLexicon lexicon = FillerLexicon::builtin();
    DelimiterTable delimiters = DelimiterTable::builtin();
    ModelFamilyTable families = ModelFamilyTable::builtin();
};

// Profile resolution. conservative: filler removal only. balanced: all but
// constraint fronting and anchor duplication, dropping the two ordering
// passes (CFL, CFO) at >=30 tools. aggressive: everything, unless the model
// family is not echo-back safe, which drops CFL and SAD-F. auto: conservative
// at <=20 or >40 tools, otherwise the balanced set minus CFL/CFO. Family
// disabled_ops apply afterwards in every profile.
inline std::set<Op> resolve_profile(Profile profile, int tool_count,
                                    const std::string& model_family,
                                    const Thresholds& thresholds = {},
                                    const ModelFamilyTable& families = ModelFamilyTable::builtin()) {
    if (tool_count < 0) throw Error("tool_count must be non-negative");
    const std::set<Op> conservative_set = {Op::SDM};
    std::set<Op> balanced_set = {Op::SDM, Op::CAS, Op::CFO, Op::DRO, Op::TAS, Op::CCP};
    if (tool_count >= thresholds.t_mid) {
        balanced_set.erase(Op::CFL);
        balanced_set.erase(Op::CFO);
    }

    std::set<Op> enabled;
    switch (profile) {
        case Profile::conservative:
            enabled = conservative_set;
            break;
        case Profile::balanced:
            enabled = balanced_set;
            break;
        case Profile::aggressive: {
            enabled = {Op::SDM, Op::TAS, Op::DRO, Op::CFL, Op::CFO, Op::CAS, Op::SADF, Op::CCP};
            const ModelFamilyRule* rule = families.match(model_family);
            if (!rule || !rule->echo_back_safe) {
                enabled.erase(Op::CFL);
                enabled.erase(Op::SADF);
            }
            break;
        }
        case Profile::adaptive: {
            if (tool_count <= thresholds.t_low || tool_count > thresholds.t_high) {
                enabled = conservative_set;
            } else {
                enabled = balanced_set;
                enabled.erase(Op::CFL);
                enabled.erase(Op::CFO);
            }
            break;
        }
    }
    if (const ModelFamilyRule* rule = families.match(model_family))
        for (Op op : rule->disabled_ops) enabled.erase(op);
    return enabled;
}

struct OpReport {
    Op op = Op::SDM;
    bool enabled = false;
    // Emitted-token change across the pass: positive means tokens removed,
    // negative means tokens added.
    std::int64_t tokens_removed_or_added = 0;
    // f_i: tokens inside the spans this pass touched, over tokens_before.
    double affected_fraction = 0.0;
    // r_i: tokens removed over tokens inside the touched spans.
    double reduction_factor = 0.0;
};

struct CompressionReport {
    std::int64_t tokens_before = 0;
    std::int64_t tokens_after = 0;
    // Token change from rendering the untouched IR in the compiled-text
    // grammar instead of source JSON; with the per-pass deltas it accounts
    // for the whole before/after difference:
    // format_delta + sum(per_op deltas) == tokens_before - tokens_after.
    std::int64_t format_delta = 0;
    double savings = 0.0;    // 1 - after/before, 0 when before == 0
    double bound_rhs = 0.0;  // sum of r_i * f_i over the token-reducing passes
    std::string determinism_hash;
    std::vector<std::string> ops_applied;
    std::vector<OpReport> per_op;
    int sad_budget = 0;
    bool ccp_enabled = false;
    bool heuristic_tokenizer = false;
};

struct CompileResult {
    std::string text;
    CompressionReport report;
};

namespace detail {

struct TouchedSpans {
    std::int64_t touched_tokens = 0;
};

// Span bookkeeping by atom identity: removed or rewritten atoms count their
// old text, added atoms their new text. Pure moves count nothing.
inline TouchedSpans diff_touched(const PromptIR& before, const PromptIR& after,
                                 const Tokenizer& tok) {
    std::map<int, const std::string*> old_text;
    for (const auto& a : before.atoms) old_text[a.id] = &a.text;
    TouchedSpans spans;
    std::set<int> seen;
    for (const auto& a : after.atoms) {
        seen.insert(a.id);
        auto it = old_text.find(a.id);
        if (it == old_text.end())
            spans.touched_tokens += tok.count_tokens(a.text);
        else if (*it->second != a.text)
            spans.touched_tokens += tok.count_tokens(*it->second);
    }
    for (const auto& a : before.atoms)
        if (!seen.count(a.id)) spans.touched_tokens += tok.count_tokens(a.text);
    return spans;
}

inline PromptIR run_op(Op op, const PromptIR& ir, const PipelineConfig& cfg,
                       const Tokenizer& tok) {
    std::vector<double> scores;
    if ((op == Op::CAS || op == Op::SADF || op == Op::CCP) && !ir.atoms.empty())
        scores = score_fragility(ir, cfg.fragility_alpha);
    switch (op) {
        case Op::SDM: return sdm(ir, cfg.lexicon);
        case Op::TAS: return tas(ir, cfg.delimiters, tok);
        case Op::DRO: return dro(ir, cfg.delimiters);
        case Op::CFL: return cfl(ir);
        case Op::CFO: return cfo(ir);
        case Op::CAS: return cas(ir, scores);
        case Op::SADF: return sad_f(ir, scores, cfg.sad_budget, tok);
        case Op::CCP: return ccp(ir, scores, cfg.ccp_k);
    }
    return ir;
}

}  // namespace detail

inline std::set<Op> enabled_ops_for(const ToolCatalog& cat, const PipelineConfig& cfg) {
    std::set<Op> enabled = resolve_profile(cfg.profile, static_cast<int>(cat.tools.size()),
                                           cfg.model_family, cfg.thresholds, cfg.families);
    for (const auto& [op, on] : cfg.op_overrides) {
        if (on)
            enabled.insert(op);
        else
            enabled.erase(op);
    }
    return enabled;
}

inline CompileResult compile(const ToolCatalog& cat, const PipelineConfig& cfg,
                             const Tokenizer& tok) {
    std::set<Op> enabled = enabled_ops_for(cat, cfg);
    if (tok.is_heuristic() && (enabled.count(Op::TAS) || enabled.count(Op::SADF)))
        throw HeuristicTokenizerForbidden(
            "TAS and SAD-F demand exact token counts; load a merge file or disable them");

    CompressionReport report;
    report.sad_budget = cfg.sad_budget;
    report.ccp_enabled = enabled.count(Op::CCP) > 0;
    report.heuristic_tokenizer = tok.is_heuristic();

    std::string base_text = cat.source_text;
    if (base_text.empty() && !cat.tools.empty())
        base_text = catalog_to_json(cat, cat.source_dialect).dump();
    report.tokens_before = tok.count_tokens(base_text);

    PromptIR ir = lower_to_ir(cat, cfg.lexicon, cfg.delimiters, cfg.constraint_text);
    std::int64_t current_tokens = tok.count_tokens(emit(ir));
    report.format_delta = report.tokens_before - current_tokens;

    for (Op op : kPipelineOrder) {
        OpReport entry;
        entry.op = op;
        entry.enabled = enabled.count(op) > 0;
        if (entry.enabled) {
            report.ops_applied.push_back(op_name(op));
            PromptIR next = detail::run_op(op, ir, cfg, tok);
            std::int64_t next_tokens = tok.count_tokens(emit(next));
            entry.tokens_removed_or_added = current_tokens - next_tokens;
            auto spans = detail::diff_touched(ir, next, tok);
            if (spans.touched_tokens > 0) {
                entry.reduction_factor = static_cast<double>(entry.tokens_removed_or_added) /
                                         static_cast<double>(spans.touched_tokens);
                if (report.tokens_before > 0)
                    entry.affected_fraction = static_cast<double>(spans.touched_tokens) /
                                              static_cast<double>(report.tokens_before);
            }
            ir = std::move(next);
            current_tokens = next_tokens;
        }
        report.per_op.push_back(entry);
    }

    CompileResult result;
    result.text = emit(ir);
    report.tokens_after = tok.count_tokens(result.text);
    if (report.tokens_before > 0)
        report.savings = 1.0 - static_cast<double>(report.tokens_after) /
                                   static_cast<double>(report.tokens_before);
    for (const auto& entry : report.per_op)
        if (entry.enabled && is_token_reducing(entry.op))
            report.bound_rhs += entry.reduction_factor * entry.affected_fraction;
    report.determinism_hash = fnv1a64_hex(result.text);
    result.report = std::move(report);
    return result;
}

// Savings floor check: valid only for compiles that ran without the
// expanding passes (anchor-duplication budget 0, no closure recap).
inline bool check_bound(const CompressionReport& report) {
    if (report.ccp_enabled)
        throw BoundPreconditionViolated("bound check requires CCP disabled");
    if (report.sad_budget > 0)
        throw BoundPreconditionViolated("bound check requires anchor-duplication budget 0");
    return report.savings + 1e-9 >= report.bound_rhs;
}

inline nlohmann::json report_to_json(const CompressionReport& report) {
    nlohmann::json doc;  // plain json: keys serialize alphabetically
    doc["tokens_before"] = report.tokens_before;
    doc["tokens_after"] = report.tokens_after;
    doc["format_delta"] = report.format_delta;
    doc["savings"] = report.savings;
    doc["bound_rhs"] = report.bound_rhs;
    doc["determinism_hash"] = report.determinism_hash;
    doc["ops_applied"] = report.ops_applied;
    doc["sad_budget"] = report.sad_budget;
    doc["ccp_enabled"] = report.ccp_enabled;
    doc["heuristic_tokenizer"] = report.heuristic_tokenizer;
    doc["per_op"] = nlohmann::json::array();
    for (const auto& entry : report.per_op) {
        nlohmann::json e;
        e["op"] = op_name(entry.op);
        e["enabled"] = entry.enabled;
        e["tokens_removed_or_added"] = entry.tokens_removed_or_added;
        e["affected_fraction"] = entry.affected_fraction;
        e["reduction_factor"] = entry.reduction_factor;
        doc["per_op"].push_back(e);
    }
    return doc;
}

}  // namespace tscg
