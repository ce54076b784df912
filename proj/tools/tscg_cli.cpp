// Command-line front end: compile a tool catalog to compact text, verify a
// compiled text against its source catalog, or score recorded transcripts.
// Exit codes -- compile: 0 ok, 2 input/schema error, 3 bound-check failure;
// verify: 0 ok, 1 missing atoms, 2 parse error; score: 0 ok, 2 bad transcript.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tscg/tscg.hpp"

namespace {

std::string data_dir() {
    if (const char* env = std::getenv("TSCG_DATA_DIR")) return env;
    return TSCG_DATA_DIR;
}

bool file_exists(const std::string& path) {
    std::ifstream f(path);
    return f.good();
}

tscg::Tokenizer resolve_tokenizer(const std::string& spec) {
    if (spec == "heuristic") return tscg::Tokenizer::heuristic();
    if (spec == "gpt2") {
        std::string dir = data_dir() + "/tokenizer/gpt2";
        return tscg::load_tokenizer(dir + "/vocab.json", dir + "/merges.txt");
    }
    if (file_exists(spec + "/merges.txt"))
        return tscg::load_tokenizer(spec + "/vocab.json", spec + "/merges.txt");
    // a merges file path; vocab.json expected beside it
    std::string dir = ".";
    std::size_t slash = spec.find_last_of('/');
    if (slash != std::string::npos) dir = spec.substr(0, slash);
    return tscg::load_tokenizer(dir + "/vocab.json", spec);
}

tscg::Dialect resolve_dialect(const std::string& tag) {
    if (tag == "anthropic") return tscg::Dialect::anthropic_tool_use;
    return tscg::dialect_from_tag(tag);
}

std::string percent(double fraction) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(1) << fraction * 100.0;
    return out.str();
}

std::string fixed_digits(double v, int digits) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << v;
    return out.str();
}

struct ConfigDefaults {
    std::string profile = "balanced";
    std::string tokenizer = "gpt2";
    std::string model_family;
    int sad_budget = 0;
    int ccp_k = 3;
    double alpha = 0.5;
};

// TSCG_CONFIG points at a JSON object of defaults; explicit flags win.
ConfigDefaults load_config_defaults() {
    ConfigDefaults d;
    const char* path = std::getenv("TSCG_CONFIG");
    if (!path) return d;
    tscg::ojson doc;
    try {
        doc = tscg::ojson::parse(tscg::read_file_or_throw(path));
    } catch (const std::exception& e) {
        throw tscg::Error(std::string("TSCG_CONFIG: ") + e.what());
    }
    if (doc.contains("profile")) d.profile = doc.at("profile").get<std::string>();
    if (doc.contains("tokenizer")) d.tokenizer = doc.at("tokenizer").get<std::string>();
    if (doc.contains("model_family")) d.model_family = doc.at("model_family").get<std::string>();
    if (doc.contains("sad_budget")) d.sad_budget = doc.at("sad_budget").get<int>();
    if (doc.contains("ccp_k")) d.ccp_k = doc.at("ccp_k").get<int>();
    if (doc.contains("alpha")) d.alpha = doc.at("alpha").get<double>();
    return d;
}

int run_compile(const std::string& in_path, const std::string& dialect_tag,
                const ConfigDefaults& cfg_in, const std::string& constraint,
                const std::vector<std::string>& enable, const std::vector<std::string>& disable,
                const std::string& report_path, const std::string& out_path, bool check) {
    tscg::ToolCatalog cat;
    tscg::Tokenizer tok = tscg::Tokenizer::heuristic();
    tscg::PipelineConfig cfg;
    try {
        std::string text = tscg::read_file_or_throw(in_path);
        cat = tscg::parse_catalog(text, resolve_dialect(dialect_tag));
        tok = resolve_tokenizer(cfg_in.tokenizer);
        cfg.profile = tscg::profile_from_tag(cfg_in.profile);
        cfg.model_family = cfg_in.model_family;
        cfg.sad_budget = cfg_in.sad_budget;
        cfg.ccp_k = cfg_in.ccp_k;
        cfg.fragility_alpha = cfg_in.alpha;
        cfg.constraint_text = constraint;
        for (const auto& name : enable) cfg.op_overrides[tscg::op_from_name(name)] = true;
        for (const auto& name : disable) cfg.op_overrides[tscg::op_from_name(name)] = false;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        tscg::CompileResult result = tscg::compile(cat, cfg, tok);
        if (!report_path.empty()) {
            std::ofstream rf(report_path);
            rf << tscg::report_to_json(result.report).dump(2) << "\n";
        }
        if (!out_path.empty()) {
            std::ofstream of(out_path);
            of << result.text;
        } else {
            std::cout << result.text << "\n";
        }
        if (check) {
            bool ok = tscg::check_bound(result.report);
            if (!ok) {
                std::cerr << "bound check failed: savings " << result.report.savings
                          << " < bound " << result.report.bound_rhs << "\n";
                return 3;
            }
            std::cerr << "bound check ok: savings " << result.report.savings << " >= bound "
                      << result.report.bound_rhs << "\n";
        }
        return 0;
    } catch (const tscg::BoundPreconditionViolated& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int run_verify(const std::string& original_path, const std::string& dialect_tag,
               const std::string& compiled_path) {
    try {
        tscg::ToolCatalog original = tscg::parse_catalog(tscg::read_file_or_throw(original_path),
                                                         resolve_dialect(dialect_tag));
        std::string compiled = tscg::read_file_or_throw(compiled_path);
        tscg::SupersetVerdict verdict = tscg::verify_superset(original, compiled);
        if (verdict.ok) {
            std::cerr << "ok: all structural atoms preserved\n";
            return 0;
        }
        for (const auto& atom : verdict.missing_structural)
            std::cout << "missing " << atom.to_string() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int run_score(const std::string& transcript_path, bool macro, int resamples,
              std::uint64_t seed) {
    try {
        tscg::Transcript t = tscg::parse_transcript(tscg::read_file_or_throw(transcript_path));
        if (t.records.empty()) {
            std::cerr << "error: transcript has no records\n";
            return 2;
        }
        std::vector<std::string> conditions = tscg::transcript_conditions(t);
        std::map<std::string, tscg::ScoreResult> scores;
        for (const auto& c : conditions) {
            tscg::ScoreResult s = tscg::score_transcript(t, c, macro);
            scores[c] = s;
            std::cout << "condition " << c << ": TSA " << percent(s.tsa) << " PF1 "
                      << percent(s.pf1) << " overall " << percent(s.overall) << "\n";
        }
        for (const auto& a : conditions)
            for (const auto& b : conditions)
                if (a != b && scores[b].overall > 0.0)
                    std::cout << "arr " << a << " vs " << b << ": "
                              << fixed_digits(tscg::arr(scores[a].overall, scores[b].overall), 2)
                              << "\n";
        if (scores.count("natural-fc") && scores.count("natural-text") && scores.count("tscg")) {
            auto [fmt, cmp] = tscg::decompose(scores["natural-fc"].overall * 100.0,
                                              scores["natural-text"].overall * 100.0,
                                              scores["tscg"].overall * 100.0);
            std::cout << "decomposition format " << fixed_digits(fmt, 1) << " compression "
                      << fixed_digits(cmp, 1) << "\n";
        }
        for (const auto& c : conditions) {
            std::vector<double> hits;
            for (const auto& r : t.records)
                if (r.condition == c) hits.push_back(tscg::detail::tool_sets_equal(r) ? 1.0 : 0.0);
            auto [lo, hi] = tscg::bootstrap_ci(hits, resamples, seed);
            std::cout << "bootstrap " << c << ": [" << fixed_digits(lo, 4) << ", "
                      << fixed_digits(hi, 4) << "]\n";
        }
        std::vector<double> pvalues;
        std::vector<std::string> pair_names;
        for (std::size_t i = 0; i < conditions.size(); ++i) {
            for (std::size_t j = i + 1; j < conditions.size(); ++j) {
                std::map<std::pair<std::string, std::int64_t>, bool> a_hits, b_hits;
                for (const auto& r : t.records) {
                    if (r.condition == conditions[i])
                        a_hits[{r.task_id, r.seed}] = tscg::detail::tool_sets_equal(r);
                    if (r.condition == conditions[j])
                        b_hits[{r.task_id, r.seed}] = tscg::detail::tool_sets_equal(r);
                }
                std::int64_t b = 0, c = 0;
                for (const auto& [key, a_ok] : a_hits) {
                    auto it = b_hits.find(key);
                    if (it == b_hits.end()) continue;
                    if (a_ok && !it->second) ++b;
                    if (!a_ok && it->second) ++c;
                }
                double p = tscg::mcnemar(b, c);
                pvalues.push_back(p);
                pair_names.push_back(conditions[i] + " vs " + conditions[j]);
                std::cout << "mcnemar " << pair_names.back() << ": b=" << b << " c=" << c
                          << " p=" << fixed_digits(p, 6) << "\n";
            }
        }
        if (!pvalues.empty()) {
            auto holm = tscg::holm_bonferroni(pvalues);
            for (std::size_t i = 0; i < holm.size(); ++i)
                std::cout << "holm " << pair_names[i] << ": p_adj="
                          << fixed_digits(holm[i].adjusted_p, 6)
                          << " significant=" << (holm[i].significant ? "yes" : "no") << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    ConfigDefaults defaults;
    try {
        defaults = load_config_defaults();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"tool-schema compiler"};
    app.require_subcommand(1);

    auto* compile_cmd = app.add_subcommand("compile", "compile a catalog to compact text");
    std::string in_path, dialect = "openai-fc", report_path, out_path, constraint;
    std::vector<std::string> enable, disable;
    bool check = false;
    ConfigDefaults cfg = defaults;
    compile_cmd->add_option("--in", in_path, "input catalog JSON")->required();
    compile_cmd->add_option("--dialect", dialect, "openai-fc|anthropic|mcp");
    compile_cmd->add_option("--profile", cfg.profile, "conservative|balanced|aggressive|auto");
    compile_cmd->add_option("--tokenizer", cfg.tokenizer, "gpt2|heuristic|merges file path");
    compile_cmd->add_option("--model-family", cfg.model_family, "model family tag");
    compile_cmd->add_option("--sad-budget", cfg.sad_budget, "anchor duplication token budget");
    compile_cmd->add_option("--ccp-k", cfg.ccp_k, "closure recap size");
    compile_cmd->add_option("--alpha", cfg.alpha, "fragility weight");
    compile_cmd->add_option("--constraint", constraint, "output constraint text");
    compile_cmd->add_option("--enable", enable, "force-enable passes");
    compile_cmd->add_option("--disable", disable, "force-disable passes");
    compile_cmd->add_option("--report", report_path, "write report JSON here");
    compile_cmd->add_option("--out", out_path, "write compiled text here instead of stdout");
    compile_cmd->add_flag("--check-bound", check, "fail (exit 3) if the savings bound is broken");

    auto* verify_cmd = app.add_subcommand("verify", "check compiled text against its source");
    std::string original_path, verify_dialect = "openai-fc", compiled_path;
    verify_cmd->add_option("--original", original_path, "source catalog JSON")->required();
    verify_cmd->add_option("--dialect", verify_dialect, "openai-fc|anthropic|mcp");
    verify_cmd->add_option("--compiled", compiled_path, "compiled text file")->required();

    auto* score_cmd = app.add_subcommand("score", "score a JSONL transcript");
    std::string transcript_path;
    bool macro = false;
    int resamples = 1000;
    std::uint64_t seed = 42;
    score_cmd->add_option("--transcript", transcript_path, "JSONL transcript")->required();
    score_cmd->add_flag("--macro", macro, "per-record macro PF1 instead of pooled micro");
    score_cmd->add_option("--resamples", resamples, "bootstrap resamples");
    score_cmd->add_option("--seed", seed, "bootstrap seed");

    CLI11_PARSE(app, argc, argv);

    if (compile_cmd->parsed())
        return run_compile(in_path, dialect, cfg, constraint, enable, disable, report_path,
                           out_path, check);
    if (verify_cmd->parsed()) return run_verify(original_path, verify_dialect, compiled_path);
    return run_score(transcript_path, macro, resamples, seed);
}
