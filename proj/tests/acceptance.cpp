// Acceptance gate: one pass/fail line per shipped guarantee. Exercises
// determinism, the headline compression example, the savings floor, operator
// class directions, structural preservation (including a randomized sweep),
// transcript scoring, the statistics kit, tokenizer non-monotonicity, the
// attention-uplift identity, and compile latency. Exits nonzero on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tscg/tscg.hpp"

using namespace tscg;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void line(int n, bool pass, const std::string& what) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << n << ": " << what << "\n";
    if (!pass) ++failures;
}

std::string fixture_dir() { return TSCG_FIXTURE_DIR; }

std::string data_dir() {
    if (const char* env = std::getenv("TSCG_DATA_DIR")) return env;
    return TSCG_DATA_DIR;
}

const Tokenizer& shipped() {
    static const Tokenizer tok = load_tokenizer(data_dir() + "/tokenizer/gpt2/vocab.json",
                                                data_dir() + "/tokenizer/gpt2/merges.txt");
    return tok;
}

std::vector<std::pair<std::string, ToolCatalog>> load_fixtures() {
    std::vector<std::pair<std::string, ToolCatalog>> out;
    for (const auto& entry : fs::directory_iterator(fixture_dir())) {
        if (entry.path().extension() != ".json") continue;
        std::string stem = entry.path().stem().string();
        std::string tag =
            rtrim(read_file_or_throw(fixture_dir() + "/" + stem + ".dialect"));
        out.emplace_back(stem, parse_catalog(read_file_or_throw(entry.path().string()),
                                             dialect_from_tag(tag)));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

const std::vector<std::pair<std::string, ToolCatalog>>& fixtures() {
    static const auto all = load_fixtures();
    return all;
}

constexpr Profile kProfiles[] = {Profile::conservative, Profile::balanced,
                                 Profile::aggressive, Profile::adaptive};

std::string fmt(double v, int digits) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << v;
    return out.str();
}

void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    int repeats = 100;
    int cells = 0, unstable = 0;
    for (const auto& [name, cat] : fixtures()) {
        for (Profile prof : kProfiles) {
            PipelineConfig cfg;
            cfg.profile = prof;
            std::set<std::string> hashes;
            for (int i = 0; i < repeats; ++i)
                hashes.insert(compile(cat, cfg, shipped()).report.determinism_hash);
            ++cells;
            if (hashes.size() != 1) ++unstable;
        }
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = unstable == 0 && secs < 60.0 &&
                cells == static_cast<int>(fixtures().size()) * 4 && fixtures().size() >= 20;
    line(1, pass,
         "determinism: " + std::to_string(repeats) + " repeats over " +
             std::to_string(cells) + " fixture/profile cells, " + std::to_string(unstable) +
             " unstable, " + fmt(secs, 1) + "s");
}

void criterion_2() {
    ToolCatalog cat;
    for (const auto& [name, c] : fixtures())
        if (name == "fig2") cat = c;
    PipelineConfig cfg;
    cfg.profile = Profile::balanced;
    auto result = compile(cat, cfg, shipped());
    std::string first = result.text.substr(0, result.text.find('\n'));
    bool pass = first == "search_files(query:str path?:str)" && result.report.savings >= 0.55;
    line(2, pass,
         "headline example: first line '" + first + "', savings " +
             fmt(result.report.savings * 100.0, 1) + "%");
}

void criterion_3() {
    int checked = 0, bound_fails = 0;
    double s16 = 0.0, s43 = 0.0;
    for (const auto& [name, cat] : fixtures()) {
        PipelineConfig cfg;
        cfg.profile = Profile::balanced;
        cfg.sad_budget = 0;
        cfg.op_overrides[Op::CCP] = false;
        auto result = compile(cat, cfg, shipped());
        ++checked;
        if (!check_bound(result.report)) ++bound_fails;
        if (name == "synthetic_16") s16 = result.report.savings;
        if (name == "synthetic_43") s43 = result.report.savings;
    }
    bool pass = bound_fails == 0 && s16 >= 0.51 && s43 >= 0.51;
    line(3, pass,
         "savings floor: " + std::to_string(checked) + " fixtures bound-checked, " +
             std::to_string(bound_fails) + " failures; 16-tool " + fmt(s16 * 100.0, 1) +
             "%, 43-tool " + fmt(s43 * 100.0, 1) + "%");
}

void criterion_4() {
    int checks = 0, wrong = 0;
    int fixtures_covered = 0;
    for (const auto& [name, cat] : fixtures()) {
        PipelineConfig cfg;
        PromptIR ir = lower_to_ir(cat, cfg.lexicon, cfg.delimiters, "");
        if (ir.atoms.empty()) continue;
        ++fixtures_covered;
        auto scores = score_fragility(ir);
        std::int64_t base = shipped().count_tokens(emit(ir));
        auto check = [&](const PromptIR& out, int direction) {
            std::int64_t after = shipped().count_tokens(emit(out));
            ++checks;
            bool ok = direction < 0   ? after <= base
                      : direction > 0 ? after >= base
                                      : after == base;
            if (!ok) ++wrong;
        };
        check(sdm(ir, cfg.lexicon), -1);
        check(tas(ir, cfg.delimiters, shipped()), -1);
        check(dro(ir, cfg.delimiters), -1);
        check(cfl(ir), -1);
        check(cfo(ir), 0);
        check(cas(ir, scores), 0);
        check(sad_f(ir, scores, 30, shipped()), 1);
        check(ccp(ir, scores, 3), 1);
    }
    bool pass = wrong == 0 && fixtures_covered >= 20;
    line(4, pass,
         "operator direction: 8 passes x " + std::to_string(fixtures_covered) +
             " fixtures, " + std::to_string(wrong) + " violations");
}

ToolCatalog random_catalog(std::mt19937& eng) {
    auto pick = [&](int lo, int hi) {
        return lo + static_cast<int>(eng() % static_cast<unsigned>(hi - lo + 1));
    };
    static const std::vector<std::string> words = {
        "please",  "note",      "that",   "walks", "tree",   "fast",  "maps",
        "to",      "->",        "items:", "count", "записи", "romeo", "juliet",
        "the",     "following", "items",  "are",   "result", "=>",    "data→flow",
        "in",      "order",     "kindly", "check", "output", "json",  "rows"};
    ToolCatalog cat;
    int tool_count = pick(1, 6);
    for (int t = 0; t < tool_count; ++t) {
        ToolSchema tool;
        tool.name = "op_" + std::string(1, static_cast<char>('a' + pick(0, 25))) +
                    std::to_string(t);
        int word_count = pick(0, 10);
        for (int w = 0; w < word_count; ++w) {
            if (!tool.description.empty()) tool.description += ' ';
            tool.description += words[eng() % words.size()];
        }
        int param_count = pick(0, 5);
        for (int i = 0; i < param_count; ++i) {
            ParamSpec p;
            p.name = std::string(1, static_cast<char>('a' + i)) + std::to_string(pick(0, 9));
            p.required = pick(0, 1) == 1;
            switch (pick(0, 6)) {
                case 0: p.type = JsonType::string_t; break;
                case 1: p.type = JsonType::boolean_t; break;
                case 2: p.type = JsonType::array_t; break;
                case 3: p.type = JsonType::object_t; break;
                case 4:
                    p.type = JsonType::enum_t;
                    for (int v = pick(1, 3); v > 0; --v)
                        p.enum_values.push_back(
                            "v" + std::to_string(v) + std::to_string(pick(0, 99)));
                    break;
                case 5:
                    p.type = JsonType::integer_t;
                    p.min_bound = pick(-5, 5);
                    p.max_bound = *p.min_bound + pick(1, 20);
                    break;
                default:
                    p.type = JsonType::number_t;
                    p.max_bound = pick(1, 999) / 10.0;
                    break;
            }
            if (pick(0, 2) == 0) p.description = words[eng() % words.size()];
            tool.params.push_back(std::move(p));
        }
        cat.tools.push_back(std::move(tool));
    }
    return cat;
}

void criterion_5() {
    int missing = 0, cells = 0;
    for (const auto& [name, cat] : fixtures()) {
        for (Profile prof : kProfiles) {
            PipelineConfig cfg;
            cfg.profile = prof;
            auto result = compile(cat, cfg, shipped());
            ++cells;
            if (!verify_superset(cat, result.text).ok) ++missing;
        }
    }

    std::mt19937 eng(7u);
    int rounds = 10000;
    int fuzz_failures = 0;
    for (int i = 0; i < rounds; ++i) {
        try {
            ToolCatalog cat = random_catalog(eng);
            ToolCatalog reparsed =
                parse_catalog(catalog_to_json(cat, Dialect::mcp).dump(), Dialect::mcp);
            PipelineConfig cfg;
            cfg.profile = kProfiles[i % 4];
            if (cfg.profile == Profile::aggressive) {
                cfg.model_family = "claude-4-opus";
                cfg.sad_budget = 8;
            }
            auto result = compile(reparsed, cfg, shipped());
            ToolCatalog back = parse_compiled(result.text);  // must never throw
            if (back.tools.size() != reparsed.tools.size() ||
                !verify_superset(reparsed, result.text).ok)
                ++fuzz_failures;
        } catch (const std::exception&) {
            ++fuzz_failures;
        }
    }
    bool pass = missing == 0 && fuzz_failures == 0;
    line(5, pass,
         "structure preserved: " + std::to_string(cells) + " fixture/profile cells, " +
             std::to_string(missing) + " missing-atom cells; " + std::to_string(rounds) +
             " random catalogs, " + std::to_string(fuzz_failures) + " failures");
}

void criterion_6() {
    Transcript t =
        parse_transcript(read_file_or_throw(fixture_dir() + "/transcript_main.jsonl"));
    auto s = score_transcript(t, "tscg");
    std::string tsa = fmt(s.tsa * 100.0, 1);
    std::string pf1 = fmt(s.pf1 * 100.0, 1);
    std::string overall = fmt(s.overall * 100.0, 1);
    bool scores_ok = tsa == "86.7" && pf1 == "84.2" && overall == "85.7";

    bool arr_ok = fmt(arr(85.2, 74.0), 2) == "1.15" && fmt(arr(81.6, 51.9), 2) == "1.57";

    auto [f1, c1] = decompose(74.0, 51.1, 85.2);
    auto [f2, c2] = decompose(55.2, 81.6, 84.9);
    bool dec_ok = std::fabs(f1 - (-22.9)) < 1e-9 && std::fabs(c1 - 34.1) < 1e-9 &&
                  std::fabs(f2 - 26.4) < 1e-9 && std::fabs(c2 - 3.3) < 1e-9;

    line(6, scores_ok && arr_ok && dec_ok,
         "scoring: TSA " + tsa + " PF1 " + pf1 + " overall " + overall +
             ", retention ratios " + fmt(arr(85.2, 74.0), 2) + "/" + fmt(arr(81.6, 51.9), 2) +
             ", decomposition (" + fmt(f1, 1) + ", " + fmt(c1, 1) + ") (" + fmt(f2, 1) + ", " +
             fmt(c2, 1) + ")");
}

void criterion_7() {
    auto holm = holm_bonferroni({0.01, 0.04, 0.03});
    bool holm_ok = holm.size() == 3 && std::fabs(holm[0].adjusted_p - 0.03) < 1e-12 &&
                   std::fabs(holm[1].adjusted_p - 0.06) < 1e-12 &&
                   std::fabs(holm[2].adjusted_p - 0.06) < 1e-12 && holm[0].significant &&
                   !holm[1].significant && !holm[2].significant;

    double p = mcnemar(9, 1);
    bool mcnemar_ok = std::fabs(p - 0.0215) <= 0.0005;

    std::vector<double> samples = {0.71, 0.64, 0.92, 0.55, 0.88, 0.47, 0.73, 0.81};
    auto a = bootstrap_ci(samples, 1000, 42);
    auto b = bootstrap_ci(samples, 1000, 42);
    bool boot_ok = a.first == b.first && a.second == b.second && a.first <= a.second;

    line(7, holm_ok && mcnemar_ok && boot_ok,
         "stats kit: holm adjusted (" + fmt(holm[0].adjusted_p, 2) + ", " +
             fmt(holm[1].adjusted_p, 2) + ", " + fmt(holm[2].adjusted_p, 2) +
             "), mcnemar(9,1) " + fmt(p, 6) + ", bootstrap reproducible " +
             (boot_ok ? "yes" : "no"));
}

void criterion_8() {
    std::vector<std::pair<std::string, std::string>> candidates;
    for (int i = 0; i < 49; ++i) {
        // first string never shorter, so these can never qualify
        std::string base = "decoy" + std::to_string(i);
        candidates.emplace_back(base + "x", base);
    }
    candidates.emplace_back("zq→", "understanding");
    auto witness = find_nonmonotonic_witness(shipped(), candidates);
    bool pass = witness && witness->first == "zq→" && witness->second == "understanding" &&
                utf8_length(witness->first) < utf8_length(witness->second) &&
                shipped().count_tokens(witness->first) > shipped().count_tokens(witness->second);
    std::string detail = "no witness found in 50 candidate pairs";
    if (witness)
        detail = "witness: '" + witness->first + "' (" +
                 std::to_string(utf8_length(witness->first)) + " chars, " +
                 std::to_string(shipped().count_tokens(witness->first)) + " tokens) vs '" +
                 witness->second + "' (" + std::to_string(utf8_length(witness->second)) +
                 " chars, " + std::to_string(shipped().count_tokens(witness->second)) +
                 " tokens)";
    line(8, pass, detail);
}

void criterion_9() {
    int checked = 0, wrong = 0;
    for (std::int64_t n = 10; n < 20; ++n) {
        for (std::int64_t k = 0; k < 10; ++k) {
            ++checked;
            if (sdm_attention_uplift(n, k) !=
                static_cast<double>(n) / static_cast<double>(n - k))
                ++wrong;
        }
    }
    line(9, checked == 100 && wrong == 0,
         "attention uplift identity: " + std::to_string(checked) + " grid points, " +
             std::to_string(wrong) + " mismatches");
}

void criterion_10() {
    ToolCatalog cat;
    for (const auto& [name, c] : fixtures())
        if (name == "synthetic_100") cat = c;
    PipelineConfig cfg;
    cfg.profile = Profile::balanced;
    std::vector<double> ms;
    std::size_t emitted_bytes = 0;
    for (int i = 0; i < 50; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        auto result = compile(cat, cfg, shipped());
        auto t1 = std::chrono::steady_clock::now();
        emitted_bytes += result.text.size();
        ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::sort(ms.begin(), ms.end());
    double median = ms[ms.size() / 2];
    line(10, median <= 10.0 && emitted_bytes > 0,
         "latency: 100-tool catalog median " + fmt(median, 2) + " ms, max " +
             fmt(ms.back(), 2) + " ms over 50 runs");
}

}  // namespace

int main() {
    struct Step {
        int n;
        void (*fn)();
    };
    const Step steps[] = {{1, criterion_1}, {2, criterion_2}, {3, criterion_3},
                          {4, criterion_4}, {5, criterion_5}, {6, criterion_6},
                          {7, criterion_7}, {8, criterion_8}, {9, criterion_9},
                          {10, criterion_10}};
    for (const auto& step : steps) {
        try {
            step.fn();
        } catch (const std::exception& e) {
            line(step.n, false, std::string("unexpected error: ") + e.what());
        }
    }
    return failures == 0 ? 0 : 1;
}
