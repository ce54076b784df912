// Transcript scoring (tool-set accuracy, pooled/macro param F1, composite),
// ratio and decomposition helpers, the OLS gap fit, the attention uplift
// factor, and the statistics kit.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "tscg/metrics.hpp"
#include "tscg/tokenizer.hpp"

using namespace tscg;

namespace {

const Transcript& main_transcript() {
    static const Transcript t = parse_transcript(
        read_file_or_throw(std::string(TSCG_FIXTURE_DIR) + "/transcript_main.jsonl"));
    return t;
}

}  // namespace

TEST_CASE("the recorded-run fixture reproduces the headline scores") {
    const auto& t = main_transcript();
    REQUIRE(t.records.size() == 45);
    CHECK(transcript_conditions(t) ==
          std::vector<std::string>{"tscg", "natural-fc", "natural-text"});

    auto s = score_transcript(t, "tscg");
    CHECK(s.tsa == Catch::Approx(13.0 / 15.0));
    CHECK(s.pf1 == Catch::Approx(16.0 / 19.0));
    CHECK(s.overall == Catch::Approx(0.6 * 13.0 / 15.0 + 0.4 * 16.0 / 19.0));
    // the one-decimal percent renderings the reports quote
    CHECK(std::round(s.tsa * 1000.0) / 10.0 == Catch::Approx(86.7));
    CHECK(std::round(s.pf1 * 1000.0) / 10.0 == Catch::Approx(84.2));
    CHECK(std::round(s.overall * 1000.0) / 10.0 == Catch::Approx(85.7));

    CHECK(score_transcript(t, "natural-fc").tsa == Catch::Approx(10.0 / 15.0));
    CHECK(score_transcript(t, "natural-text").tsa == Catch::Approx(8.0 / 15.0));
}

TEST_CASE("macro parameter F1 averages per-record scores") {
    const auto& t = main_transcript();
    auto s = score_transcript(t, "tscg", true);
    // 13 of 15 records have perfect param triples, two have none right
    CHECK(s.pf1 == Catch::Approx(13.0 / 15.0));
}

TEST_CASE("a record with no params on either side is vacuously perfect") {
    auto t = parse_transcript(
        R"({"task_id":"t1","condition":"c","seed":0,)"
        R"("predicted":[{"tool":"a"}],"gold":[{"tool":"a"}]})"
        "\n");
    auto s = score_transcript(t, "c");
    CHECK(s.tsa == 1.0);
    CHECK(s.pf1 == 1.0);
    CHECK(s.overall == 1.0);
}

TEST_CASE("param values are normalized before comparison") {
    auto t = parse_transcript(
        R"({"task_id":"t1","condition":"c","seed":0,)"
        R"("predicted":[{"tool":"a","params":{"s":"  x ","n":2.50,"b":true,"z":null}}],)"
        R"("gold":[{"tool":"a","params":{"s":"x","n":2.5,"b":true,"z":null}}]})"
        "\n");
    CHECK(score_transcript(t, "c").pf1 == 1.0);

    CHECK(detail::normalize_param_value(ojson::parse(R"("  x ")")) == "x");
    CHECK(detail::normalize_param_value(ojson::parse("2.50")) == "2.5");
    CHECK(detail::normalize_param_value(ojson::parse("true")) == "true");
    CHECK(detail::normalize_param_value(ojson::parse("null")) == "null");
    CHECK(detail::normalize_param_value(ojson::parse("[1,2]")) == "[1,2]");
}

TEST_CASE("duplicate param keys pool as a multiset") {
    auto t = parse_transcript(
        R"({"task_id":"t1","condition":"c","seed":0,)"
        R"("predicted":[{"tool":"a","params":{"k":"v"}},{"tool":"a","params":{"k":"v"}}],)"
        R"("gold":[{"tool":"a","params":{"k":"v"}}]})"
        "\n");
    auto s = score_transcript(t, "c");
    // tp = 1, predicted = 2, gold = 1: precision 1/2, recall 1
    CHECK(s.pf1 == Catch::Approx(2.0 / 3.0));
}

TEST_CASE("transcript parsing reports the offending line") {
    CHECK_THROWS_WITH(parse_transcript("{not json}\n"),
                      Catch::Matchers::ContainsSubstring("line 1"));
    std::string dup =
        R"({"task_id":"t1","condition":"c","seed":0,"predicted":[],"gold":[]})" "\n"
        R"({"task_id":"t1","condition":"c","seed":0,"predicted":[],"gold":[]})" "\n";
    CHECK_THROWS_WITH(parse_transcript(dup), Catch::Matchers::ContainsSubstring("line 2"));
    CHECK_THROWS_AS(parse_transcript(R"({"task_id":"t1"})" "\n"), MalformedTranscript);
    CHECK_THROWS_AS(
        parse_transcript(
            R"({"task_id":"t1","condition":"c","seed":0,"predicted":[{"params":{}}],"gold":[]})"
            "\n"),
        MalformedTranscript);
}

TEST_CASE("scoring rejects empty transcripts and unknown conditions") {
    Transcript empty;
    CHECK_THROWS_AS(score_transcript(empty, "c"), EmptyTranscript);
    CHECK_THROWS_AS(score_transcript(main_transcript(), "no-such"), UnknownCondition);
}

TEST_CASE("accuracy-retained ratio and its guard") {
    CHECK(std::round(arr(85.2, 74.0) * 100.0) / 100.0 == Catch::Approx(1.15));
    CHECK(std::round(arr(81.6, 51.9) * 100.0) / 100.0 == Catch::Approx(1.57));
    CHECK(arr(0.5, 0.5) == Catch::Approx(1.0));
    CHECK_THROWS_AS(arr(0.9, 0.0), DivisionByZeroBaseline);
    CHECK_THROWS_AS(arr(0.9, -1.0), DivisionByZeroBaseline);
}

TEST_CASE("the gap decomposition splits and sums back exactly") {
    auto [fmt1, cmp1] = decompose(74.0, 51.1, 85.2);
    CHECK(fmt1 == Catch::Approx(-22.9).margin(1e-9));
    CHECK(cmp1 == Catch::Approx(34.1).margin(1e-9));
    CHECK(fmt1 + cmp1 == Catch::Approx(85.2 - 74.0).margin(1e-9));

    auto [fmt2, cmp2] = decompose(55.2, 81.6, 84.9);
    CHECK(fmt2 == Catch::Approx(26.4).margin(1e-9));
    CHECK(cmp2 == Catch::Approx(3.3).margin(1e-9));
}

TEST_CASE("the gap predictor recovers a planted line") {
    auto exact = fit_gap_predictor({{1.0, 3.0}, {2.0, 5.0}, {3.0, 7.0}});
    CHECK(exact.alpha_slope == Catch::Approx(2.0));
    CHECK(exact.beta_intercept == Catch::Approx(1.0));
    CHECK(exact.r_squared == Catch::Approx(1.0));

    auto noisy = fit_gap_predictor({{0.0, 1.0}, {1.0, 2.0}, {2.0, 2.0}, {3.0, 4.0}});
    CHECK(noisy.alpha_slope == Catch::Approx(0.9));
    CHECK(noisy.beta_intercept == Catch::Approx(0.9));
    CHECK(noisy.r_squared == Catch::Approx(1.0 - 0.7 / 4.75));

    auto flat = fit_gap_predictor({{1.0, 5.0}, {2.0, 5.0}, {3.0, 5.0}});
    CHECK(flat.alpha_slope == Catch::Approx(0.0));
    CHECK(flat.r_squared == Catch::Approx(1.0));
}

TEST_CASE("the gap predictor rejects degenerate designs") {
    CHECK_THROWS_AS(fit_gap_predictor({{1.0, 2.0}, {2.0, 3.0}}), DegenerateDesign);
    CHECK_THROWS_AS(fit_gap_predictor({{1.0, 2.0}, {1.0, 3.0}, {1.0, 4.0}}),
                    DegenerateDesign);
}

TEST_CASE("attention uplift is the exact survivor ratio") {
    CHECK(sdm_attention_uplift(100, 0) == 1.0);
    CHECK(sdm_attention_uplift(100, 25) == 100.0 / 75.0);
    CHECK(sdm_attention_uplift(7, 3) == 7.0 / 4.0);
    CHECK_THROWS_AS(sdm_attention_uplift(0, 0), InvalidLengths);
    CHECK_THROWS_AS(sdm_attention_uplift(-3, 0), InvalidLengths);
    CHECK_THROWS_AS(sdm_attention_uplift(5, -1), InvalidLengths);
    CHECK_THROWS_AS(sdm_attention_uplift(5, 5), InvalidLengths);
    CHECK_THROWS_AS(sdm_attention_uplift(5, 6), InvalidLengths);
}

TEST_CASE("bootstrap intervals are bit-reproducible and ordered") {
    std::vector<double> samples = {3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0};
    auto a = bootstrap_ci(samples, 500, 7);
    auto b = bootstrap_ci(samples, 500, 7);
    CHECK(a.first == b.first);  // identical bits, not just close
    CHECK(a.second == b.second);
    CHECK(a.first <= a.second);
    auto other_seed = bootstrap_ci(samples, 500, 8);
    CHECK((other_seed.first != a.first || other_seed.second != a.second));

    auto constant = bootstrap_ci({2.0, 2.0, 2.0}, 100, 1);
    CHECK(constant.first == 2.0);
    CHECK(constant.second == 2.0);

    CHECK_THROWS_AS(bootstrap_ci({}, 100, 1), EmptySamples);
}

TEST_CASE("bootstrap intervals bracket the sample mean on easy data") {
    std::vector<double> samples;
    for (int i = 1; i <= 50; ++i) samples.push_back(static_cast<double>(i));
    auto [lo, hi] = bootstrap_ci(samples, 2000, 42, 0.95);
    CHECK(lo < 25.5);
    CHECK(hi > 25.5);
    CHECK(lo > 15.0);
    CHECK(hi < 36.0);
}

TEST_CASE("exact McNemar matches the binomial tail") {
    CHECK(mcnemar(9, 1) == Catch::Approx(0.021484375).margin(1e-9));
    CHECK(mcnemar(1, 9) == Catch::Approx(0.021484375).margin(1e-9));
    CHECK(mcnemar(0, 0) == 1.0);
    CHECK(mcnemar(5, 5) == 1.0);  // capped
    CHECK(mcnemar(3, 0) == Catch::Approx(0.25).margin(1e-9));
    CHECK(mcnemar(10, 0) == Catch::Approx(2.0 / 1024.0).margin(1e-12));
    CHECK_THROWS_AS(mcnemar(-1, 2), Error);
}

TEST_CASE("Holm-Bonferroni adjusts step-down with monotonic clamping") {
    auto out = holm_bonferroni({0.01, 0.04, 0.03});
    REQUIRE(out.size() == 3);
    CHECK(out[0].adjusted_p == Catch::Approx(0.03));
    CHECK(out[0].significant);
    CHECK(out[1].adjusted_p == Catch::Approx(0.06));
    CHECK_FALSE(out[1].significant);
    CHECK(out[2].adjusted_p == Catch::Approx(0.06));
    CHECK_FALSE(out[2].significant);
}

TEST_CASE("Holm-Bonferroni significance stops at the first failure") {
    auto out = holm_bonferroni({0.001, 0.2, 0.001});
    CHECK(out[0].significant);
    CHECK_FALSE(out[1].significant);
    CHECK(out[2].significant);

    auto capped = holm_bonferroni({0.9, 0.8});
    CHECK(capped[0].adjusted_p == 1.0);
    CHECK(capped[1].adjusted_p == 1.0);

    CHECK(holm_bonferroni({}).empty());
    CHECK_THROWS_AS(holm_bonferroni({-0.1}), OutOfRangeP);
    CHECK_THROWS_AS(holm_bonferroni({1.5}), OutOfRangeP);
}
