// Lowering catalogs into role-tagged atoms, description segmentation,
// dependency-edge extraction, fragility scoring, grouping, and text emission.

#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "tscg/ir.hpp"

using namespace tscg;

namespace {

ToolCatalog mcp_catalog(const std::string& json_text) {
    return parse_catalog(json_text, Dialect::mcp);
}

PromptIR lower(const std::string& json_text, const std::string& constraint = "") {
    return lower_to_ir(mcp_catalog(json_text), FillerLexicon::builtin(),
                       DelimiterTable::builtin(), constraint);
}

}  // namespace

TEST_CASE("lowering yields tool-def, param-block, then description segments") {
    auto ir = lower(R"({"tools":[{"name":"go",
        "description":"Kindly search files -> fast results",
        "inputSchema":{"type":"object","properties":{"q":{"type":"string"}},
        "required":["q"]}}]})");
    REQUIRE(ir.atoms.size() == 6);
    CHECK(ir.atoms[0].role == AtomRole::tool_def);
    CHECK(ir.atoms[0].text == "go");
    CHECK(ir.atoms[0].tool == "go");
    CHECK(ir.atoms[0].importance == 1.0);
    CHECK(ir.atoms[1].role == AtomRole::param_block);
    CHECK(ir.atoms[1].text == "(q:str)");
    CHECK(ir.atoms[1].importance == 0.9);
    CHECK(ir.atoms[2].role == AtomRole::filler_span);
    CHECK(ir.atoms[2].text == "Kindly ");  // original casing, swallowed space
    CHECK(ir.atoms[3].role == AtomRole::description);
    CHECK(ir.atoms[3].text == "search files ");
    CHECK(ir.atoms[4].role == AtomRole::delimiter);
    CHECK(ir.atoms[4].text == "->");
    CHECK(ir.atoms[5].role == AtomRole::description);
    CHECK(ir.atoms[5].text == " fast results");
    // ids are dense and stable
    for (std::size_t i = 0; i < ir.atoms.size(); ++i)
        CHECK(ir.atoms[i].id == static_cast<int>(i));
}

TEST_CASE("multi-byte delimiter spellings are matched longest first") {
    auto ir = lower(R"({"tools":[{"name":"t","description":"a <=> b >= c"}]})");
    std::vector<std::string> delims;
    for (const auto& a : ir.atoms)
        if (a.role == AtomRole::delimiter) delims.push_back(a.text);
    CHECK(delims == std::vector<std::string>{"<=>", ">="});
}

TEST_CASE("an output constraint lowers to one unowned atom at the end") {
    auto ir = lower(R"({"tools":[{"name":"t"}]})", "ANSWER:  json  object");
    REQUIRE_FALSE(ir.atoms.empty());
    const Atom& last = ir.atoms.back();
    CHECK(last.role == AtomRole::constraint);
    CHECK(last.tool.empty());
    CHECK(last.text == "ANSWER: json object");  // whitespace collapsed
    CHECK(last.importance == 1.0);
}

TEST_CASE("dependency edges come from after/requires markers") {
    auto ir = lower(R"({"tools":[
        {"name":"Alpha","description":"First step"},
        {"name":"beta","description":"Runs after Alpha. Requires sync-db too."},
        {"name":"sync-db","description":"Crafter beta works"}]})");
    using Edge = std::pair<std::string, std::string>;
    // "Crafter" must not fire the "after " marker mid-word
    CHECK(ir.dependency_edges ==
          std::vector<Edge>{{"Alpha", "beta"}, {"sync-db", "beta"}});
}

TEST_CASE("dependency extraction skips self references and duplicates") {
    auto ir = lower(R"({"tools":[
        {"name":"a","description":"x"},
        {"name":"b","description":"after b, after a, then after a again"}]})");
    using Edge = std::pair<std::string, std::string>;
    CHECK(ir.dependency_edges == std::vector<Edge>{{"a", "b"}});
}

TEST_CASE("fragility blends importance with the position penalty") {
    PromptIR ir;
    ir.add(AtomRole::tool_def, "t", "t");
    ir.add(AtomRole::param_block, "()", "t");
    ir.add(AtomRole::description, "d", "t");
    ir.add(AtomRole::delimiter, ":", "t");
    ir.add(AtomRole::filler_span, "please ", "t");

    auto even = score_fragility(ir, 0.5);
    REQUIRE(even.size() == 5);
    CHECK(even[0] == Catch::Approx(0.5));     // endpoint: no penalty
    CHECK(even[1] == Catch::Approx(0.575));   // 0.45 importance + 0.125 penalty
    CHECK(even[2] == Catch::Approx(0.5));     // middle: max penalty 0.5
    CHECK(even[3] == Catch::Approx(0.175));
    CHECK(even[4] == Catch::Approx(0.0));

    auto imp_only = score_fragility(ir, 1.0);
    CHECK(imp_only == std::vector<double>{1.0, 0.9, 0.5, 0.1, 0.0});

    auto pos_only = score_fragility(ir, 0.0);
    CHECK(pos_only == std::vector<double>{0.0, 0.25, 0.5, 0.25, 0.0});
}

TEST_CASE("fragility of a single atom carries no position penalty") {
    PromptIR ir;
    ir.add(AtomRole::description, "only", "t");
    auto scores = score_fragility(ir, 0.3);
    REQUIRE(scores.size() == 1);
    CHECK(scores[0] == Catch::Approx(0.3 * 0.5));
}

TEST_CASE("fragility rejects empty input and out-of-range alpha") {
    PromptIR empty;
    CHECK_THROWS_AS(score_fragility(empty), EmptyIr);
    PromptIR ir;
    ir.add(AtomRole::description, "x", "t");
    CHECK_THROWS_AS(score_fragility(ir, -0.1), Error);
    CHECK_THROWS_AS(score_fragility(ir, 1.5), Error);
}

TEST_CASE("tool groups are contiguous runs of owned atoms") {
    PromptIR ir;
    ir.add(AtomRole::tool_def, "a", "a");
    ir.add(AtomRole::param_block, "()", "a");
    ir.add(AtomRole::constraint, "json");  // unowned, splits nothing
    ir.add(AtomRole::tool_def, "b", "b");
    ir.add(AtomRole::description, "x", "b");

    auto groups = tool_groups(ir);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].tool == "a");
    CHECK(groups[0].begin == 0);
    CHECK(groups[0].end == 2);
    CHECK(groups[1].tool == "b");
    CHECK(groups[1].begin == 3);
    CHECK(groups[1].end == 5);
}

TEST_CASE("a tool line renders head then description after a pipe") {
    PromptIR ir;
    ir.add(AtomRole::tool_def, "f", "f");
    ir.add(AtomRole::param_block, "(x:int)", "f");
    ir.add(AtomRole::description, "does things  ", "f");
    auto groups = tool_groups(ir);
    REQUIRE(groups.size() == 1);
    CHECK(render_tool_line(ir, groups[0]) == "f(x:int)|does things");

    PromptIR bare;
    bare.add(AtomRole::tool_def, "g", "g");
    bare.add(AtomRole::param_block, "()", "g");
    CHECK(render_tool_line(bare, tool_groups(bare)[0]) == "g()");
}

TEST_CASE("emission covers constraint, tool, and recap lines") {
    PromptIR ir;
    ir.add(AtomRole::constraint, "ANSWER: json");
    ir.add(AtomRole::tool_def, "f", "f");
    ir.add(AtomRole::param_block, "(x:int)", "f");
    ir.add(AtomRole::description, "scan ", "f");
    ir.add(AtomRole::delimiter, "→", "f");
    ir.add(AtomRole::description, " result", "f");
    ir.add(AtomRole::closure, "f → scan");
    ir.add(AtomRole::anchor_dup, "f(x:int)");

    CHECK(emit(ir) ==
          "[ANSWER:json]\n"
          "f(x:int)\n"
          "|scan → result\n"
          "[RECAP] f → scan\n"
          "[RECAP] f(x:int)");
}

TEST_CASE("emitted text has no trailing newline and skips empty descriptions") {
    PromptIR ir;
    ir.add(AtomRole::tool_def, "f", "f");
    ir.add(AtomRole::param_block, "()", "f");
    ir.add(AtomRole::description, "   ", "f");
    CHECK(emit(ir) == "f()");
}
