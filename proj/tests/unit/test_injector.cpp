#include <doctest.h>

#include <algorithm>

#include "specverify/error.hpp"
#include "specverify/injector.hpp"
#include "specverify/requirements.hpp"
#include "specverify/subprocess.hpp"
#include "support.hpp"

using namespace specverify;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

struct PlanFixture {
  std::string name;
  fs::path unit;
  fs::path plan;
};

// plans/<unit>.<label>.plan pairs with units/<unit>.c
std::vector<PlanFixture> plan_fixtures() {
  std::vector<PlanFixture> out;
  for (const auto& e : fs::directory_iterator(svtest::fixture("plans"))) {
    auto file = e.path().filename().string();
    auto unit = file.substr(0, file.find('.'));
    out.push_back({file, svtest::fixture("units/" + unit + ".c"), e.path()});
  }
  std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.name < b.name; });
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

ProcessResult compile(const std::vector<std::string>& args, const fs::path& cwd) {
  std::vector<std::string> argv{SV_CC_PATH};
  argv.insert(argv.end(), args.begin(), args.end());
  return run_process(argv, Seconds(60), cwd);
}

}  // namespace

TEST_CASE("every fixture plan: reversible, order-preserving, compiles") {
  auto fixtures = plan_fixtures();
  REQUIRE(fixtures.size() >= 10);
  for (const auto& f : fixtures) {
    CAPTURE(f.name);
    const auto unit_text = read_file(f.unit);
    auto plan = parse_plan_response(read_file(f.plan), "FX-" + f.name);
    CHECK_NOTHROW(validate_plan(plan, unit_text));
    auto inst = inject(unit_text, plan, f.unit);

    CHECK(strip(inst) == unit_text);
    CHECK(strip_markers(inst.instrumented_text) == unit_text);
    CHECK(strip_markers(unit_text) == unit_text);

    // Line map: one entry per original line, strictly increasing, contents unchanged.
    const auto orig = lines_of(unit_text);
    const auto instrumented = lines_of(inst.instrumented_text);
    REQUIRE(inst.line_map.size() == orig.size());
    for (std::size_t i = 0; i < inst.line_map.size(); ++i) {
      auto [o, n] = inst.line_map[i];
      CHECK(o == i + 1);
      if (i > 0) CHECK(n > inst.line_map[i - 1].second);
      REQUIRE(n <= instrumented.size());
      CHECK(instrumented[n - 1] == orig[o - 1]);
    }
    // Everything not mapped is marked.
    std::vector<bool> mapped(instrumented.size() + 1, false);
    for (auto [o, n] : inst.line_map) mapped[n] = true;
    for (std::size_t n = 1; n <= instrumented.size(); ++n) {
      if (!mapped[n]) CHECK(instrumented[n - 1].find(kInjectedMarker) != std::string::npos);
    }

    svtest::TempDir dir;
    write_file(dir / "unit.c", inst.instrumented_text);
    write_file(dir / "sv_assert.h", sv_assert_header());
    for (const char* mode : {"-DSV_VERIFIER_BUILD", "-DSV_WITNESS_BUILD", "-DSV_PLAIN_ASSERT"}) {
      auto r = compile({"-std=c99", "-fsyntax-only", "-Werror=implicit-function-declaration", mode, "unit.c"},
                       dir.path());
      CAPTURE(mode);
      CAPTURE(r.output);
      CHECK(r.exited_normally());
    }
  }
}

TEST_CASE("single exit assertion lands before the closing brace of the step") {
  const std::string unit = "int x;\nvoid m_step(void)\n{\n  x++;\n}\n";
  AssertionPlan plan;
  plan.requirement_id = "T-1";
  plan.post_step_assertions = {"SV_ASSERT(x > 0);"};
  auto inst = inject(unit, plan);
  auto lines = lines_of(inst.instrumented_text);
  auto close = std::find(lines.begin(), lines.end(), "}");
  REQUIRE(close != lines.end());
  CHECK(*(close - 1) == std::string("  SV_ASSERT(x > 0); ") + std::string(kInjectedMarker));
  CHECK(*(close - 2) == "  x++;");
}

TEST_CASE("early returns get the exit block too") {
  auto unit = svtest::fixture_text("units/regulator.c");
  auto plan = parse_plan_response(svtest::fixture_text("plans/regulator.clamp.plan"), "T-2");
  auto inst = inject(unit, plan);
  const std::string a = "SV_ASSERT(rtY.act0 <= 100.0 && rtY.act0 >= -100.0);";
  std::size_t hits = 0;
  for (auto pos = inst.instrumented_text.find(a); pos != std::string::npos;
       pos = inst.instrumented_text.find(a, pos + 1)) {
    ++hits;
  }
  CHECK(hits == 2);
  auto ret = inst.instrumented_text.find("    return;");
  auto first = inst.instrumented_text.find(a);
  CHECK(first < ret);
}

TEST_CASE("empty plan leaves the unit untouched") {
  auto unit = svtest::fixture_text("units/counter.c");
  auto inst = inject(unit, AssertionPlan{});
  CHECK(inst.instrumented_text == unit);
  CHECK(strip(inst) == unit);
}

TEST_CASE("plan with five assertions strips to the original bytes") {
  auto unit = svtest::fixture_text("units/passthru.c");
  auto plan = parse_plan_response(svtest::fixture_text("plans/passthru.five.plan"), "T-5");
  REQUIRE(plan.post_step_assertions.size() == 5);
  auto inst = inject(unit, plan);
  CHECK(strip(inst) == unit);
  CHECK(strip_markers(strip_markers(inst.instrumented_text)) == unit);
}

TEST_CASE("anchor resolution") {
  const std::string two = "void a_step(void)\n{\n}\nvoid b_step(void)\n{\n}\n";
  CHECK(code_of([&] { resolve_anchor(two, AnchorSpec{}); }) == ErrorCode::AnchorAmbiguous);
  AnchorSpec named;
  named.step_function_name = "b_step";
  CHECK(resolve_anchor(two, named).name == "b_step");
  named.step_function_name = "c_step";
  CHECK(code_of([&] { resolve_anchor(two, named); }) == ErrorCode::AnchorNotFound);
  CHECK(code_of([] { resolve_anchor("int x;\n", AnchorSpec{}); }) == ErrorCode::AnchorNotFound);
}

TEST_CASE("plan validation") {
  auto unit = svtest::fixture_text("units/counter.c");
  auto plan = parse_plan_response("ASSERT:\nSV_ASSERT(ghost_var == 0);\n", "T-3");
  CHECK(code_of([&] { validate_plan(plan, unit); }) == ErrorCode::IdentifierUnknown);

  plan = parse_plan_response("ASSERT:\nSV_ASSERT(rtY.count == 0); SV_ASSERT(rtU.reset);\n", "T-3");
  CHECK(code_of([&] { validate_plan(plan, unit); }) == ErrorCode::MultipleAssertionsPerStatement);

  plan = parse_plan_response("DECL:\nstatic int prev;\nASSERT:\nSV_ASSERT(rtY.count == 0);\n", "T-3");
  CHECK(code_of([&] { validate_plan(plan, unit); }) == ErrorCode::UnparseableResponse);

  plan = parse_plan_response("ASSERT:\nrtY.count == 0\n", "T-3");
  CHECK(code_of([&] { validate_plan(plan, unit); }) == ErrorCode::UnparseableResponse);

  CHECK(code_of([] { parse_plan_response("DECL:\nstatic int sv_x;\n", "T-3"); }) ==
        ErrorCode::UnparseableResponse);
  CHECK(code_of([] { parse_plan_response("ASSERT:\nSV_ASSERT(1);\nASSERT:\nSV_ASSERT(1);\n", "T-3"); }) ==
        ErrorCode::UnparseableResponse);
}

TEST_CASE("unsupported layouts are refused rather than mangled") {
  AssertionPlan plan;
  plan.post_step_assertions = {"SV_ASSERT(1);"};
  CHECK(code_of([&] { inject("void m_step(void) { int x; }\n", plan); }) == ErrorCode::InjectionUnsupported);
  CHECK(code_of([&] { inject("int x;\nvoid m_step(void)\n{\n  if (x) return; x = 1;\n}\n", plan); }) ==
        ErrorCode::InjectionUnsupported);
}

TEST_CASE("entry, exit and both") {
  const std::string unit = "int x;\nvoid m_step(void)\n{\n  x++;\n}\n";
  AssertionPlan plan;
  plan.post_step_assertions = {"SV_ASSERT(x >= 0);"};
  plan.pre_step_statements = {"sv_seen = 1;"};
  plan.aux_declarations = {"static int sv_seen;"};
  auto count = [](const std::string& text, const std::string& what) {
    std::size_t n = 0;
    for (auto p = text.find(what); p != std::string::npos; p = text.find(what, p + 1)) ++n;
    return n;
  };
  plan.anchor.insertion_mode = InsertionMode::EntryOfStep;
  auto entry = inject(unit, plan).instrumented_text;
  CHECK(count(entry, "SV_ASSERT(x >= 0);") == 1);
  CHECK(entry.find("SV_ASSERT(x >= 0);") < entry.find("x++;"));
  CHECK(entry.find("sv_seen = 1;") < entry.find("SV_ASSERT(x >= 0);"));
  plan.anchor.insertion_mode = InsertionMode::BothEntryExit;
  auto both = inject(unit, plan).instrumented_text;
  CHECK(count(both, "SV_ASSERT(x >= 0);") == 2);
  plan.anchor.insertion_mode = InsertionMode::ExitOfStep;
  auto exit = inject(unit, plan).instrumented_text;
  CHECK(exit.find("SV_ASSERT(x >= 0);") > exit.find("x++;"));
}

TEST_CASE("injected assertions are reached on every path") {
  // Counts evaluations with SV_COUNT_EVALUATIONS; both the early-return path and
  // the fall-through path of the regulator must evaluate both assertions.
  auto unit = svtest::fixture_text("units/regulator.c");
  auto plan = parse_plan_response(svtest::fixture_text("plans/regulator.clamp.plan"), "T-R");
  auto inst = inject(unit, plan);
  svtest::TempDir dir;
  write_file(dir / "unit.c", inst.instrumented_text);
  write_file(dir / "sv_assert.h", sv_assert_header());
  write_file(dir / "main.c",
             "#include <stdio.h>\n"
             "typedef struct { double ref0, meas0, ref1, meas1, ref2, meas2, ref3, meas3, ref4, meas4;"
             " unsigned char enable; } ExtU;\n"
             "extern ExtU rtU;\n"
             "unsigned long sv_assert_evaluations;\n"
             "void regulator_step(void);\nvoid regulator_initialize(void);\n"
             "int main(void) {\n"
             "  regulator_initialize();\n"
             "  rtU.enable = 0; regulator_step(); regulator_step();\n"
             "  printf(\"%lu\\n\", sv_assert_evaluations);\n"
             "  rtU.enable = 1; regulator_step(); regulator_step(); regulator_step();\n"
             "  printf(\"%lu\\n\", sv_assert_evaluations);\n"
             "  return 0;\n}\n");
  auto build = compile({"-std=c99", "-DSV_PLAIN_ASSERT", "-DSV_COUNT_EVALUATIONS", "-o", "reach", "main.c",
                        "unit.c", "-lm"},
                       dir.path());
  REQUIRE_MESSAGE(build.exited_normally(), build.output);
  auto run = run_process({(dir / "reach").string()}, Seconds(10));
  REQUIRE(run.exited_normally());
  CHECK(run.output == "4\n10\n");
}

TEST_CASE("unit interface follows the generated-code conventions") {
  auto iface = analyze_unit(svtest::fixture_text("units/medsel_mean.c"), AnchorSpec{});
  CHECK(iface.step_function == "medsel_step");
  REQUIRE(iface.init_function);
  CHECK(*iface.init_function == "medsel_initialize");
  REQUIRE(iface.inputs.size() == 1);
  CHECK(iface.inputs[0].name == "rtU");
  REQUIRE(iface.outputs.size() == 1);
  CHECK(iface.outputs[0].name == "rtY");
  REQUIRE(iface.state.size() == 1);
  CHECK(iface.state[0].name == "rtDW");
  CHECK(is_input_root("Model_U"));
  CHECK(is_output_root("rtY"));
  CHECK_FALSE(is_input_root("rtDW"));
}
