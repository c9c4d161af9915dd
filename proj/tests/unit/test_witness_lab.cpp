#include <doctest.h>

#include "specverify/bmc_adapter.hpp"
#include "specverify/error.hpp"
#include "specverify/injector.hpp"
#include "specverify/requirements.hpp"
#include "specverify/witness_lab.hpp"
#include "support.hpp"

using namespace specverify;

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

InstrumentedUnit instrument(const std::string& unit, const std::string& plan, const std::string& id) {
  auto path = svtest::fixture("units/" + unit + ".c");
  auto p = parse_plan_response(svtest::fixture_text("plans/" + unit + "." + plan + ".plan"), id);
  return inject(read_file(path), p, path);
}

std::size_t count(const std::string& text, const std::string& what) {
  std::size_t n = 0;
  for (auto p = text.find(what); p != std::string::npos; p = text.find(what, p + 1)) ++n;
  return n;
}

WitnessOptions options() {
  WitnessOptions o;
  o.compiler = SV_CC_PATH;
  return o;
}

Counterexample steps_of(const std::vector<std::map<std::string, TypedValue>>& steps, std::string failed = {}) {
  Counterexample cex;
  cex.failed_assertion = std::move(failed);
  for (std::size_t i = 0; i < steps.size(); ++i) cex.steps.push_back({static_cast<int>(i), steps[i]});
  return cex;
}

}  // namespace

TEST_CASE("one-step counterexample: one step call, one print block") {
  auto inst = instrument("medsel_mean", "midvalue", "W-1");
  auto cex = parse_counterexample(svtest::fixture_text("e2e/traces/REG-001.out"));
  auto h = generate_harness(cex, inst.instrumented_text, "W-1");
  CHECK(h.step_count == 1);
  CHECK(count(h.harness_text, "medsel_step();") == 1);
  CHECK(count(h.harness_text, "printf(\"step ") == 1);
  CHECK(h.driven == std::vector<std::string>{"rtU.ia", "rtU.ib", "rtU.ic"});
  CHECK(h.harness_text.find("rtU.ia = sv_f32(0x67BFFF1Au);") != std::string::npos);
}

TEST_CASE("mean-based voter: the counterexample replays") {
  auto inst = instrument("medsel_mean", "midvalue", "REG-001");
  auto cex = parse_counterexample(svtest::fixture_text("e2e/traces/REG-001.out"));
  auto h = generate_harness(cex, inst.instrumented_text, "REG-001");
  auto r = execute_witness(h, inst, options());
  CAPTURE(r.diagnostics);
  CAPTURE(r.observed_output);
  CHECK(r.outcome == WitnessOutcome::Confirmed);
  CHECK(r.observed_output.find("SV_FAIL:REG-001:") != std::string::npos);
  // The selected value is b.
  CHECK(r.observed_output.find("0x2F800002") != std::string::npos);
}

TEST_CASE("min/max voter under the same harness runs to completion") {
  auto mean = instrument("medsel_mean", "midvalue", "REG-001");
  auto cex = parse_counterexample(svtest::fixture_text("e2e/traces/REG-001.out"));
  auto h = generate_harness(cex, mean.instrumented_text, "REG-001");
  auto minmax = instrument("medsel_minmax", "midvalue", "REG-001");
  auto r = execute_witness(h, minmax, options());
  CAPTURE(r.diagnostics);
  CHECK(r.outcome == WitnessOutcome::Spurious);
  CHECK(r.exit_code == 0);
  CHECK(r.observed_output.find("SV_WITNESS_DONE") != std::string::npos);
  CHECK(r.observed_output.find("0x3FFFF000") != std::string::npos);
}

TEST_CASE("constructed failure and constructed pass") {
  auto cex = steps_of({{{"rtU.u", TypedValue::of_int(3)}}}, "rtDW.calls == 0");
  auto failing = instrument("passthru", "fail", "W-F");
  auto r = execute_witness(generate_harness(cex, failing.instrumented_text, "W-F"), failing, options());
  CHECK(r.outcome == WitnessOutcome::Confirmed);
  CHECK(r.exit_code != 0);

  auto passing = instrument("passthru", "pass", "W-P");
  r = execute_witness(generate_harness(cex, passing.instrumented_text, "W-P"), passing, options());
  CHECK(r.outcome == WitnessOutcome::Spurious);
}

TEST_CASE("a different failing assertion is unexpected, not a confirmation") {
  auto cex = steps_of({{{"rtU.u", TypedValue::of_int(3)}}}, "rtY.y == 12345");
  auto failing = instrument("passthru", "fail", "W-U");
  auto r = execute_witness(generate_harness(cex, failing.instrumented_text, "W-U"), failing, options());
  CHECK(r.outcome == WitnessOutcome::UnexpectedFailure);
}

TEST_CASE("three steps run in order") {
  auto cex = steps_of({{{"rtU.u", TypedValue::of_int(5)}},
                       {{"rtU.u", TypedValue::of_int(6)}, {"rtDW.calls", TypedValue::of_int(2)}},
                       {{"rtU.u", TypedValue::of_int(7)}}});
  auto unit = instrument("passthru", "pass", "W-3");
  auto h = generate_harness(cex, unit.instrumented_text, "W-3");
  CHECK(count(h.harness_text, "passthru_step();") == 3);
  CHECK(h.observed == std::vector<std::string>{"rtDW.calls"});
  auto r = execute_witness(h, unit, options());
  REQUIRE(r.outcome == WitnessOutcome::Spurious);
  const auto& out = r.observed_output;
  auto s0 = out.find("step 0"), s1 = out.find("step 1"), s2 = out.find("step 2");
  REQUIRE(s0 != std::string::npos);
  REQUIRE(s1 != std::string::npos);
  REQUIRE(s2 != std::string::npos);
  CHECK(s0 < s1);
  CHECK(s1 < s2);
  // The unit's own call counter reads 1, 2, 3 after the respective steps.
  CHECK(out.find("rtDW.calls = 1", s0) < s1);
  CHECK(out.find("rtDW.calls = 2", s1) < s2);
  CHECK(out.find("rtDW.calls = 3", s2) != std::string::npos);
  CHECK(out.find("rtY.last_u = 7", s2) != std::string::npos);
}

TEST_CASE("history variable: holds for constant input, flips when it changes") {
  auto unit = instrument("hold", "unchanged", "W-H");
  auto step = [](double u) {
    return std::map<std::string, TypedValue>{{"rtU.u", TypedValue::of_float64(u)},
                                             {"rtU.track", TypedValue::of_int(1)}};
  };
  auto steady = steps_of({step(2.5), step(2.5), step(2.5)}, "!sv_prev_valid || rtY.y == sv_prev_y");
  auto r = execute_witness(generate_harness(steady, unit.instrumented_text, "W-H"), unit, options());
  CHECK(r.outcome == WitnessOutcome::Spurious);

  auto change = steps_of({step(2.5), step(2.5), step(4.0)}, "!sv_prev_valid || rtY.y == sv_prev_y");
  r = execute_witness(generate_harness(change, unit.instrumented_text, "W-H"), unit, options());
  CHECK(r.outcome == WitnessOutcome::Confirmed);
  auto fail_at = r.observed_output.find("SV_FAIL:");
  CHECK(r.observed_output.find("step 2") < fail_at);
}

TEST_CASE("unmappable counterexamples") {
  auto unit = instrument("passthru", "pass", "W-M").instrumented_text;
  auto internal = steps_of({{{"__ESBMC_alloc", TypedValue::of_int(1)}}});
  CHECK(code_of([&] { generate_harness(internal, unit, "W-M"); }) == ErrorCode::InputUnmappable);
  auto unknown = steps_of({{{"rtU.u", TypedValue::of_int(1)}, {"airspeed", TypedValue::of_int(3)}}});
  CHECK(code_of([&] { generate_harness(unknown, unit, "W-M"); }) == ErrorCode::InputUnmappable);
  auto only_output = steps_of({{{"rtY.y", TypedValue::of_int(1)}}});
  CHECK(code_of([&] { generate_harness(only_output, unit, "W-M"); }) == ErrorCode::InputUnmappable);
}

TEST_CASE("build failures are an outcome") {
  auto unit = instrument("passthru", "pass", "W-B");
  auto cex = steps_of({{{"rtU.u", TypedValue::of_int(1)}}});
  auto h = generate_harness(cex, unit.instrumented_text, "W-B");
  unit.instrumented_text += "this is not C\n";
  auto r = execute_witness(h, unit, options());
  CHECK(r.outcome == WitnessOutcome::BuildFailed);
  CHECK_FALSE(r.diagnostics.empty());
}

TEST_CASE("missing compiler") {
  auto unit = instrument("passthru", "pass", "W-C");
  auto h = generate_harness(steps_of({{{"rtU.u", TypedValue::of_int(1)}}}), unit.instrumented_text, "W-C");
  WitnessOptions o;
  o.compiler = "/nonexistent/cc";
  CHECK(code_of([&] { execute_witness(h, unit, o); }) == ErrorCode::ToolNotFound);
}

TEST_CASE("artefacts land in the log directory") {
  svtest::TempDir dir;
  auto unit = instrument("passthru", "fail", "W-L");
  auto h = generate_harness(steps_of({{{"rtU.u", TypedValue::of_int(1)}}}, "rtDW.calls == 0"),
                            unit.instrumented_text, "W-L");
  auto o = options();
  o.log_dir = dir / "w";
  auto r = execute_witness(h, unit, o);
  CHECK(r.outcome == WitnessOutcome::Confirmed);
  for (const char* f : {"harness.c", "build.log", "run.log", "result.txt"}) {
    CHECK(std::filesystem::exists(dir / (std::string("w/") + f)));
  }
}

TEST_CASE("outcome strings") {
  CHECK(to_string(WitnessOutcome::InputUnmappable) == "input_unmappable");
  CHECK(parse_witness_outcome("spurious") == WitnessOutcome::Spurious);
}
