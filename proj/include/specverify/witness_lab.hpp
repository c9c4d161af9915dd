#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specverify/bmc_adapter.hpp"
#include "specverify/injector.hpp"

namespace specverify {

struct WitnessHarness {
  std::string requirement_id;
  std::string harness_text;
  std::string expected_failure;
  std::size_t step_count = 0;
  std::vector<std::string> driven;    ///< input lvalues assigned in at least one step
  std::vector<std::string> observed;  ///< identifiers printed but never assigned
};

enum class WitnessOutcome { Confirmed, Spurious, BuildFailed, InputUnmappable, UnexpectedFailure };

std::string_view to_string(WitnessOutcome o) noexcept;
WitnessOutcome parse_witness_outcome(std::string_view s);

struct WitnessResult {
  std::string requirement_id;
  WitnessOutcome outcome = WitnessOutcome::BuildFailed;
  std::string observed_output;
  int exit_code = 0;  ///< 128+signal for signalled runs
  std::string diagnostics;  ///< compiler output, or why the run was unexpected
};

/// Counterexample identifiers rooted at an input root are assigned before each
/// step; other unit globals are printed. Solver-internal (`__`-prefixed) and
/// instrumentation (`sv_`-prefixed) symbols, and step-function locals, are
/// ignored. Throws InputUnmappable when an identifier is unknown to the unit or
/// nothing ends up driven.
WitnessHarness generate_harness(const Counterexample& cex, std::string_view unit_text,
                                std::string requirement_id, const AnchorSpec& anchor = {});

struct WitnessOptions {
  std::filesystem::path compiler;            ///< empty: SPECVERIFY_CC, then "cc"
  std::vector<std::filesystem::path> include_dirs;
  std::vector<std::string> defines;          ///< extra -D values
  Seconds run_limit{10};
  std::optional<std::filesystem::path> log_dir;  ///< harness, unit and logs are copied here

  std::filesystem::path effective_compiler() const;
};

/// Builds harness + unit with SV_WITNESS_BUILD in a private temp directory and
/// runs the binary. Throws ToolNotFound when the compiler is missing.
WitnessResult execute_witness(const WitnessHarness& h, const InstrumentedUnit& unit,
                              const WitnessOptions& opts = {});

}  // namespace specverify
