#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specverify/injector.hpp"
#include "specverify/subprocess.hpp"

namespace specverify {

enum class FloatingPointMode { IeeeFloat, Rational };

/// Regexes (ECMAScript, searched anywhere in the output) mapping tool output to a status.
struct OutputPatterns {
  std::string success = R"(VERIFICATION SUCCESSFUL)";
  std::string failure = R"(VERIFICATION FAILED)";
  std::string bound = R"(unwinding assertion|VERIFICATION UNKNOWN|[Bb]ound (reached|exhausted))";
};

struct BmcConfig {
  std::filesystem::path tool_path = "esbmc";
  int unwind_bound = 10;
  Seconds timeout{900};
  std::vector<std::string> extra_flags;
  FloatingPointMode floating_point_mode = FloatingPointMode::IeeeFloat;
  OutputPatterns patterns;
  Seconds kill_grace{2};

  void validate() const;  // throws ConfigInvalid
  /// tool_path, or SPECVERIFY_BMC when that is set.
  std::filesystem::path effective_tool() const;
  std::vector<std::string> command_line(const std::filesystem::path& file) const;
};

enum class VerdictStatus { Verified, Falsifiable, Undetermined };
enum class VerdictReason { Proved, CounterexampleFound, Timeout, BoundHit, ToolError };

std::string_view to_string(VerdictStatus s) noexcept;
std::string_view to_string(VerdictReason r) noexcept;
std::string_view to_string(FloatingPointMode m) noexcept;
VerdictStatus parse_verdict_status(std::string_view s);
VerdictReason parse_verdict_reason(std::string_view s);

struct TypedValue {
  enum class Kind { Bool, Int, Float32, Float64 };
  Kind kind = Kind::Int;
  double value = 0.0;
  std::optional<std::uint64_t> bit_pattern;
  std::string literal;  ///< as printed by the tool

  static TypedValue of_float32(float f);
  static TypedValue of_float32_bits(std::uint32_t bits);
  static TypedValue of_float64(double d);
  static TypedValue of_int(long long v);
  static TypedValue of_bool(bool b);

  /// C expression reproducing the value; floats go through their bit pattern
  /// via the harness helpers when one is known.
  std::string c_literal() const;
  std::string hex() const;  ///< "0x67BFFF1A", empty without a bit pattern
};

std::string_view to_string(TypedValue::Kind k) noexcept;

struct CounterexampleStep {
  int step_index = 0;
  std::map<std::string, TypedValue> assignments;
};

struct Counterexample {
  std::string failed_assertion;
  std::vector<CounterexampleStep> steps;
  std::string raw_trace;
};

struct Verdict {
  std::string requirement_id;
  VerdictStatus status = VerdictStatus::Undetermined;
  VerdictReason reason = VerdictReason::ToolError;
  std::optional<Counterexample> counterexample;
  Seconds wall_time{0};
  std::string raw_output;
  int exit_code = 0;
};

/// Throws NoStatesFound when `raw` has no `State` block.
Counterexample parse_counterexample(std::string_view raw);

/// Total: every output lands on exactly one status. Precedence is timeout,
/// failure, bound, success; a failure report without a parseable trace and
/// anything unrecognised become Undetermined/ToolError.
Verdict normalize_output(std::string requirement_id, std::string_view output, int exit_code,
                         bool timed_out, const OutputPatterns& patterns = {});

/// Closed-loop harness the verifier runs: initialize once, then forever pick
/// nondeterministic inputs and call the step function.
std::string verification_driver(const UnitInterface& iface, std::string_view requirement_id,
                                std::string_view instrumented_filename);

/// Invokes the verifier on `file`. Throws ToolNotFound, and ToolCrashed for a
/// nonzero exit without a recognisable verdict.
Verdict run_verifier(const std::filesystem::path& file, std::string requirement_id,
                     const BmcConfig& cfg);

}  // namespace specverify
