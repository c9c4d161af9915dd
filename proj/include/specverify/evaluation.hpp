#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specverify/bmc_adapter.hpp"
#include "specverify/formalizer.hpp"
#include "specverify/witness_lab.hpp"

namespace specverify {

enum class Truth { Provable, Falsifiable, Undetermined };
std::string_view to_string(Truth t) noexcept;
Truth parse_truth(std::string_view s);

struct GroundTruth {
  std::string requirement_id;
  Truth truth = Truth::Undetermined;
};

enum class Classification { TruePositive, TrueNegative, FalsePositive, FalseNegative, Inconclusive };
std::string_view to_string(Classification c) noexcept;

struct EvaluationRecord {
  std::string requirement_id;
  std::optional<Verdict> verdict;  ///< absent: no assertion plan was formed
  GroundTruth truth;
  std::optional<WitnessResult> witness;
  Classification classification = Classification::Inconclusive;
  std::string note;  ///< set when witness evidence overrode the recorded truth
};

/// Throws IdMismatch when the ids disagree.
EvaluationRecord classify(const std::optional<Verdict>& verdict, const GroundTruth& truth,
                          const std::optional<WitnessResult>& witness);

struct MetricsRow {
  std::string task;
  int verified = 0;  ///< conclusive verdicts: Verified or Falsifiable
  int formed = 0;
  int total = 0;
};

struct MetricsTable {
  std::vector<MetricsRow> rows;  ///< sorted by task
  MetricsRow aggregate{"Total"};
  std::int64_t rate_tenths = 0;  ///< verified/total in tenths of a percent, half-up
  int fp_count = 0;
  int fn_count = 0;
  int tp_count = 0;
  int tn_count = 0;
  int inconclusive_count = 0;

  double verification_rate() const { return static_cast<double>(rate_tenths) / 10.0; }
};

/// Half-up rounding of 100*num/den to `decimals` places, exact integer arithmetic.
std::int64_t percent_scaled(std::int64_t num, std::int64_t den, int decimals);
/// "46.6", "79.31"
std::string format_percent(std::int64_t num, std::int64_t den, int decimals);

/// Task of an id: `tasks[id]` when present, else the text before the first '-'.
std::string task_of(std::string_view id, const std::map<std::string, std::string>& tasks = {});

MetricsTable tabulate(const std::vector<EvaluationRecord>& records,
                      const std::map<std::string, std::string>& tasks = {});

struct VennSummary {
  std::vector<std::string> only_ours;
  std::vector<std::string> only_baseline;
  std::vector<std::string> both;
};

/// Partition of requirements with a Falsifiable verdict. Throws UniverseMismatch.
VennSummary diff_tools(const std::vector<EvaluationRecord>& ours,
                       const std::vector<EvaluationRecord>& baseline);

enum class EquivalenceCategory {
  LogicEquivalent,
  Misunderstanding,
  LackingAssumption,
  BenchmarkSkipped,
  SequenceReversal,
  OverVerificationOurs,
  OverVerificationBaseline,
  Unreviewed,  ///< structurally different, no human decision yet
};
inline constexpr std::array<EquivalenceCategory, 8> kEquivalenceCategories = {
    EquivalenceCategory::LogicEquivalent,          EquivalenceCategory::Misunderstanding,
    EquivalenceCategory::LackingAssumption,        EquivalenceCategory::BenchmarkSkipped,
    EquivalenceCategory::SequenceReversal,         EquivalenceCategory::OverVerificationOurs,
    EquivalenceCategory::OverVerificationBaseline, EquivalenceCategory::Unreviewed};

std::string_view to_string(EquivalenceCategory c) noexcept;
EquivalenceCategory parse_equivalence_category(std::string_view s);

struct EquivalenceOverride {
  EquivalenceCategory category;
  std::string note;
};

struct EquivalenceResult {
  std::string requirement_id;
  EquivalenceCategory category = EquivalenceCategory::Unreviewed;
  std::string note;
};

/// Whitespace-normalised expression with the operands of `||`, `&&` and `==`
/// sorted; other operators keep their order.
std::string canonical_expression(std::string_view expr);

/// Throws RequirementMismatch when the triples name different requirements.
EquivalenceResult categorize_equivalence(const HoareTriple& ours, const HoareTriple& baseline,
                                         const std::optional<EquivalenceOverride>& override);

struct EquivalenceTally {
  std::map<EquivalenceCategory, int> counts;
  int total = 0;
};
EquivalenceTally tally_equivalence(const std::vector<EquivalenceResult>& results);

struct TruthSummary {
  int provable = 0;
  int falsifiable = 0;
  int undetermined = 0;
  int total() const { return provable + falsifiable + undetermined; }
};
TruthSummary summarize_truth(const std::vector<GroundTruth>& truth);

// Line-oriented inputs; `#` starts a comment, fields are tab-separated.

/// `id<TAB>provable|falsifiable|undetermined`. Throws DuplicateId / MalformedDocument.
std::vector<GroundTruth> parse_ground_truth(std::string_view text);
std::vector<GroundTruth> load_ground_truth(const std::filesystem::path& path);

struct VerdictEntry {
  std::string requirement_id;
  std::optional<Verdict> verdict;  ///< absent for `not_formed`
  std::optional<WitnessOutcome> witness;
};

/// `id<TAB>verified|falsifiable|undetermined|not_formed[<TAB>witness outcome]`.
std::vector<VerdictEntry> parse_verdict_table(std::string_view text);
std::vector<VerdictEntry> load_verdict_table(const std::filesystem::path& path);

/// `id<TAB>category<TAB>note`.
std::map<std::string, EquivalenceOverride> parse_overrides(std::string_view text);
std::map<std::string, EquivalenceOverride> load_overrides(const std::filesystem::path& path);

/// Joins ground truth with verdicts by id. Throws UniverseMismatch.
std::vector<EvaluationRecord> evaluate(const std::vector<GroundTruth>& truth,
                                       const std::vector<VerdictEntry>& verdicts);

}  // namespace specverify
