#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "specverify/evaluation.hpp"

namespace specverify {

/// Per-requirement pipeline outcome, independent of scoring.
struct RequirementStatus {
  std::string requirement_id;
  std::string last_stage;  ///< last stage that completed
  std::string status;      ///< verdict status, "not_formed", or "error"
  std::string detail;      ///< error code and message, witness outcome, ...
};

struct ToolResults {
  std::string label;
  std::vector<EvaluationRecord> records;
  MetricsTable metrics;
};

struct ReportInputs {
  ToolResults ours;
  std::optional<ToolResults> baseline;
  std::optional<VennSummary> venn;
  std::optional<EquivalenceTally> equivalence;
  std::optional<TruthSummary> truth;
  std::vector<RequirementStatus> requirements;
  std::map<std::string, std::string> tasks;
};

struct ReportPaths {
  std::filesystem::path json;
  std::filesystem::path markdown;
};

/// Assembles metrics, Venn partition and equivalence tally from evaluated records.
ReportInputs build_report_inputs(std::string label, std::vector<EvaluationRecord> ours,
                                 std::optional<ToolResults> baseline,
                                 std::optional<EquivalenceTally> equivalence,
                                 const std::vector<GroundTruth>* truth,
                                 const std::map<std::string, std::string>& tasks = {});

nlohmann::ordered_json report_json(const ReportInputs& in);
std::string report_markdown(const ReportInputs& in);

/// Writes `report.json` and `report.md` under `dir`. Contents are deterministic.
ReportPaths write_report(const ReportInputs& in, const std::filesystem::path& dir);

}  // namespace specverify
