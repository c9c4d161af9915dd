#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "specverify/bmc_adapter.hpp"
#include "specverify/error.hpp"
#include "specverify/evaluation.hpp"
#include "specverify/injector.hpp"
#include "specverify/llm_gateway.hpp"
#include "specverify/report.hpp"
#include "specverify/witness_lab.hpp"

namespace specverify {

enum class PipelineStage { Formalize, Inject, Verify, Witness, Evaluate };
inline constexpr std::array<PipelineStage, 5> kPipelineOrder = {
    PipelineStage::Formalize, PipelineStage::Inject, PipelineStage::Verify, PipelineStage::Witness,
    PipelineStage::Evaluate};

std::string_view to_string(PipelineStage s) noexcept;
/// Comma-separated stage names. Throws ConfigInvalid unless the set is a
/// non-empty prefix of the pipeline order.
std::vector<PipelineStage> parse_stages(std::string_view csv);

enum class ProviderKind { Http, Replay, Scripted };
std::string_view to_string(ProviderKind k) noexcept;
ProviderKind parse_provider_kind(std::string_view s);

struct RunConfig {
  std::filesystem::path requirements_path;
  ProviderKind provider = ProviderKind::Replay;
  std::filesystem::path replay_store;   ///< empty: `replay/` next to the requirements
  std::filesystem::path scripted_dir;   ///< empty: `scripted/` next to the requirements
  std::optional<std::filesystem::path> record_store;
  ProviderConfig provider_config;
  std::optional<std::filesystem::path> prompt_dir;
  BmcConfig bmc;
  int workers = 1;
  std::filesystem::path output_dir = "out";
  std::vector<PipelineStage> stages{kPipelineOrder.begin(), kPipelineOrder.end()};
  std::optional<std::filesystem::path> ground_truth;
  std::optional<std::filesystem::path> baseline;        ///< verdict table of a second tool
  std::optional<std::filesystem::path> overrides;       ///< equivalence review file
  std::optional<std::filesystem::path> baseline_specs;  ///< `<id>.spec.md` of the second tool
  std::string tool_label = "ours";
  std::string baseline_label = "baseline";
  std::size_t context_budget = 6000;  ///< estimated tokens of code per prompt
  AnchorSpec anchor;
  WitnessOptions witness;

  bool has(PipelineStage s) const;
  std::filesystem::path effective_replay_store() const;
  std::filesystem::path effective_scripted_dir() const;
  void validate() const;  // throws ConfigInvalid
};

struct RunSummary {
  std::vector<RequirementStatus> requirements;
  std::optional<ReportPaths> report;
  int internal_errors = 0;

  int exit_code() const { return internal_errors == 0 ? 0 : 1; }
};

/// Everything a run needs from the outside world: requirement sources, replay
/// store, verifier, compiler and evaluation inputs. Nothing is written.
/// Throws ConfigInvalid, SourceMissing or MissingExternalTool.
void preflight(const RunConfig& cfg);

/// Runs the selected stages for every requirement on a bounded worker pool and
/// writes artefacts under `cfg.output_dir`. Structured progress goes to `log`.
RunSummary run_pipeline(const RunConfig& cfg, std::ostream& log);

/// True for errors that describe the model's output or the unit's shape rather
/// than a broken run; such requirements are recorded as not formed.
bool is_formation_failure(ErrorCode code) noexcept;

// Persisted verdicts (wall time is left out so reruns are byte-identical).
nlohmann::ordered_json verdict_to_json(const Verdict& v);
Verdict verdict_from_json(const nlohmann::json& j);

struct StoredOutcome {
  std::string requirement_id;
  std::optional<Verdict> verdict;
  std::optional<WitnessResult> witness;
  std::string detail;
};
nlohmann::ordered_json stored_outcome_to_json(const StoredOutcome& s);
StoredOutcome stored_outcome_from_json(const nlohmann::json& j);
std::vector<StoredOutcome> load_stored_outcomes(const std::filesystem::path& verdict_dir);

struct ReportCommand {
  std::optional<std::filesystem::path> verdicts_table;  ///< TSV; else `<out>/verdicts/*.json`
  std::filesystem::path output_dir = "out";
  std::filesystem::path ground_truth;
  std::optional<std::filesystem::path> baseline;
  std::optional<std::filesystem::path> overrides;
  std::optional<std::filesystem::path> requirements;  ///< task names from the documents
  std::string tool_label = "ours";
  std::string baseline_label = "baseline";
};

/// Re-tabulates saved or tabulated verdicts into `<out>/report/`.
ReportPaths run_report(const ReportCommand& cmd, ReportInputs* inputs_out = nullptr);

struct WitnessCommand {
  std::filesystem::path output_dir = "out";
  std::vector<std::string> requirement_ids;  ///< empty: every saved trace
  AnchorSpec anchor;
  WitnessOptions witness;
};

/// Replays saved traces against saved instrumented units.
std::vector<WitnessResult> run_witnesses(const WitnessCommand& cmd, std::ostream& log);

}  // namespace specverify
