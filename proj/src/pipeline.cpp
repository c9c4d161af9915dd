#include "specverify/pipeline.hpp"

#include <algorithm>
#include <cstring>
#include <atomic>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "specverify/ctext.hpp"
#include "specverify/error.hpp"
#include "specverify/formalizer.hpp"
#include "specverify/requirements.hpp"
#include "specverify/subprocess.hpp"

namespace specverify {

namespace {

using ojson = nlohmann::ordered_json;

class StageLog {
 public:
  explicit StageLog(std::ostream& out) : out_(out) {}

  void event(PipelineStage stage, const std::string& req, std::string_view event,
             const std::string& detail = {}) {
    std::ostringstream line;
    line << "stage=" << to_string(stage) << " req=" << req << " event=" << event;
    if (!detail.empty()) {
      std::string d = detail;
      for (auto& c : d) {
        if (c == '\n' || c == '"') c = ' ';
      }
      line << " detail=\"" << d << '"';
    }
    std::lock_guard lock(mutex_);
    out_ << line.str() << '\n';
    out_.flush();
  }

 private:
  std::ostream& out_;
  std::mutex mutex_;
};

std::unique_ptr<ChatProvider> make_provider(const RunConfig& cfg) {
  switch (cfg.provider) {
    case ProviderKind::Http: return std::make_unique<HttpProvider>();
    case ProviderKind::Replay: return std::make_unique<ReplayProvider>(cfg.effective_replay_store());
    case ProviderKind::Scripted: return std::make_unique<ScriptedProvider>(cfg.effective_scripted_dir());
  }
  fail(ErrorCode::ConfigInvalid, "unknown provider");
}

std::string error_detail(const Error& e) { return e.what(); }

struct RequirementRun {
  RequirementStatus status;
  std::optional<Verdict> verdict;
  std::optional<WitnessResult> witness;
  std::optional<HoareTriple> triple;
  bool internal_error = false;
  bool formed = false;
};

ojson typed_value_json(const TypedValue& v) {
  ojson j{{"kind", to_string(v.kind)}, {"literal", v.literal}};
  if (v.bit_pattern) j["bits"] = v.hex();
  return j;
}

TypedValue typed_value_from_json(const nlohmann::json& j) {
  auto kind = j.at("kind").get<std::string>();
  auto literal = j.at("literal").get<std::string>();
  std::optional<std::uint64_t> bits;
  if (j.contains("bits")) bits = std::stoull(j.at("bits").get<std::string>(), nullptr, 16);
  TypedValue v;
  if (kind == "float32") {
    v = bits ? TypedValue::of_float32_bits(static_cast<std::uint32_t>(*bits))
             : TypedValue::of_float32(std::stof(ctext::ends_with(literal, "f")
                                                    ? literal.substr(0, literal.size() - 1)
                                                    : literal));
    if (!bits) v.bit_pattern.reset();
  } else if (kind == "float64") {
    if (bits) {
      double d;
      std::uint64_t b = *bits;
      std::memcpy(&d, &b, sizeof d);
      v = TypedValue::of_float64(d);
    } else {
      v = TypedValue::of_float64(std::stod(literal));
      v.bit_pattern.reset();
    }
  } else if (kind == "bool") {
    v = TypedValue::of_bool(literal == "true" || literal == "1");
  } else if (kind == "int") {
    v = TypedValue::of_int(std::stoll(literal, nullptr, 0));
  } else {
    fail(ErrorCode::MalformedDocument, "unknown value kind '" + kind + "'");
  }
  v.literal = literal;
  return v;
}

void write_stored(const std::filesystem::path& dir, const StoredOutcome& s) {
  write_file(dir / (s.requirement_id + ".json"), stored_outcome_to_json(s).dump(2) + "\n");
}

}  // namespace

std::string_view to_string(PipelineStage s) noexcept {
  switch (s) {
    case PipelineStage::Formalize: return "formalize";
    case PipelineStage::Inject: return "inject";
    case PipelineStage::Verify: return "verify";
    case PipelineStage::Witness: return "witness";
    case PipelineStage::Evaluate: return "evaluate";
  }
  return "formalize";
}

std::vector<PipelineStage> parse_stages(std::string_view csv) {
  std::set<PipelineStage> chosen;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    auto comma = csv.find(',', pos);
    auto name = ctext::trim(csv.substr(pos, comma == std::string_view::npos ? csv.npos : comma - pos));
    if (!name.empty()) {
      auto it = std::find_if(kPipelineOrder.begin(), kPipelineOrder.end(),
                             [&](PipelineStage s) { return to_string(s) == name; });
      if (it == kPipelineOrder.end()) fail(ErrorCode::ConfigInvalid, "unknown stage '" + name + "'");
      chosen.insert(*it);
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (chosen.empty()) fail(ErrorCode::ConfigInvalid, "no stages selected");
  std::vector<PipelineStage> out(kPipelineOrder.begin(),
                                 kPipelineOrder.begin() + static_cast<std::ptrdiff_t>(chosen.size()));
  if (std::set<PipelineStage>(out.begin(), out.end()) != chosen) {
    fail(ErrorCode::ConfigInvalid, "stages must be a prefix of formalize,inject,verify,witness,evaluate");
  }
  return out;
}

std::string_view to_string(ProviderKind k) noexcept {
  switch (k) {
    case ProviderKind::Http: return "http";
    case ProviderKind::Replay: return "replay";
    case ProviderKind::Scripted: return "scripted";
  }
  return "replay";
}

ProviderKind parse_provider_kind(std::string_view s) {
  for (auto k : {ProviderKind::Http, ProviderKind::Replay, ProviderKind::Scripted}) {
    if (to_string(k) == s) return k;
  }
  fail(ErrorCode::ConfigInvalid, "unknown provider '" + std::string(s) + "'");
}

bool RunConfig::has(PipelineStage s) const {
  return std::find(stages.begin(), stages.end(), s) != stages.end();
}

std::filesystem::path RunConfig::effective_replay_store() const {
  if (!replay_store.empty()) return replay_store;
  return requirements_path.parent_path() / "replay";
}

std::filesystem::path RunConfig::effective_scripted_dir() const {
  if (!scripted_dir.empty()) return scripted_dir;
  return requirements_path.parent_path() / "scripted";
}

void RunConfig::validate() const {
  if (requirements_path.empty()) fail(ErrorCode::ConfigInvalid, "no requirements document given");
  if (workers < 1) fail(ErrorCode::ConfigInvalid, "workers must be at least 1");
  if (stages.empty()) fail(ErrorCode::ConfigInvalid, "no stages selected");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (stages[i] != kPipelineOrder[i]) {
      fail(ErrorCode::ConfigInvalid, "stages must be a prefix of the pipeline order");
    }
  }
  if (output_dir.empty()) fail(ErrorCode::ConfigInvalid, "no output directory");
  if (context_budget == 0) fail(ErrorCode::ConfigInvalid, "context budget must be positive");
  if (has(PipelineStage::Verify)) {
    try {
      bmc.validate();
    } catch (const Error& e) {
      fail(ErrorCode::ConfigInvalid, e.what());
    }
  }
  if (has(PipelineStage::Evaluate) && !ground_truth) {
    fail(ErrorCode::ConfigInvalid, "the evaluate stage needs --ground-truth");
  }
  if (!(witness.run_limit.count() > 0)) fail(ErrorCode::ConfigInvalid, "witness run limit must be positive");
}

void preflight(const RunConfig& cfg) {
  cfg.validate();
  RequirementSet set;
  try {
    set = load_requirement_set(cfg.requirements_path);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) fail(ErrorCode::ConfigInvalid, e.what());
    throw;
  }
  check_sources(set);

  std::error_code ec;
  switch (cfg.provider) {
    case ProviderKind::Replay:
      if (!std::filesystem::is_directory(cfg.effective_replay_store(), ec)) {
        fail(ErrorCode::ConfigInvalid, "replay store " + cfg.effective_replay_store().string() + " is missing");
      }
      break;
    case ProviderKind::Scripted:
      if (!std::filesystem::is_directory(cfg.effective_scripted_dir(), ec)) {
        fail(ErrorCode::ConfigInvalid, "scripted responses " + cfg.effective_scripted_dir().string() +
                                           " are missing");
      }
      break;
    case ProviderKind::Http: {
      const char* env = std::getenv("SPECVERIFY_ENDPOINT");
      if (cfg.provider_config.endpoint.empty() && !(env && *env)) {
        fail(ErrorCode::ConfigInvalid, "http provider needs an endpoint (config or SPECVERIFY_ENDPOINT)");
      }
      break;
    }
  }
  if (cfg.prompt_dir && !std::filesystem::is_directory(*cfg.prompt_dir, ec)) {
    fail(ErrorCode::ConfigInvalid, "prompt directory " + cfg.prompt_dir->string() + " is missing");
  }
  if (cfg.has(PipelineStage::Verify) && !find_executable(cfg.bmc.effective_tool().string())) {
    fail(ErrorCode::MissingExternalTool, "verifier '" + cfg.bmc.effective_tool().string() + "' not found");
  }
  if (cfg.has(PipelineStage::Witness) && !find_executable(cfg.witness.effective_compiler().string())) {
    fail(ErrorCode::MissingExternalTool,
         "C compiler '" + cfg.witness.effective_compiler().string() + "' not found");
  }
  if (cfg.has(PipelineStage::Evaluate)) {
    auto truth = load_ground_truth(*cfg.ground_truth);
    std::set<std::string> known;
    for (const auto& g : truth) known.insert(g.requirement_id);
    for (const auto& r : set.requirements) {
      if (!known.count(r.id)) fail(ErrorCode::ConfigInvalid, r.id + " has no ground-truth entry");
    }
    if (cfg.baseline) {
      auto base = load_verdict_table(*cfg.baseline);
      std::set<std::string> ids;
      for (const auto& b : base) ids.insert(b.requirement_id);
      for (const auto& r : set.requirements) {
        if (!ids.count(r.id)) fail(ErrorCode::ConfigInvalid, r.id + " is missing from the baseline");
      }
    }
    if (cfg.overrides) (void)load_overrides(*cfg.overrides);
    if (cfg.baseline_specs && !std::filesystem::is_directory(*cfg.baseline_specs, ec)) {
      fail(ErrorCode::ConfigInvalid, "baseline specs " + cfg.baseline_specs->string() + " are missing");
    }
  }
}

bool is_formation_failure(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnparseableResponse:
    case ErrorCode::UnmappedVariable:
    case ErrorCode::IdentifierUnknown:
    case ErrorCode::MultipleAssertionsPerStatement:
    case ErrorCode::ResponseEmpty:
    case ErrorCode::AnchorNotFound:
    case ErrorCode::AnchorAmbiguous:
    case ErrorCode::InjectionUnsupported:
    case ErrorCode::BudgetTooSmall:
      return true;
    default:
      return false;
  }
}

ojson verdict_to_json(const Verdict& v) {
  ojson j{{"id", v.requirement_id},
          {"status", to_string(v.status)},
          {"reason", to_string(v.reason)},
          {"exit_code", v.exit_code}};
  if (v.counterexample) {
    ojson steps = ojson::array();
    for (const auto& s : v.counterexample->steps) {
      ojson a = ojson::object();
      for (const auto& [id, value] : s.assignments) a[id] = typed_value_json(value);
      steps.push_back({{"step", s.step_index}, {"assignments", a}});
    }
    j["counterexample"] = {{"failed_assertion", v.counterexample->failed_assertion}, {"steps", steps}};
  }
  return j;
}

Verdict verdict_from_json(const nlohmann::json& j) {
  Verdict v;
  v.requirement_id = j.at("id").get<std::string>();
  v.status = parse_verdict_status(j.at("status").get<std::string>());
  v.reason = parse_verdict_reason(j.at("reason").get<std::string>());
  v.exit_code = j.value("exit_code", 0);
  if (j.contains("counterexample")) {
    Counterexample c;
    const auto& cj = j.at("counterexample");
    c.failed_assertion = cj.at("failed_assertion").get<std::string>();
    for (const auto& sj : cj.at("steps")) {
      CounterexampleStep s;
      s.step_index = sj.at("step").get<int>();
      for (const auto& [id, value] : sj.at("assignments").items()) {
        s.assignments.emplace(id, typed_value_from_json(value));
      }
      c.steps.push_back(std::move(s));
    }
    v.counterexample = std::move(c);
  }
  if ((v.status == VerdictStatus::Falsifiable) != v.counterexample.has_value()) {
    fail(ErrorCode::MalformedDocument, v.requirement_id + ": falsifiable iff a counterexample is stored");
  }
  return v;
}

ojson stored_outcome_to_json(const StoredOutcome& s) {
  ojson j{{"id", s.requirement_id}};
  if (s.verdict) {
    j["verdict"] = verdict_to_json(*s.verdict);
  } else {
    j["verdict"] = nullptr;
  }
  if (s.witness) {
    j["witness"] = {{"outcome", to_string(s.witness->outcome)}, {"exit_code", s.witness->exit_code}};
  }
  if (!s.detail.empty()) j["detail"] = s.detail;
  return j;
}

StoredOutcome stored_outcome_from_json(const nlohmann::json& j) {
  StoredOutcome s;
  s.requirement_id = j.at("id").get<std::string>();
  if (!j.at("verdict").is_null()) s.verdict = verdict_from_json(j.at("verdict"));
  if (j.contains("witness")) {
    WitnessResult w;
    w.requirement_id = s.requirement_id;
    w.outcome = parse_witness_outcome(j.at("witness").at("outcome").get<std::string>());
    w.exit_code = j.at("witness").value("exit_code", 0);
    s.witness = std::move(w);
  }
  s.detail = j.value("detail", std::string());
  return s;
}

std::vector<StoredOutcome> load_stored_outcomes(const std::filesystem::path& verdict_dir) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(verdict_dir, ec)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  if (ec) fail(ErrorCode::IoError, "cannot list " + verdict_dir.string());
  std::sort(files.begin(), files.end());
  std::vector<StoredOutcome> out;
  for (const auto& f : files) {
    auto j = nlohmann::json::parse(read_file(f), nullptr, false);
    if (j.is_discarded()) fail(ErrorCode::MalformedDocument, f.string() + " is not JSON");
    out.push_back(stored_outcome_from_json(j));
  }
  return out;
}

RunSummary run_pipeline(const RunConfig& cfg, std::ostream& log_stream) {
  preflight(cfg);
  const auto set = load_requirement_set(cfg.requirements_path);
  const auto templates = cfg.prompt_dir ? PromptTemplates::load(*cfg.prompt_dir) : PromptTemplates::defaults();
  Gateway gateway(make_provider(cfg), cfg.provider_config, cfg.record_store);
  StageLog log(log_stream);

  const auto out = cfg.output_dir;
  const auto specs_dir = out / "specs";
  const auto inst_dir = out / "instrumented";
  const auto trace_dir = out / "traces";
  const auto verdict_dir = out / "verdicts";
  const auto witness_dir = out / "witness";
  std::filesystem::create_directories(out);
  if (cfg.has(PipelineStage::Inject)) write_file(inst_dir / "sv_assert.h", sv_assert_header());

  std::vector<RequirementRun> runs(set.requirements.size());

  auto process = [&](std::size_t index) {
    const auto& req = set.requirements[index];
    auto& run = runs[index];
    run.status.requirement_id = req.id;
    PipelineStage stage = PipelineStage::Formalize;
    try {
      log.event(stage, req.id, "start");
      const auto unit_text = read_file(req.resolved_source);
      const auto context = slice_code_text(unit_text, cfg.context_budget, cfg.anchor.step_suffix);
      auto triple = formalize(req, context, gateway, templates);
      write_file(specs_dir / (req.id + ".spec.md"), render_for_review(triple, req.text));
      run.triple = triple;
      run.status.last_stage = "formalize";
      run.status.status = "formalized";
      log.event(stage, req.id, "done");
      if (!cfg.has(PipelineStage::Inject)) return;

      stage = PipelineStage::Inject;
      log.event(stage, req.id, "start");
      auto plan = synthesize_plan(triple, context, gateway, templates);
      plan.anchor.step_suffix = cfg.anchor.step_suffix;
      if (plan.anchor.step_function_name.empty()) plan.anchor.step_function_name = cfg.anchor.step_function_name;
      auto unit = inject(unit_text, plan, req.resolved_source);
      const auto inst_path = inst_dir / (req.id + ".c");
      write_file(inst_path, unit.instrumented_text);
      auto iface = analyze_unit(unit_text, plan.anchor);
      const auto driver_path = inst_dir / (req.id + ".bmc.c");
      write_file(driver_path, verification_driver(iface, req.id, req.id + ".c"));
      run.formed = true;
      run.status.last_stage = "inject";
      run.status.status = "instrumented";
      log.event(stage, req.id, "done");
      if (!cfg.has(PipelineStage::Verify)) return;

      stage = PipelineStage::Verify;
      log.event(stage, req.id, "start");
      auto bmc = cfg.bmc;
      bmc.extra_flags.push_back("-I" + req.resolved_source.parent_path().string());
      Verdict verdict;
      try {
        verdict = run_verifier(driver_path, req.id, bmc);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ToolCrashed) throw;
        verdict.requirement_id = req.id;
        verdict.status = VerdictStatus::Undetermined;
        verdict.reason = VerdictReason::ToolError;
        verdict.raw_output = e.what();
      }
      write_file(trace_dir / (req.id + ".txt"), verdict.raw_output);
      run.verdict = verdict;
      run.status.last_stage = "verify";
      run.status.status = std::string(to_string(verdict.status));
      run.status.detail = std::string(to_string(verdict.reason));
      log.event(stage, req.id, "done", run.status.status + "/" + run.status.detail);

      if (cfg.has(PipelineStage::Witness) && verdict.status == VerdictStatus::Falsifiable) {
        stage = PipelineStage::Witness;
        log.event(stage, req.id, "start");
        WitnessResult w;
        try {
          auto h = generate_harness(*verdict.counterexample, unit.instrumented_text, req.id, plan.anchor);
          auto opts = cfg.witness;
          opts.log_dir = witness_dir / req.id;
          w = execute_witness(h, unit, opts);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::InputUnmappable) throw;
          w = WitnessResult{req.id, WitnessOutcome::InputUnmappable, {}, 0, e.what()};
          write_file(witness_dir / req.id / "result.txt",
                     "outcome: input_unmappable\ndiagnostics: " + std::string(e.what()) + "\n");
        }
        run.witness = w;
        run.status.last_stage = "witness";
        run.status.detail += ", witness " + std::string(to_string(w.outcome));
        log.event(stage, req.id, "done", std::string(to_string(w.outcome)));
      }
      if (cfg.has(PipelineStage::Witness)) run.status.last_stage = "witness";
    } catch (const Error& e) {
      if (is_formation_failure(e.code())) {
        run.status.status = "not_formed";
      } else {
        run.status.status = "error";
        run.internal_error = true;
      }
      run.status.detail = error_detail(e);
      log.event(stage, req.id, "fail", run.status.detail);
    } catch (const std::exception& e) {
      run.status.status = "error";
      run.status.detail = std::string("internal: ") + e.what();
      run.internal_error = true;
      log.event(stage, req.id, "fail", run.status.detail);
    }
    if (cfg.has(PipelineStage::Verify)) {
      write_stored(verdict_dir, StoredOutcome{req.id, run.verdict, run.witness, run.status.detail});
    }
  };

  const std::size_t n = set.requirements.size();
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) process(i);
    });
  }
  for (auto& t : pool) t.join();

  RunSummary summary;
  for (const auto& r : runs) {
    summary.requirements.push_back(r.status);
    if (r.internal_error) ++summary.internal_errors;
  }

  if (cfg.has(PipelineStage::Evaluate)) {
    std::map<std::string, std::string> tasks;
    for (const auto& r : set.requirements) tasks[r.id] = set.task;
    auto all_truth = load_ground_truth(*cfg.ground_truth);
    std::map<std::string, GroundTruth> truth_by_id;
    for (auto& g : all_truth) truth_by_id[g.requirement_id] = g;
    std::vector<GroundTruth> truth;
    std::vector<EvaluationRecord> records;
    for (const auto& r : runs) {
      const auto& g = truth_by_id.at(r.status.requirement_id);
      log.event(PipelineStage::Evaluate, g.requirement_id, "start");
      truth.push_back(g);
      records.push_back(classify(r.verdict, g, r.witness));
      log.event(PipelineStage::Evaluate, g.requirement_id, "done",
                std::string(to_string(records.back().classification)));
    }

    std::optional<ToolResults> baseline;
    if (cfg.baseline) {
      auto table = load_verdict_table(*cfg.baseline);
      std::map<std::string, VerdictEntry> by_id;
      for (auto& e : table) by_id[e.requirement_id] = e;
      std::vector<VerdictEntry> restricted;
      for (const auto& g : truth) restricted.push_back(by_id.at(g.requirement_id));
      baseline = ToolResults{cfg.baseline_label, evaluate(truth, restricted), {}};
    }

    std::optional<EquivalenceTally> equivalence;
    if (cfg.overrides || cfg.baseline_specs) {
      std::map<std::string, EquivalenceOverride> overrides;
      if (cfg.overrides) overrides = load_overrides(*cfg.overrides);
      std::vector<EquivalenceResult> results;
      for (const auto& r : runs) {
        const auto& id = r.status.requirement_id;
        std::optional<EquivalenceOverride> o;
        if (auto it = overrides.find(id); it != overrides.end()) o = it->second;
        std::optional<HoareTriple> base;
        if (cfg.baseline_specs) {
          auto p = *cfg.baseline_specs / (id + ".spec.md");
          if (std::filesystem::exists(p)) base = parse_review_document(read_file(p));
        }
        if (r.triple && base) {
          results.push_back(categorize_equivalence(*r.triple, *base, o));
        } else {
          results.push_back(EquivalenceResult{id, o ? o->category : EquivalenceCategory::Unreviewed,
                                              o ? o->note : "no pair to compare"});
        }
      }
      equivalence = tally_equivalence(results);
    }

    auto inputs = build_report_inputs(cfg.tool_label, std::move(records), std::move(baseline),
                                      std::move(equivalence), &truth, tasks);
    inputs.requirements = summary.requirements;
    summary.report = write_report(inputs, out / "report");
  }
  return summary;
}

ReportPaths run_report(const ReportCommand& cmd, ReportInputs* inputs_out) {
  auto truth = load_ground_truth(cmd.ground_truth);
  std::map<std::string, std::string> tasks;
  if (cmd.requirements) {
    auto set = load_requirement_set(*cmd.requirements);
    for (const auto& r : set.requirements) tasks[r.id] = set.task;
  }

  std::vector<VerdictEntry> entries;
  std::vector<RequirementStatus> statuses;
  if (cmd.verdicts_table) {
    entries = load_verdict_table(*cmd.verdicts_table);
  } else {
    for (auto& s : load_stored_outcomes(cmd.output_dir / "verdicts")) {
      VerdictEntry e{s.requirement_id, s.verdict, std::nullopt};
      if (s.witness) e.witness = s.witness->outcome;
      statuses.push_back({s.requirement_id, "", s.verdict ? std::string(to_string(s.verdict->status)) : "not_formed",
                          s.detail});
      entries.push_back(std::move(e));
    }
  }
  // Saved runs may cover a subset of the ground truth.
  if (!cmd.verdicts_table) {
    std::set<std::string> ids;
    for (const auto& e : entries) ids.insert(e.requirement_id);
    std::vector<GroundTruth> kept;
    for (const auto& g : truth) {
      if (ids.count(g.requirement_id)) kept.push_back(g);
    }
    truth = std::move(kept);
  }
  auto records = evaluate(truth, entries);

  std::optional<ToolResults> baseline;
  if (cmd.baseline) {
    auto table = load_verdict_table(*cmd.baseline);
    std::map<std::string, VerdictEntry> by_id;
    for (auto& e : table) by_id[e.requirement_id] = e;
    std::vector<VerdictEntry> restricted;
    for (const auto& g : truth) {
      auto it = by_id.find(g.requirement_id);
      if (it == by_id.end()) fail(ErrorCode::UniverseMismatch, g.requirement_id + " missing from the baseline");
      restricted.push_back(it->second);
    }
    baseline = ToolResults{cmd.baseline_label, evaluate(truth, restricted), {}};
  }

  std::optional<EquivalenceTally> equivalence;
  if (cmd.overrides) {
    auto overrides = load_overrides(*cmd.overrides);
    std::vector<EquivalenceResult> results;
    for (const auto& g : truth) {
      auto it = overrides.find(g.requirement_id);
      if (it != overrides.end()) {
        results.push_back({g.requirement_id, it->second.category, it->second.note});
      } else {
        results.push_back({g.requirement_id, EquivalenceCategory::Unreviewed, "no review entry"});
      }
    }
    equivalence = tally_equivalence(results);
  }

  auto inputs = build_report_inputs(cmd.tool_label, std::move(records), std::move(baseline),
                                    std::move(equivalence), &truth, tasks);
  inputs.requirements = std::move(statuses);
  auto paths = write_report(inputs, cmd.output_dir / "report");
  if (inputs_out) *inputs_out = std::move(inputs);
  return paths;
}

std::vector<WitnessResult> run_witnesses(const WitnessCommand& cmd, std::ostream& log_stream) {
  StageLog log(log_stream);
  const auto trace_dir = cmd.output_dir / "traces";
  const auto inst_dir = cmd.output_dir / "instrumented";
  std::vector<std::string> ids = cmd.requirement_ids;
  if (ids.empty()) {
    std::error_code ec;
    for (const auto& e : std::filesystem::directory_iterator(trace_dir, ec)) {
      if (e.path().extension() == ".txt") ids.push_back(e.path().stem().string());
    }
    if (ec) fail(ErrorCode::IoError, "cannot list " + trace_dir.string());
    std::sort(ids.begin(), ids.end());
  }
  std::vector<WitnessResult> results;
  for (const auto& id : ids) {
    log.event(PipelineStage::Witness, id, "start");
    const auto raw = read_file(trace_dir / (id + ".txt"));
    auto verdict = normalize_output(id, raw, 0, false);
    if (verdict.status != VerdictStatus::Falsifiable) {
      log.event(PipelineStage::Witness, id, "skip", "saved trace is not a counterexample");
      continue;
    }
    InstrumentedUnit unit;
    unit.instrumented_text = read_file(inst_dir / (id + ".c"));
    unit.original_path = inst_dir / (id + ".c");
    WitnessResult w;
    try {
      auto h = generate_harness(*verdict.counterexample, unit.instrumented_text, id, cmd.anchor);
      auto opts = cmd.witness;
      opts.log_dir = cmd.output_dir / "witness" / id;
      w = execute_witness(h, unit, opts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InputUnmappable) throw;
      w = WitnessResult{id, WitnessOutcome::InputUnmappable, {}, 0, e.what()};
    }
    log.event(PipelineStage::Witness, id, "done", std::string(to_string(w.outcome)));
    results.push_back(std::move(w));
  }
  return results;
}

}  // namespace specverify
