// specverify: requirements-to-verdict pipeline driver.

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "specverify/error.hpp"
#include "specverify/fp_medsel.hpp"
#include "specverify/pipeline.hpp"

using namespace specverify;

namespace {

int fp_demo(const std::string& triple_text, std::size_t search, std::uint64_t seed) {
  if (search > 0) {
    auto hits = fp::divergence_search(search, seed);
    std::cout << "samples: " << search << "  seed: " << seed << "  divergent: " << hits.size() << '\n';
    for (const auto& t : hits) {
      std::cout << "a=" << fp::describe(t.a) << " b=" << fp::describe(t.b) << " c=" << fp::describe(t.c)
                << " mean-based=" << fp::describe(fp::mid_by_mean(t))
                << " minmax=" << fp::describe(fp::mid_by_minmax(t)) << '\n';
    }
    return 0;
  }

  const bool custom = !triple_text.empty();
  fp::Triple32 t = fp::absorption_triple();
  if (custom) {
    float v[3];
    std::stringstream ss(triple_text);
    std::string item;
    int n = 0;
    while (std::getline(ss, item, ',')) {
      if (n == 3) fail(ErrorCode::ConfigInvalid, "--triple takes exactly three values");
      char* end = nullptr;
      v[n] = std::strtof(item.c_str(), &end);
      if (end == item.c_str() || *end != '\0') fail(ErrorCode::ConfigInvalid, "bad number '" + item + "'");
      ++n;
    }
    if (n != 3) fail(ErrorCode::ConfigInvalid, "--triple takes exactly three values");
    t = fp::Triple32(v[0], v[1], v[2]);
  }
  const float mean_pick = fp::mid_by_mean(t);
  const float minmax_pick = fp::mid_by_minmax(t);
  std::cout << "a = " << fp::describe(t.a) << '\n'
            << "b = " << fp::describe(t.b) << '\n'
            << "c = " << fp::describe(t.c) << '\n'
            << "sum (float32) = " << fp::describe(fp::sum32(t)) << '\n'
            << "mean (float32) = " << fp::describe(fp::mean32(t)) << '\n'
            << "mean-based: " << fp::describe(mean_pick) << '\n'
            << "minmax: " << fp::describe(minmax_pick) << '\n'
            << (fp::bits_of(mean_pick) == fp::bits_of(minmax_pick) ? "agree" : "diverge") << '\n';
  if (custom) return 0;
  bool reproduced = fp::bits_of(mean_pick) == fp::bits_of(t.b) && fp::bits_of(minmax_pick) == fp::bits_of(t.c);
  return reproduced ? 0 : 1;
}

void print_summary(const RunSummary& s) {
  for (const auto& r : s.requirements) {
    std::cout << r.requirement_id << '\t' << r.status << '\t' << (r.last_stage.empty() ? "-" : r.last_stage);
    if (!r.detail.empty()) std::cout << '\t' << r.detail;
    std::cout << '\n';
  }
  if (s.report) {
    std::cout << "report: " << s.report->json.string() << '\n'
              << "report: " << s.report->markdown.string() << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Formalize requirements, instrument C units, verify and score the results."};
  app.set_config("--config", "", "INI/TOML file mirroring the command-line flags");
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run the pipeline over a requirements document");
  RunConfig cfg;
  std::string provider = "replay", stages = "formalize,inject,verify,witness,evaluate";
  std::string fp_mode = "ieee", bmc_path, cc, gt, baseline, overrides, baseline_specs, replay, scripted,
              record, prompts, step_function, endpoint, model;
  double timeout = cfg.bmc.timeout.count();
  run->add_option("--requirements", cfg.requirements_path, "Requirements document")->required();
  run->add_option("--provider", provider, "http | replay | scripted")->capture_default_str();
  run->add_option("--replay-store", replay, "Replay directory (default: replay/ beside the document)");
  run->add_option("--scripted-dir", scripted, "Scripted responses (default: scripted/ beside the document)");
  run->add_option("--record-store", record, "Record every exchange into this replay directory");
  run->add_option("--prompt-dir", prompts, "Prompt template overrides");
  run->add_option("--endpoint", endpoint, "Chat-completion endpoint for the http provider");
  run->add_option("--model", model, "Model name for the http provider");
  run->add_option("--bmc-path", bmc_path, "Bounded model checker (SPECVERIFY_BMC overrides)");
  run->add_option("--unwind", cfg.bmc.unwind_bound, "Unwind bound")->capture_default_str();
  run->add_option("--timeout", timeout, "Verifier timeout in seconds")->capture_default_str();
  run->add_option("--fp-mode", fp_mode, "ieee | rational")->capture_default_str();
  run->add_option("--bmc-flag", cfg.bmc.extra_flags, "Extra verifier flag (repeatable)");
  run->add_option("--cc", cc, "C compiler for witnesses (SPECVERIFY_CC otherwise)");
  run->add_option("--workers", cfg.workers, "Concurrent requirements")->capture_default_str();
  run->add_option("--out", cfg.output_dir, "Output directory")->capture_default_str();
  run->add_option("--stages", stages, "Comma-separated prefix of the stage order")->capture_default_str();
  run->add_option("--ground-truth", gt, "id<TAB>truth file (evaluate stage)");
  run->add_option("--baseline", baseline, "Verdict table of a second tool");
  run->add_option("--baseline-label", cfg.baseline_label, "Name of the second tool")->capture_default_str();
  run->add_option("--tool-label", cfg.tool_label, "Name of this run in reports")->capture_default_str();
  run->add_option("--overrides", overrides, "Equivalence review file");
  run->add_option("--baseline-specs", baseline_specs, "Directory of <id>.spec.md from the second tool");
  run->add_option("--budget", cfg.context_budget, "Code context budget in estimated tokens")->capture_default_str();
  run->add_option("--step-function", step_function, "Step function name (default: unique *_step)");

  // fp-demo
  auto* demo = app.add_subcommand("fp-demo", "Compare mean-based and min/max mid-value selection");
  std::string triple;
  std::size_t search = 0;
  std::uint64_t seed = 7;
  demo->add_option("--triple", triple, "Three comma-separated float values");
  demo->add_option("--search", search, "Sample this many stratified triples and list divergences");
  demo->add_option("--seed", seed, "Sampler seed")->capture_default_str();

  // witness
  auto* wit = app.add_subcommand("witness", "Re-run witnesses from saved traces");
  WitnessCommand wcmd;
  std::string wcc;
  wit->add_option("--out", wcmd.output_dir, "Output directory of an earlier run")->capture_default_str();
  wit->add_option("--id", wcmd.requirement_ids, "Requirement id (repeatable; default all)");
  wit->add_option("--cc", wcc, "C compiler");
  wit->add_option("-I,--include", wcmd.witness.include_dirs, "Extra include directory");

  // report
  auto* rep = app.add_subcommand("report", "Re-tabulate saved verdicts or a verdict table");
  ReportCommand rcmd;
  std::string rverdicts, rbaseline, roverrides, rrequirements;
  rep->add_option("--out", rcmd.output_dir, "Output directory")->capture_default_str();
  rep->add_option("--ground-truth", rcmd.ground_truth, "id<TAB>truth file")->required();
  rep->add_option("--verdicts", rverdicts, "Verdict table (default: <out>/verdicts/*.json)");
  rep->add_option("--baseline", rbaseline, "Verdict table of a second tool");
  rep->add_option("--overrides", roverrides, "Equivalence review file");
  rep->add_option("--requirements", rrequirements, "Requirements document (task names)");
  rep->add_option("--tool-label", rcmd.tool_label, "Name of the evaluated tool")->capture_default_str();
  rep->add_option("--baseline-label", rcmd.baseline_label, "Name of the second tool")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      cfg.provider = parse_provider_kind(provider);
      cfg.stages = parse_stages(stages);
      cfg.bmc.timeout = Seconds(timeout);
      if (fp_mode == "ieee") cfg.bmc.floating_point_mode = FloatingPointMode::IeeeFloat;
      else if (fp_mode == "rational") cfg.bmc.floating_point_mode = FloatingPointMode::Rational;
      else fail(ErrorCode::ConfigInvalid, "--fp-mode must be ieee or rational");
      if (!bmc_path.empty()) cfg.bmc.tool_path = bmc_path;
      if (!cc.empty()) cfg.witness.compiler = cc;
      if (!gt.empty()) cfg.ground_truth = gt;
      if (!baseline.empty()) cfg.baseline = baseline;
      if (!overrides.empty()) cfg.overrides = overrides;
      if (!baseline_specs.empty()) cfg.baseline_specs = baseline_specs;
      if (!replay.empty()) cfg.replay_store = replay;
      if (!scripted.empty()) cfg.scripted_dir = scripted;
      if (!record.empty()) cfg.record_store = record;
      if (!prompts.empty()) cfg.prompt_dir = prompts;
      if (!endpoint.empty()) cfg.provider_config.endpoint = endpoint;
      if (!model.empty()) cfg.provider_config.model_name = model;
      cfg.anchor.step_function_name = step_function;
      auto summary = run_pipeline(cfg, std::cerr);
      print_summary(summary);
      return summary.exit_code();
    }
    if (demo->parsed()) return fp_demo(triple, search, seed);
    if (wit->parsed()) {
      if (!wcc.empty()) wcmd.witness.compiler = wcc;
      for (const auto& r : run_witnesses(wcmd, std::cerr)) {
        std::cout << r.requirement_id << '\t' << to_string(r.outcome) << '\n';
      }
      return 0;
    }
    if (rep->parsed()) {
      if (!rverdicts.empty()) rcmd.verdicts_table = rverdicts;
      if (!rbaseline.empty()) rcmd.baseline = rbaseline;
      if (!roverrides.empty()) rcmd.overrides = roverrides;
      if (!rrequirements.empty()) rcmd.requirements = rrequirements;
      auto paths = run_report(rcmd);
      std::cout << "report: " << paths.json.string() << '\n' << "report: " << paths.markdown.string() << '\n';
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
