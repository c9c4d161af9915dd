#include "specverify/report.hpp"

#include <sstream>

#include "specverify/requirements.hpp"

namespace specverify {

namespace {

using ojson = nlohmann::ordered_json;

ojson metrics_json(const MetricsTable& m) {
  ojson rows = ojson::array();
  for (const auto& r : m.rows) {
    rows.push_back({{"task", r.task}, {"verified", r.verified}, {"formed", r.formed}, {"total", r.total}});
  }
  return {
      {"rows", rows},
      {"aggregate",
       {{"verified", m.aggregate.verified}, {"formed", m.aggregate.formed}, {"total", m.aggregate.total}}},
      {"verification_rate_percent", format_percent(m.aggregate.verified, m.aggregate.total, 1)},
      {"false_positives", m.fp_count},
      {"false_negatives", m.fn_count},
      {"true_positives", m.tp_count},
      {"true_negatives", m.tn_count},
      {"inconclusive", m.inconclusive_count},
  };
}

std::string verdict_label(const EvaluationRecord& r) {
  return r.verdict ? std::string(to_string(r.verdict->status)) : "not_formed";
}

ojson records_json(const std::vector<EvaluationRecord>& records,
                   const std::map<std::string, std::string>& tasks) {
  ojson out = ojson::array();
  for (const auto& r : records) {
    ojson j{{"id", r.requirement_id},
            {"task", task_of(r.requirement_id, tasks)},
            {"verdict", verdict_label(r)},
            {"truth", to_string(r.truth.truth)},
            {"classification", to_string(r.classification)}};
    if (r.verdict) j["reason"] = to_string(r.verdict->reason);
    if (r.witness) j["witness"] = to_string(r.witness->outcome);
    if (!r.note.empty()) j["note"] = r.note;
    out.push_back(std::move(j));
  }
  return out;
}

void metrics_markdown(std::ostringstream& out, const MetricsTable& m) {
  out << "| Task | Verified | Formed | Total |\n|---|---:|---:|---:|\n";
  for (const auto& r : m.rows) {
    out << "| " << r.task << " | " << r.verified << " | " << r.formed << " | " << r.total << " |\n";
  }
  out << "| **Total** | " << m.aggregate.verified << " | " << m.aggregate.formed << " | "
      << m.aggregate.total << " |\n\n";
  out << "- Verification rate: " << format_percent(m.aggregate.verified, m.aggregate.total, 1) << "%\n";
  out << "- False positives: " << m.fp_count << "\n- False negatives: " << m.fn_count << '\n';
  out << "- True positives: " << m.tp_count << "\n- True negatives: " << m.tn_count << '\n';
  out << "- Inconclusive: " << m.inconclusive_count << "\n\n";
}

void list_md(std::ostringstream& out, const char* title, const std::vector<std::string>& ids) {
  out << "- " << title << " (" << ids.size() << "): ";
  if (ids.empty()) out << "none";
  for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? ", " : "") << ids[i];
  out << '\n';
}

}  // namespace

ReportInputs build_report_inputs(std::string label, std::vector<EvaluationRecord> ours,
                                 std::optional<ToolResults> baseline,
                                 std::optional<EquivalenceTally> equivalence,
                                 const std::vector<GroundTruth>* truth,
                                 const std::map<std::string, std::string>& tasks) {
  ReportInputs in;
  in.tasks = tasks;
  in.ours.label = std::move(label);
  in.ours.metrics = tabulate(ours, tasks);
  in.ours.records = std::move(ours);
  if (baseline) {
    baseline->metrics = tabulate(baseline->records, tasks);
    in.venn = diff_tools(in.ours.records, baseline->records);
    in.baseline = std::move(baseline);
  }
  in.equivalence = std::move(equivalence);
  if (truth) in.truth = summarize_truth(*truth);
  return in;
}

nlohmann::ordered_json report_json(const ReportInputs& in) {
  ojson j;
  j["tool"] = in.ours.label;
  j["automation"] = {{"level", "Full"},
                     {"manual_mapping", "Not Required"},
                     {"language_constraints", "Flexible"}};
  if (in.truth) {
    const auto& t = *in.truth;
    ojson g{{"provable", t.provable},
            {"falsifiable", t.falsifiable},
            {"undetermined", t.undetermined},
            {"total", t.total()}};
    if (t.total() > 0) {
      g["undetermined_percent"] = format_percent(t.undetermined, t.total(), 1);
    }
    j["ground_truth"] = std::move(g);
  }
  j["metrics"] = metrics_json(in.ours.metrics);
  j["records"] = records_json(in.ours.records, in.tasks);
  if (in.baseline) {
    j["baseline"] = {{"tool", in.baseline->label},
                     {"metrics", metrics_json(in.baseline->metrics)},
                     {"records", records_json(in.baseline->records, in.tasks)}};
  }
  if (in.venn) {
    j["falsifiable_overlap"] = {{"only_ours", in.venn->only_ours},
                                {"only_baseline", in.venn->only_baseline},
                                {"both", in.venn->both}};
  }
  if (in.equivalence) {
    ojson cats = ojson::array();
    for (auto c : kEquivalenceCategories) {
      int n = in.equivalence->counts.at(c);
      if (c == EquivalenceCategory::Unreviewed && n == 0) continue;
      ojson row{{"category", to_string(c)}, {"count", n}};
      if (in.equivalence->total > 0) row["percent"] = format_percent(n, in.equivalence->total, 2);
      cats.push_back(std::move(row));
    }
    j["equivalence"] = {{"total", in.equivalence->total}, {"categories", cats}};
  }
  if (!in.requirements.empty()) {
    ojson reqs = ojson::array();
    for (const auto& r : in.requirements) {
      reqs.push_back({{"id", r.requirement_id},
                      {"last_stage", r.last_stage},
                      {"status", r.status},
                      {"detail", r.detail}});
    }
    j["requirements"] = std::move(reqs);
  }
  return j;
}

std::string report_markdown(const ReportInputs& in) {
  std::ostringstream out;
  out << "# Verification report: " << in.ours.label << "\n\n";
  out << "| Aspect | Value |\n|---|---|\n"
      << "| Automation level | Full |\n| Manual mapping | Not Required |\n"
      << "| Language constraints | Flexible |\n\n";
  if (in.truth) {
    const auto& t = *in.truth;
    out << "## Ground truth\n\n";
    out << "- Provable: " << t.provable << "\n- Falsifiable: " << t.falsifiable
        << "\n- Undetermined: " << t.undetermined;
    if (t.total() > 0) out << " (" << format_percent(t.undetermined, t.total(), 1) << "%)";
    out << "\n- Total: " << t.total() << "\n\n";
  }
  out << "## Metrics (" << in.ours.label << ")\n\n";
  metrics_markdown(out, in.ours.metrics);
  if (in.baseline) {
    out << "## Metrics (" << in.baseline->label << ")\n\n";
    metrics_markdown(out, in.baseline->metrics);
  }
  if (in.venn) {
    out << "## Falsifiable overlap\n\n";
    list_md(out, ("only " + in.ours.label).c_str(), in.venn->only_ours);
    list_md(out, ("only " + (in.baseline ? in.baseline->label : std::string("baseline"))).c_str(),
            in.venn->only_baseline);
    list_md(out, "both", in.venn->both);
    out << '\n';
  }
  if (in.equivalence) {
    out << "## Specification equivalence\n\n| Category | Count | Percentage |\n|---|---:|---:|\n";
    for (auto c : kEquivalenceCategories) {
      int n = in.equivalence->counts.at(c);
      if (c == EquivalenceCategory::Unreviewed && n == 0) continue;
      out << "| " << to_string(c) << " | " << n << " | "
          << (in.equivalence->total ? format_percent(n, in.equivalence->total, 2) + "%" : "-") << " |\n";
    }
    out << "| **Total** | " << in.equivalence->total << " | |\n\n";
  }
  out << "## Requirements\n\n| Id | Verdict | Truth | Witness | Classification | Note |\n"
      << "|---|---|---|---|---|---|\n";
  for (const auto& r : in.ours.records) {
    out << "| " << r.requirement_id << " | " << verdict_label(r) << " | " << to_string(r.truth.truth)
        << " | " << (r.witness ? std::string(to_string(r.witness->outcome)) : "-") << " | "
        << to_string(r.classification) << " | " << r.note << " |\n";
  }
  if (!in.requirements.empty()) {
    out << "\n## Pipeline\n\n| Id | Last stage | Status | Detail |\n|---|---|---|---|\n";
    for (const auto& r : in.requirements) {
      std::string detail = r.detail;
      for (auto& ch : detail) {
        if (ch == '|' || ch == '\n') ch = ' ';
      }
      out << "| " << r.requirement_id << " | " << r.last_stage << " | " << r.status << " | " << detail
          << " |\n";
    }
  }
  return out.str();
}

ReportPaths write_report(const ReportInputs& in, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  ReportPaths p{dir / "report.json", dir / "report.md"};
  write_file(p.json, report_json(in).dump(2) + "\n");
  write_file(p.markdown, report_markdown(in));
  return p;
}

}  // namespace specverify
