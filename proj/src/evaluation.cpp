#include "specverify/evaluation.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "specverify/ctext.hpp"
#include "specverify/error.hpp"
#include "specverify/requirements.hpp"

namespace specverify {

namespace {

using Tokens = std::vector<std::string>;

std::string join(const Tokens& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ' ';
    out += t[i];
  }
  return out;
}

std::size_t matching_paren(const Tokens& t, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < t.size(); ++i) {
    if (t[i] == "(") ++depth;
    if (t[i] == ")" && --depth == 0) return i;
  }
  return t.size();
}

std::vector<Tokens> split_top(const Tokens& t, std::string_view op) {
  std::vector<Tokens> parts(1);
  int depth = 0;
  for (const auto& tok : t) {
    if (tok == "(" || tok == "[") ++depth;
    if (tok == ")" || tok == "]") --depth;
    if (depth == 0 && tok == op) {
      parts.emplace_back();
      continue;
    }
    parts.back().push_back(tok);
  }
  return parts;
}

bool has_top(const Tokens& t, std::initializer_list<std::string_view> ops) {
  int depth = 0;
  for (const auto& tok : t) {
    if (tok == "(" || tok == "[") ++depth;
    if (tok == ")" || tok == "]") --depth;
    if (depth == 0 && std::find(ops.begin(), ops.end(), tok) != ops.end()) return true;
  }
  return false;
}

std::string canon(Tokens t) {
  while (t.size() >= 2 && t.front() == "(" && matching_paren(t, 0) == t.size() - 1) {
    t = Tokens(t.begin() + 1, t.end() - 1);
  }
  // Operators binding looser than || make operand sorting unsafe.
  if (!has_top(t, {"?", ":", ",", "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^="})) {
    for (std::string_view op : {"||", "&&"}) {
      auto parts = split_top(t, op);
      if (parts.size() > 1) {
        std::vector<std::string> c;
        for (auto& p : parts) c.push_back(canon(p));
        std::sort(c.begin(), c.end());
        std::string out;
        for (std::size_t i = 0; i < c.size(); ++i) {
          if (i) out += " " + std::string(op) + " ";
          out += "(" + c[i] + ")";
        }
        return out;
      }
    }
    if (!has_top(t, {"&", "|", "^"})) {
      auto parts = split_top(t, "==");
      if (parts.size() == 2) {
        auto l = canon(parts[0]), r = canon(parts[1]);
        if (r < l) std::swap(l, r);
        return l + " == " + r;
      }
    }
  }
  Tokens out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == "(") {
      auto close = matching_paren(t, i);
      if (close == t.size()) {
        out.insert(out.end(), t.begin() + static_cast<std::ptrdiff_t>(i), t.end());
        break;
      }
      out.push_back("(" + canon(Tokens(t.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                                        t.begin() + static_cast<std::ptrdiff_t>(close))) +
                    ")");
      i = close;
    } else {
      out.push_back(t[i]);
    }
  }
  return join(out);
}

struct Row {
  std::size_t line;
  std::vector<std::string> fields;
};

std::vector<Row> tsv_rows(std::string_view text) {
  std::vector<Row> rows;
  auto lines = ctext::split_lines(text).lines;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto t = ctext::trim(lines[i]);
    if (t.empty() || t.front() == '#') continue;
    Row row{i + 1, {}};
    std::size_t pos = 0;
    while (true) {
      auto tab = t.find('\t', pos);
      row.fields.push_back(ctext::trim(t.substr(pos, tab == std::string::npos ? tab : tab - pos)));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

[[noreturn]] void bad_row(const Row& r, const std::string& why) {
  fail(ErrorCode::MalformedDocument, "line " + std::to_string(r.line) + ": " + why);
}

}  // namespace

std::string_view to_string(Truth t) noexcept {
  switch (t) {
    case Truth::Provable: return "provable";
    case Truth::Falsifiable: return "falsifiable";
    case Truth::Undetermined: return "undetermined";
  }
  return "undetermined";
}

Truth parse_truth(std::string_view s) {
  for (auto t : {Truth::Provable, Truth::Falsifiable, Truth::Undetermined}) {
    if (to_string(t) == s) return t;
  }
  fail(ErrorCode::MalformedDocument, "unknown ground truth '" + std::string(s) + "'");
}

std::string_view to_string(Classification c) noexcept {
  switch (c) {
    case Classification::TruePositive: return "true_positive";
    case Classification::TrueNegative: return "true_negative";
    case Classification::FalsePositive: return "false_positive";
    case Classification::FalseNegative: return "false_negative";
    case Classification::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

EvaluationRecord classify(const std::optional<Verdict>& verdict, const GroundTruth& truth,
                          const std::optional<WitnessResult>& witness) {
  const auto& id = truth.requirement_id;
  if (verdict && verdict->requirement_id != id) {
    fail(ErrorCode::IdMismatch, "verdict " + verdict->requirement_id + " vs ground truth " + id);
  }
  if (witness && witness->requirement_id != id) {
    fail(ErrorCode::IdMismatch, "witness " + witness->requirement_id + " vs ground truth " + id);
  }
  EvaluationRecord r{id, verdict, truth, witness, Classification::Inconclusive, {}};
  if (!verdict || verdict->status == VerdictStatus::Undetermined) return r;

  if (verdict->status == VerdictStatus::Falsifiable) {
    auto outcome = witness ? std::optional(witness->outcome) : std::nullopt;
    if (outcome == WitnessOutcome::Spurious) {
      r.classification = Classification::FalsePositive;
      if (truth.truth == Truth::Falsifiable) r.note = "witness spurious; ground truth says falsifiable";
    } else if (outcome == WitnessOutcome::Confirmed) {
      r.classification = Classification::TruePositive;
      if (truth.truth != Truth::Falsifiable) {
        r.note = "witness confirmed; ground truth says " + std::string(to_string(truth.truth));
      }
    } else if (truth.truth == Truth::Provable) {
      r.classification = Classification::FalsePositive;
    } else if (truth.truth == Truth::Falsifiable) {
      r.classification = Classification::TruePositive;
    }
    return r;
  }
  if (truth.truth == Truth::Falsifiable) r.classification = Classification::FalseNegative;
  else if (truth.truth == Truth::Provable) r.classification = Classification::TrueNegative;
  return r;
}

std::int64_t percent_scaled(std::int64_t num, std::int64_t den, int decimals) {
  require(den > 0 && num >= 0, "percent of a non-positive total");
  std::int64_t scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  std::int64_t value = num * 100 * scale;
  return (2 * value + den) / (2 * den);
}

std::string format_percent(std::int64_t num, std::int64_t den, int decimals) {
  auto scaled = percent_scaled(num, den, decimals);
  if (decimals == 0) return std::to_string(scaled);
  std::int64_t scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  auto frac = std::to_string(scaled % scale);
  frac.insert(0, static_cast<std::size_t>(decimals) - frac.size(), '0');
  return std::to_string(scaled / scale) + "." + frac;
}

std::string task_of(std::string_view id, const std::map<std::string, std::string>& tasks) {
  if (auto it = tasks.find(std::string(id)); it != tasks.end()) return it->second;
  return std::string(id.substr(0, id.find('-')));
}

MetricsTable tabulate(const std::vector<EvaluationRecord>& records,
                      const std::map<std::string, std::string>& tasks) {
  require(!records.empty(), "tabulate: no records");
  MetricsTable m;
  std::map<std::string, MetricsRow> rows;
  for (const auto& r : records) {
    auto task = task_of(r.requirement_id, tasks);
    auto& row = rows[task];
    row.task = task;
    ++row.total;
    if (r.verdict) {
      ++row.formed;
      if (r.verdict->status != VerdictStatus::Undetermined) ++row.verified;
    }
    switch (r.classification) {
      case Classification::TruePositive: ++m.tp_count; break;
      case Classification::TrueNegative: ++m.tn_count; break;
      case Classification::FalsePositive: ++m.fp_count; break;
      case Classification::FalseNegative: ++m.fn_count; break;
      case Classification::Inconclusive: ++m.inconclusive_count; break;
    }
  }
  for (auto& [task, row] : rows) {
    m.aggregate.verified += row.verified;
    m.aggregate.formed += row.formed;
    m.aggregate.total += row.total;
    m.rows.push_back(row);
  }
  m.rate_tenths = percent_scaled(m.aggregate.verified, m.aggregate.total, 1);
  return m;
}

VennSummary diff_tools(const std::vector<EvaluationRecord>& ours,
                       const std::vector<EvaluationRecord>& baseline) {
  auto detected = [](const std::vector<EvaluationRecord>& recs) {
    std::map<std::string, bool> out;
    for (const auto& r : recs) {
      out[r.requirement_id] = r.verdict && r.verdict->status == VerdictStatus::Falsifiable;
    }
    return out;
  };
  auto a = detected(ours), b = detected(baseline);
  if (a.size() != ours.size() || b.size() != baseline.size()) {
    fail(ErrorCode::UniverseMismatch, "duplicate requirement ids in a tool's results");
  }
  for (const auto& [id, _] : a) {
    if (!b.count(id)) fail(ErrorCode::UniverseMismatch, id + " missing from the baseline");
  }
  for (const auto& [id, _] : b) {
    if (!a.count(id)) fail(ErrorCode::UniverseMismatch, id + " missing from our results");
  }
  VennSummary v;
  for (const auto& [id, ours_hit] : a) {
    bool base_hit = b.at(id);
    if (ours_hit && base_hit) v.both.push_back(id);
    else if (ours_hit) v.only_ours.push_back(id);
    else if (base_hit) v.only_baseline.push_back(id);
  }
  return v;
}

std::string_view to_string(EquivalenceCategory c) noexcept {
  switch (c) {
    case EquivalenceCategory::LogicEquivalent: return "logic_equivalent";
    case EquivalenceCategory::Misunderstanding: return "misunderstanding";
    case EquivalenceCategory::LackingAssumption: return "lacking_assumption";
    case EquivalenceCategory::BenchmarkSkipped: return "benchmark_skipped";
    case EquivalenceCategory::SequenceReversal: return "sequence_reversal";
    case EquivalenceCategory::OverVerificationOurs: return "over_verification_ours";
    case EquivalenceCategory::OverVerificationBaseline: return "over_verification_baseline";
    case EquivalenceCategory::Unreviewed: return "unreviewed";
  }
  return "unreviewed";
}

EquivalenceCategory parse_equivalence_category(std::string_view s) {
  for (auto c : kEquivalenceCategories) {
    if (to_string(c) == s) return c;
  }
  fail(ErrorCode::UnknownCategory, "unknown equivalence category '" + std::string(s) + "'");
}

std::string canonical_expression(std::string_view expr) {
  Tokens t;
  for (auto& tok : ctext::tokenize(expr)) t.push_back(std::move(tok.text));
  return canon(std::move(t));
}

EquivalenceResult categorize_equivalence(const HoareTriple& ours, const HoareTriple& baseline,
                                         const std::optional<EquivalenceOverride>& override) {
  if (ours.requirement_id != baseline.requirement_id) {
    fail(ErrorCode::RequirementMismatch, ours.requirement_id + " vs " + baseline.requirement_id);
  }
  EquivalenceResult r{ours.requirement_id, EquivalenceCategory::Unreviewed, {}};
  if (override) {
    r.category = override->category;
    r.note = override->note;
    return r;
  }
  auto defs = [](const HoareTriple& t) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& d : t.definitions) out.emplace_back(d.name, canonical_expression(d.meaning));
    std::sort(out.begin(), out.end());
    return out;
  };
  bool same = canonical_expression(ours.precondition) == canonical_expression(baseline.precondition) &&
              canonical_expression(ours.postcondition) == canonical_expression(baseline.postcondition) &&
              defs(ours) == defs(baseline);
  if (same) {
    r.category = EquivalenceCategory::LogicEquivalent;
    r.note = "identical after canonicalisation";
  } else {
    r.note = "triples differ structurally; needs review";
  }
  return r;
}

EquivalenceTally tally_equivalence(const std::vector<EquivalenceResult>& results) {
  EquivalenceTally t;
  for (auto c : kEquivalenceCategories) t.counts[c] = 0;
  std::set<std::string> seen;
  for (const auto& r : results) {
    if (!seen.insert(r.requirement_id).second) {
      fail(ErrorCode::DuplicateId, "two equivalence results for " + r.requirement_id);
    }
    ++t.counts[r.category];
    ++t.total;
  }
  return t;
}

TruthSummary summarize_truth(const std::vector<GroundTruth>& truth) {
  TruthSummary s;
  for (const auto& g : truth) {
    switch (g.truth) {
      case Truth::Provable: ++s.provable; break;
      case Truth::Falsifiable: ++s.falsifiable; break;
      case Truth::Undetermined: ++s.undetermined; break;
    }
  }
  return s;
}

std::vector<GroundTruth> parse_ground_truth(std::string_view text) {
  std::vector<GroundTruth> out;
  std::set<std::string> seen;
  for (const auto& row : tsv_rows(text)) {
    if (row.fields.size() != 2) bad_row(row, "expected id<TAB>truth");
    if (!seen.insert(row.fields[0]).second) {
      fail(ErrorCode::DuplicateId, "ground truth lists " + row.fields[0] + " twice");
    }
    out.push_back({row.fields[0], parse_truth(row.fields[1])});
  }
  return out;
}

std::vector<GroundTruth> load_ground_truth(const std::filesystem::path& path) {
  return parse_ground_truth(read_file(path));
}

std::vector<VerdictEntry> parse_verdict_table(std::string_view text) {
  std::vector<VerdictEntry> out;
  std::set<std::string> seen;
  for (const auto& row : tsv_rows(text)) {
    if (row.fields.size() < 2 || row.fields.size() > 3) bad_row(row, "expected id<TAB>status[<TAB>extra]");
    const auto& id = row.fields[0];
    if (!seen.insert(id).second) fail(ErrorCode::DuplicateId, "verdict table lists " + id + " twice");
    VerdictEntry e{id, std::nullopt, std::nullopt};
    const auto& status = row.fields[1];
    std::optional<VerdictReason> reason;
    if (row.fields.size() == 3) {
      const auto& extra = row.fields[2];
      try {
        e.witness = parse_witness_outcome(extra);
      } catch (const Error&) {
        reason = parse_verdict_reason(extra);
      }
    }
    if (status != "not_formed") {
      Verdict v;
      v.requirement_id = id;
      v.status = parse_verdict_status(status);
      switch (v.status) {
        case VerdictStatus::Verified: v.reason = VerdictReason::Proved; break;
        case VerdictStatus::Falsifiable:
          v.reason = VerdictReason::CounterexampleFound;
          // Imported verdicts carry no trace; keep the Falsifiable <=> counterexample invariant.
          v.counterexample = Counterexample{{}, {CounterexampleStep{}}, "(imported verdict)"};
          break;
        case VerdictStatus::Undetermined:
          v.reason = reason.value_or(VerdictReason::BoundHit);
          break;
      }
      e.verdict = std::move(v);
    } else if (e.witness) {
      bad_row(row, "witness outcome on a requirement without a verdict");
    }
    if (e.witness && (!e.verdict || e.verdict->status != VerdictStatus::Falsifiable)) {
      bad_row(row, "witness outcome only applies to falsifiable verdicts");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<VerdictEntry> load_verdict_table(const std::filesystem::path& path) {
  return parse_verdict_table(read_file(path));
}

std::map<std::string, EquivalenceOverride> parse_overrides(std::string_view text) {
  std::map<std::string, EquivalenceOverride> out;
  for (const auto& row : tsv_rows(text)) {
    if (row.fields.size() < 2 || row.fields.size() > 3) bad_row(row, "expected id<TAB>category<TAB>note");
    EquivalenceOverride o{parse_equivalence_category(row.fields[1]),
                          row.fields.size() == 3 ? row.fields[2] : std::string()};
    if (!out.emplace(row.fields[0], std::move(o)).second) {
      fail(ErrorCode::DuplicateId, "overrides list " + row.fields[0] + " twice");
    }
  }
  return out;
}

std::map<std::string, EquivalenceOverride> load_overrides(const std::filesystem::path& path) {
  return parse_overrides(read_file(path));
}

std::vector<EvaluationRecord> evaluate(const std::vector<GroundTruth>& truth,
                                       const std::vector<VerdictEntry>& verdicts) {
  std::map<std::string, const VerdictEntry*> by_id;
  for (const auto& v : verdicts) by_id[v.requirement_id] = &v;
  if (by_id.size() != truth.size()) {
    fail(ErrorCode::UniverseMismatch, std::to_string(truth.size()) + " ground-truth entries vs " +
                                          std::to_string(by_id.size()) + " verdicts");
  }
  std::vector<EvaluationRecord> out;
  for (const auto& g : truth) {
    auto it = by_id.find(g.requirement_id);
    if (it == by_id.end()) fail(ErrorCode::UniverseMismatch, g.requirement_id + " has no verdict");
    std::optional<WitnessResult> w;
    if (it->second->witness) w = WitnessResult{g.requirement_id, *it->second->witness, {}, 0, {}};
    out.push_back(classify(it->second->verdict, g, w));
  }
  return out;
}

}  // namespace specverify
