#include <doctest.h>

#include <algorithm>
#include <random>

#include "specverify/error.hpp"
#include "specverify/evaluation.hpp"
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

Verdict verdict(const std::string& id, VerdictStatus s) {
  Verdict v;
  v.requirement_id = id;
  v.status = s;
  switch (s) {
    case VerdictStatus::Verified: v.reason = VerdictReason::Proved; break;
    case VerdictStatus::Falsifiable:
      v.reason = VerdictReason::CounterexampleFound;
      v.counterexample = Counterexample{{}, {CounterexampleStep{}}, "x == 0"};
      break;
    case VerdictStatus::Undetermined: v.reason = VerdictReason::Timeout; break;
  }
  return v;
}

WitnessResult witness(const std::string& id, WitnessOutcome o) { return {id, o, {}, 0, {}}; }

std::vector<EvaluationRecord> table4(const std::string& tool) {
  return evaluate(load_ground_truth(svtest::fixture("table4/ground_truth.tsv")),
                  load_verdict_table(svtest::fixture("table4/" + tool + ".tsv")));
}

// Oracle: 100*num/den to `decimals` places in long double, half-up.
std::string percent_oracle(long num, long den, int decimals) {
  long double scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  long double v = static_cast<long double>(num) * 100 * scale / den;
  // Exact halves are representable, so adding 0.5 rounds them up.
  auto r = static_cast<long>(v + 0.5L);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*Lf", decimals, static_cast<long double>(r) / scale);
  return buf;
}

HoareTriple triple(std::string id, std::string pre, std::string post,
                   std::vector<Definition> defs = {}) {
  return {std::move(id), std::move(pre), std::move(defs), std::move(post), {}};
}

}  // namespace

TEST_CASE("classification examples") {
  GroundTruth f{"R-1", Truth::Falsifiable}, p{"R-1", Truth::Provable}, u{"R-1", Truth::Undetermined};
  auto fals = verdict("R-1", VerdictStatus::Falsifiable);
  auto ver = verdict("R-1", VerdictStatus::Verified);
  auto und = verdict("R-1", VerdictStatus::Undetermined);

  CHECK(classify(fals, f, witness("R-1", WitnessOutcome::Confirmed)).classification ==
        Classification::TruePositive);
  CHECK(classify(fals, p, std::nullopt).classification == Classification::FalsePositive);
  CHECK(classify(ver, f, std::nullopt).classification == Classification::FalseNegative);
  CHECK(classify(ver, p, std::nullopt).classification == Classification::TrueNegative);
  CHECK(classify(und, f, std::nullopt).classification == Classification::Inconclusive);
  CHECK(classify(std::nullopt, f, std::nullopt).classification == Classification::Inconclusive);

  // Witness evidence outranks the recorded truth, with a note.
  auto spur = classify(fals, f, witness("R-1", WitnessOutcome::Spurious));
  CHECK(spur.classification == Classification::FalsePositive);
  CHECK_FALSE(spur.note.empty());
  auto conf = classify(fals, u, witness("R-1", WitnessOutcome::Confirmed));
  CHECK(conf.classification == Classification::TruePositive);
  CHECK_FALSE(conf.note.empty());
}

TEST_CASE("classification is total") {
  std::vector<std::optional<Verdict>> verdicts = {std::nullopt};
  for (auto s : {VerdictStatus::Verified, VerdictStatus::Falsifiable, VerdictStatus::Undetermined}) {
    verdicts.push_back(verdict("R-2", s));
  }
  std::vector<std::optional<WitnessResult>> witnesses = {std::nullopt};
  for (auto o : {WitnessOutcome::Confirmed, WitnessOutcome::Spurious, WitnessOutcome::BuildFailed,
                 WitnessOutcome::InputUnmappable, WitnessOutcome::UnexpectedFailure}) {
    witnesses.push_back(witness("R-2", o));
  }
  int n = 0;
  for (const auto& v : verdicts) {
    for (auto t : {Truth::Provable, Truth::Falsifiable, Truth::Undetermined}) {
      for (const auto& w : witnesses) {
        EvaluationRecord r;
        REQUIRE_NOTHROW(r = classify(v, {"R-2", t}, w));
        // Only conclusive verdicts are ever scored.
        bool conclusive = v && v->status != VerdictStatus::Undetermined;
        bool decisive_witness = conclusive && v->status == VerdictStatus::Falsifiable && w &&
                                (w->outcome == WitnessOutcome::Confirmed ||
                                 w->outcome == WitnessOutcome::Spurious);
        CHECK((r.classification == Classification::Inconclusive) ==
              (!conclusive || (t == Truth::Undetermined && !decisive_witness)));
        ++n;
      }
    }
  }
  CHECK(n == 4 * 3 * 6);
}

TEST_CASE("mismatched ids") {
  auto v = verdict("R-1", VerdictStatus::Verified);
  CHECK(code_of([&] { classify(v, {"R-9", Truth::Provable}, std::nullopt); }) == ErrorCode::IdMismatch);
  CHECK(code_of([&] {
          classify(std::nullopt, {"R-9", Truth::Provable}, witness("R-1", WitnessOutcome::Spurious));
        }) == ErrorCode::IdMismatch);
}

TEST_CASE("percentages") {
  CHECK(format_percent(27, 58, 1) == "46.6");
  CHECK(format_percent(15, 58, 1) == "25.9");
  CHECK(format_percent(46, 58, 2) == "79.31");
  CHECK(format_percent(1, 1, 1) == "100.0");
  CHECK(format_percent(1, 8, 2) == "12.50");
  CHECK(format_percent(1, 200, 0) == "1");  // 0.5 rounds up
  for (long den = 1; den <= 120; ++den) {
    for (long num = 0; num <= den; ++num) {
      for (int d : {0, 1, 2}) {
        CAPTURE(num);
        CAPTURE(den);
        CHECK(format_percent(num, den, d) == percent_oracle(num, den, d));
      }
    }
  }
}

TEST_CASE("tabulation: single verified record") {
  GroundTruth g{"X-1", Truth::Provable};
  auto m = tabulate({classify(verdict("X-1", VerdictStatus::Verified), g, std::nullopt)});
  CHECK(m.aggregate.verified == 1);
  CHECK(m.aggregate.formed == 1);
  CHECK(m.aggregate.total == 1);
  CHECK(format_percent(m.aggregate.verified, m.aggregate.total, 1) == "100.0");
  CHECK(m.verification_rate() == doctest::Approx(100.0));
}

TEST_CASE("tabulation ignores record order") {
  auto records = table4("chatgpt_esbmc");
  auto base = tabulate(records);
  std::mt19937 rng(3);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(records.begin(), records.end(), rng);
    auto m = tabulate(records);
    REQUIRE(m.rows.size() == base.rows.size());
    for (std::size_t k = 0; k < m.rows.size(); ++k) {
      CHECK(m.rows[k].task == base.rows[k].task);
      CHECK(m.rows[k].verified == base.rows[k].verified);
      CHECK(m.rows[k].formed == base.rows[k].formed);
      CHECK(m.rows[k].total == base.rows[k].total);
    }
    CHECK(m.rate_tenths == base.rate_tenths);
    CHECK(m.fp_count == base.fp_count);
  }
}

TEST_CASE("tabulation of the LLM columns") {
  auto claude = tabulate(table4("claude_esbmc"));
  CHECK(claude.aggregate.verified == 27);
  CHECK(claude.aggregate.formed == 58);
  CHECK(claude.aggregate.total == 58);

  auto chatgpt = tabulate(table4("chatgpt_esbmc"));
  CHECK(chatgpt.aggregate.verified == 15);
  CHECK(chatgpt.aggregate.formed == 35);
  CHECK(chatgpt.aggregate.total == 58);
  CHECK(chatgpt.rate_tenths == 259);
  CHECK(chatgpt.fp_count == 8);
  CHECK(chatgpt.fn_count == 2);

  auto cocosim = tabulate(table4("cocosim"));
  CHECK(cocosim.aggregate.verified == 27);
  CHECK(cocosim.aggregate.formed == 54);
  CHECK(cocosim.fp_count == 2);
  CHECK(cocosim.fn_count == 6);

  int rows_total = 0;
  for (const auto& r : claude.rows) rows_total += r.total;
  CHECK(rows_total == 58);
}

TEST_CASE("ground truth summary") {
  auto s = summarize_truth(load_ground_truth(svtest::fixture("table4/ground_truth.tsv")));
  CHECK(s.provable == 12);
  CHECK(s.falsifiable == 17);
  CHECK(s.undetermined == 29);
  CHECK(s.total() == 58);
}

TEST_CASE("venn partition") {
  auto claude = table4("claude_esbmc");
  auto same = diff_tools(claude, claude);
  CHECK(same.only_ours.empty());
  CHECK(same.only_baseline.empty());
  CHECK(same.both.size() == 13);

  for (const char* baseline : {"cocosim", "sldv"}) {
    auto v = diff_tools(claude, table4(baseline));
    CHECK(v.only_ours == std::vector<std::string>{"REG-003", "TUI-004"});
  }

  GroundTruth ga{"A-1", Truth::Falsifiable}, gb{"B-1", Truth::Falsifiable};
  std::vector<EvaluationRecord> ours = {classify(verdict("A-1", VerdictStatus::Falsifiable), ga, std::nullopt),
                                        classify(verdict("B-1", VerdictStatus::Verified), gb, std::nullopt)};
  std::vector<EvaluationRecord> theirs = {classify(verdict("A-1", VerdictStatus::Verified), ga, std::nullopt),
                                          classify(verdict("B-1", VerdictStatus::Falsifiable), gb, std::nullopt)};
  auto d = diff_tools(ours, theirs);
  CHECK(d.both.empty());
  CHECK(d.only_ours == std::vector<std::string>{"A-1"});
  CHECK(d.only_baseline == std::vector<std::string>{"B-1"});

  theirs.pop_back();
  CHECK(code_of([&] { diff_tools(ours, theirs); }) == ErrorCode::UniverseMismatch);
}

TEST_CASE("canonical expressions") {
  CHECK(canonical_expression("a==b") == canonical_expression("b == a"));
  CHECK(canonical_expression("x > 0 && y") == canonical_expression("y && (x > 0)"));
  CHECK(canonical_expression("p || q || r") == canonical_expression("r || p || q"));
  CHECK(canonical_expression("a - b") != canonical_expression("b - a"));
  CHECK(canonical_expression("a < b") != canonical_expression("b < a"));
  // `==` under `&` is not reordered.
  CHECK(canonical_expression("a & b == c") != canonical_expression("a & c == b"));
  CHECK(canonical_expression("  f( a ,b )  ") == canonical_expression("f(a, b)"));
}

TEST_CASE("equivalence categories") {
  auto ours = triple("R-7", "enable == 1", "y == x", {{"x", "input"}});
  auto baseline = triple("R-7", "1 == enable", "x==y", {{"x", "input"}});
  CHECK(categorize_equivalence(ours, baseline, std::nullopt).category == EquivalenceCategory::LogicEquivalent);

  auto reversed = triple("R-7", "y == x", "enable == 1");
  auto r = categorize_equivalence(ours, reversed, std::nullopt);
  CHECK(r.category == EquivalenceCategory::Unreviewed);
  r = categorize_equivalence(ours, reversed,
                             EquivalenceOverride{EquivalenceCategory::SequenceReversal, "swapped"});
  CHECK(r.category == EquivalenceCategory::SequenceReversal);
  CHECK(r.note == "swapped");

  CHECK(code_of([&] { categorize_equivalence(ours, triple("R-8", "", ""), std::nullopt); }) ==
        ErrorCode::RequirementMismatch);
  CHECK(code_of([] { parse_equivalence_category("vibes"); }) == ErrorCode::UnknownCategory);
}

TEST_CASE("equivalence tally over the review file") {
  auto overrides = load_overrides(svtest::fixture("table3_overrides.tsv"));
  REQUIRE(overrides.size() == 58);
  std::vector<EquivalenceResult> results;
  for (const auto& [id, o] : overrides) {
    results.push_back(categorize_equivalence(triple(id, "", ""), triple(id, "", "z"), o));
  }
  auto t = tally_equivalence(results);
  CHECK(t.total == 58);
  CHECK(t.counts[EquivalenceCategory::LogicEquivalent] == 46);
  CHECK(format_percent(46, t.total, 2) == "79.31");
  CHECK(t.counts[EquivalenceCategory::Misunderstanding] == 2);
  CHECK(t.counts[EquivalenceCategory::LackingAssumption] == 2);
  CHECK(t.counts[EquivalenceCategory::BenchmarkSkipped] == 4);
  CHECK(t.counts[EquivalenceCategory::SequenceReversal] == 2);
  CHECK(t.counts[EquivalenceCategory::OverVerificationOurs] == 1);
  CHECK(t.counts[EquivalenceCategory::OverVerificationBaseline] == 1);
  CHECK(t.counts[EquivalenceCategory::Unreviewed] == 0);

  results.push_back(results.front());
  CHECK(code_of([&] { tally_equivalence(results); }) == ErrorCode::DuplicateId);
}

TEST_CASE("table parsers") {
  CHECK(code_of([] { parse_ground_truth("A-1\tprovable\nA-1\tfalsifiable\n"); }) == ErrorCode::DuplicateId);
  CHECK(code_of([] { parse_ground_truth("A-1\tmaybe\n"); }) == ErrorCode::MalformedDocument);
  CHECK(code_of([] { parse_ground_truth("A-1\n"); }) == ErrorCode::MalformedDocument);
  CHECK(code_of([] { parse_verdict_table("A-1\tverified\tspurious\n"); }) == ErrorCode::MalformedDocument);
  CHECK(code_of([] { parse_verdict_table("A-1\tnot_formed\tconfirmed\n"); }) == ErrorCode::MalformedDocument);

  auto rows = parse_verdict_table("# c\nA-1\tfalsifiable\tspurious\nA-2\tnot_formed\nA-3\tundetermined\ttimeout\n");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].witness == WitnessOutcome::Spurious);
  CHECK(rows[0].verdict->counterexample.has_value());
  CHECK_FALSE(rows[1].verdict);
  CHECK(rows[2].verdict->reason == VerdictReason::Timeout);

  CHECK(code_of([] { evaluate({{"A-1", Truth::Provable}}, {}); }) == ErrorCode::UniverseMismatch);
  CHECK(code_of([] {
          evaluate({{"A-1", Truth::Provable}}, parse_verdict_table("B-1\tverified\n"));
        }) == ErrorCode::UniverseMismatch);
}

TEST_CASE("task names") {
  CHECK(task_of("FSM-012") == "FSM");
  CHECK(task_of("X", {{"X", "Regulators"}}) == "Regulators");
}
