#include <doctest.h>

#include "specverify/ctext.hpp"
#include "specverify/error.hpp"
#include "specverify/requirements.hpp"
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

// Count of lines, independent of the library's splitter.
std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("single entry document") {
  auto set = parse_requirement_set(
      "[REQ REG-001]\ncategory: FiniteStateControl\ncode: reg.c\n  The counter shall reset.\n");
  REQUIRE(set.requirements.size() == 1);
  CHECK(set.requirements[0].id == "REG-001");
  CHECK(set.requirements[0].category == Category::FiniteStateControl);
  CHECK(set.requirements[0].text == "The counter shall reset.");
  CHECK(set.task == "REG");
}

TEST_CASE("duplicate ids are rejected") {
  const char* doc =
      "[REQ REG-001]\ncategory: Navigation\ncode: a.c\n  one\n\n"
      "[REQ REG-001]\ncategory: Navigation\ncode: a.c\n  two\n";
  CHECK(code_of([&] { parse_requirement_set(doc); }) == ErrorCode::DuplicateId);
}

TEST_CASE("unknown category and missing keys") {
  CHECK(code_of([] { parse_requirement_set("[REQ X-1]\ncategory: Avionics\ncode: a.c\n  t\n"); }) ==
        ErrorCode::UnknownCategory);
  CHECK(code_of([] { parse_requirement_set("[REQ X-1]\ncode: a.c\n  t\n"); }) ==
        ErrorCode::MalformedDocument);
  CHECK(code_of([] { parse_requirement_set("[REQ X-1]\ncategory: Navigation\n  t\n"); }) ==
        ErrorCode::MalformedDocument);
  CHECK(code_of([] { parse_requirement_set(""); }) == ErrorCode::MalformedDocument);
}

TEST_CASE("ten-requirement task document") {
  std::string doc = "task: REG\nlines_of_code: 251\nblock_count: 40\n\n";
  for (int i = 1; i <= 10; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "REG-%03d", i);
    doc += std::string("[REQ ") + id + "]\ncategory: FiniteStateControl\ncode: regulator.c\n  Requirement " +
           std::to_string(i) + ".\n\n";
  }
  auto set = parse_requirement_set(doc, svtest::fixture("units"));
  CHECK(set.requirements.size() == 10);
  CHECK(set.code_metadata.lines_of_code == 251);
  CHECK(set.code_metadata.block_count == 40);
  CHECK_NOTHROW(check_sources(set));

  // Round trip through the serializer.
  auto again = parse_requirement_set(serialize_requirement_set(set), svtest::fixture("units"));
  CHECK(again.requirements == set.requirements);
  CHECK(again.code_metadata == set.code_metadata);
}

TEST_CASE("missing source unit") {
  auto set = parse_requirement_set("[REQ A-1]\ncategory: Navigation\ncode: nowhere.c\n  t\n",
                                   svtest::fixture("units"));
  CHECK(code_of([&] { check_sources(set); }) == ErrorCode::SourceMissing);
}

TEST_CASE("fixture e2e document loads") {
  auto set = load_requirement_set(svtest::fixture("e2e/requirements.txt"));
  CHECK(set.task == "REG");
  CHECK(set.requirements.size() == 6);
  CHECK_NOTHROW(check_sources(set));
  CHECK(set.find("REG-005")->category == Category::Navigation);
  CHECK(set.find("REG-999") == nullptr);
}

TEST_CASE("41-line unit fits whole") {
  auto unit = svtest::fixture_text("units/ratelim.c");
  REQUIRE(count_lines(unit) == 41);
  CHECK(slice_code_text(unit, 100000) == unit);
}

TEST_CASE("zero budget is a contract error") {
  CHECK(code_of([] { slice_code_text("int x;\n", 0); }) == ErrorCode::ContractViolation);
}

TEST_CASE("251-line unit under a small budget") {
  auto unit = svtest::fixture_text("units/regulator.c");
  REQUIRE(count_lines(unit) == 251);
  const std::size_t full = (unit.size() + 3) / 4;
  for (std::size_t budget : {full / 2, full / 3, std::size_t{420}}) {
    CAPTURE(budget);
    auto excerpt = slice_code_text(unit, budget);
    // Independent token count: ceil(chars / 4).
    CHECK((excerpt.size() + 3) / 4 <= budget);
    CHECK(excerpt.find("void regulator_step(void)") != std::string::npos);
    CHECK(excerpt.find("} ExtU;") != std::string::npos);
    CHECK(excerpt.size() < unit.size());
  }
  CHECK(code_of([&] { slice_code_text(unit, 20); }) == ErrorCode::BudgetTooSmall);
}

TEST_CASE("estimate_tokens rounds up") {
  CHECK(estimate_tokens("") == 0);
  CHECK(estimate_tokens("abc") == 1);
  CHECK(estimate_tokens("abcd") == 1);
  CHECK(estimate_tokens("abcde") == 2);
}

TEST_CASE("ctext: comments, identifiers and functions") {
  const std::string src = "/* a { */\nint f(void)\n{\n  return 1; // }\n}\n";
  auto masked = ctext::mask_comments(src);
  CHECK(masked.size() == src.size());
  CHECK(masked.find('{') == src.find("{\n  return"));
  auto fns = ctext::find_functions(src);
  REQUIRE(fns.size() == 1);
  CHECK(fns[0].name == "f");
  CHECK_FALSE(fns[0].returns_void);
  CHECK(ctext::line_of(src, fns[0].close_brace) == 4);

  auto paths = ctext::identifier_paths("rtDW.Delay1_DSTATE[2] == 0 && rtY.sel_val > x");
  REQUIRE(paths.size() == 3);
  CHECK(paths[0] == std::vector<std::string>{"rtDW", "Delay1_DSTATE"});
  CHECK(paths[1] == std::vector<std::string>{"rtY", "sel_val"});
  CHECK(ctext::contains_word("a rtU.ia b", "ia"));
  CHECK_FALSE(ctext::contains_word("ia_x", "ia"));
}

TEST_CASE("ctext: globals of a generated unit") {
  auto globals = ctext::global_variables(svtest::fixture_text("units/medsel_mean.c"));
  std::vector<std::string> names;
  for (const auto& g : globals) names.push_back(g.name);
  CHECK(names == std::vector<std::string>{"rtU", "rtY", "rtDW", "rtP_miscompare"});
  CHECK(globals[3].is_static);
  CHECK(globals[3].is_const);
  auto fields = ctext::struct_fields(svtest::fixture_text("units/medsel_mean.c"), "DW");
  REQUIRE(fields);
  REQUIRE(fields->size() == 1);
  CHECK((*fields)[0].array_suffix == "[3]");
}
