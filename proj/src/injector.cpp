#include "specverify/injector.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "specverify/error.hpp"

namespace specverify {

namespace {

constexpr std::array<std::string_view, 5> kAssertionCalls = {
    "SV_ASSERT", "assert", "__ESBMC_assert", "__VERIFIER_assert", "__CPROVER_assert"};

// Library names an assertion may use without the unit mentioning them.
constexpr std::array<std::string_view, 30> kBuiltins = {
    "fabs",     "fabsf",       "fmin",        "fminf",   "fmax",    "fmaxf",
    "sqrt",     "sqrtf",       "isnan",       "isinf",   "isfinite", "INFINITY",
    "NAN",      "FLT_EPSILON", "DBL_EPSILON", "FLT_MAX", "DBL_MAX", "FLT_MIN",
    "DBL_MIN",  "INT_MAX",     "INT_MIN",     "UINT_MAX", "true",   "false",
    "NULL",     "abs",         "labs",        "floor",   "ceil",    "SV_ASSERT"};

std::size_t count_assertion_calls(std::string_view stmt) {
  auto tokens = ctext::tokenize(stmt);
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i].kind == ctext::Token::Kind::Identifier && tokens[i + 1].text == "(" &&
        std::find(kAssertionCalls.begin(), kAssertionCalls.end(), tokens[i].text) !=
            kAssertionCalls.end()) {
      ++n;
    }
  }
  return n;
}

std::string leading_ws(std::string_view line) {
  std::size_t n = 0;
  while (n < line.size() && (line[n] == ' ' || line[n] == '\t')) ++n;
  return std::string(line.substr(0, n));
}

bool blank(std::string_view s) { return ctext::trim(s).empty(); }

std::string marked(std::string_view indent, std::string_view text) {
  return std::string(indent) + std::string(text) + " " + std::string(kInjectedMarker);
}

char prev_significant(std::string_view masked, std::size_t pos) {
  while (pos > 0) {
    --pos;
    char c = masked[pos];
    if (!std::isspace(static_cast<unsigned char>(c))) return c;
  }
  return '\0';
}

}  // namespace

std::string_view to_string(InsertionMode m) noexcept {
  switch (m) {
    case InsertionMode::EntryOfStep: return "entry";
    case InsertionMode::ExitOfStep: return "exit";
    case InsertionMode::BothEntryExit: return "both";
  }
  return "exit";
}

AssertionPlan parse_plan_response(std::string_view response, std::string requirement_id) {
  static const std::regex kHeader(R"(^\s*(DECL|ENTRY|ASSERT|UPDATE|MODE|STEP):\s?(.*)$)");
  AssertionPlan plan;
  plan.requirement_id = std::move(requirement_id);
  std::map<std::string, std::vector<std::string>> sections;
  std::optional<std::string> current;
  for (const auto& raw : ctext::split_lines(response).lines) {
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto t = ctext::trim(line);
    if (ctext::starts_with(t, "```") || ctext::starts_with(t, "~~~")) continue;
    std::smatch m;
    if (std::regex_match(line, m, kHeader)) {
      current = m[1];
      if (sections.count(*current)) {
        fail(ErrorCode::UnparseableResponse, plan.requirement_id + ": duplicate " + *current + " section");
      }
      sections[*current];
      auto rest = ctext::trim(m[2].str());
      if (!rest.empty()) sections[*current].push_back(rest);
      continue;
    }
    if (!current || t.empty() || t == "(none)") continue;
    sections[*current].push_back(t);
  }
  if (!sections.count("ASSERT") || sections["ASSERT"].empty()) {
    fail(ErrorCode::UnparseableResponse, plan.requirement_id + ": no ASSERT section");
  }
  plan.aux_declarations = sections["DECL"];
  plan.pre_step_statements = sections["ENTRY"];
  plan.post_step_assertions = sections["ASSERT"];
  plan.post_step_updates = sections["UPDATE"];
  if (sections.count("MODE") && !sections["MODE"].empty()) {
    const auto& mode = sections["MODE"].front();
    if (mode == "exit") plan.anchor.insertion_mode = InsertionMode::ExitOfStep;
    else if (mode == "entry") plan.anchor.insertion_mode = InsertionMode::EntryOfStep;
    else if (mode == "both") plan.anchor.insertion_mode = InsertionMode::BothEntryExit;
    else fail(ErrorCode::UnparseableResponse, plan.requirement_id + ": unknown MODE '" + mode + "'");
  }
  if (sections.count("STEP") && !sections["STEP"].empty()) {
    plan.anchor.step_function_name = sections["STEP"].front();
  }
  return plan;
}

void validate_plan(const AssertionPlan& plan, std::string_view code_context) {
  const auto& id = plan.requirement_id;
  std::set<std::string> declared;
  for (const auto& decl : plan.aux_declarations) {
    auto body = ctext::trim(decl);
    if (!body.empty() && body.back() == ';') body.pop_back();
    auto declarators = ctext::parse_declaration(body);
    if (declarators.empty()) fail(ErrorCode::UnparseableResponse, id + ": not a declaration: " + decl);
    for (const auto& d : declarators) {
      if (!ctext::starts_with(d.name, "sv_")) {
        fail(ErrorCode::UnparseableResponse,
             id + ": auxiliary identifier '" + d.name + "' must start with sv_");
      }
      declared.insert(d.name);
    }
  }

  auto check_identifiers = [&](std::string_view stmt) {
    for (const auto& word : ctext::identifiers(stmt)) {
      if (ctext::is_c_keyword(word) || declared.count(word)) continue;
      if (std::find(kBuiltins.begin(), kBuiltins.end(), word) != kBuiltins.end()) continue;
      if (!ctext::contains_word(code_context, word)) {
        fail(ErrorCode::IdentifierUnknown, id + ": '" + word + "' in `" + std::string(stmt) +
                                               "` is neither in the code nor declared");
      }
    }
  };

  for (const auto& a : plan.post_step_assertions) {
    auto calls = count_assertion_calls(a);
    if (calls > 1) fail(ErrorCode::MultipleAssertionsPerStatement, id + ": " + a);
    auto t = ctext::trim(a);
    if (calls == 0 || !ctext::starts_with(t, "SV_ASSERT") || t.back() != ';') {
      fail(ErrorCode::UnparseableResponse, id + ": expected `SV_ASSERT(condition);`, got " + a);
    }
    check_identifiers(a);
  }
  for (const auto* group : {&plan.pre_step_statements, &plan.post_step_updates}) {
    for (const auto& s : *group) {
      if (count_assertion_calls(s) != 0) {
        fail(ErrorCode::UnparseableResponse, id + ": assertion outside ASSERT section: " + s);
      }
      check_identifiers(s);
    }
  }
}

std::string triple_prompt_text(const HoareTriple& triple) {
  std::ostringstream out;
  out << "PRE: " << triple.precondition << '\n';
  out << "DEF:\n";
  for (const auto& d : triple.definitions) out << d.name << " = " << d.meaning << '\n';
  out << "POST: " << triple.postcondition << '\n';
  return out.str();
}

PromptExchange assertions_prompt(const HoareTriple& triple, std::string_view code_context,
                                 const PromptTemplates& templates) {
  std::map<std::string, std::string> vars{
      {"requirement_id", triple.requirement_id},
      {"triple", triple_prompt_text(triple)},
      {"code_context", std::string(code_context)},
  };
  return PromptExchange::make(Stage::SynthesizeAssertions,
                              fill_template(templates.assertions_system, vars),
                              fill_template(templates.assertions_user, vars), triple.requirement_id);
}

AssertionPlan synthesize_plan(const HoareTriple& triple, std::string_view code_context,
                              Gateway& gateway, const PromptTemplates& templates) {
  auto done = gateway.complete(assertions_prompt(triple, code_context, templates));
  auto plan = parse_plan_response(done.response_text, triple.requirement_id);
  validate_plan(plan, code_context);
  return plan;
}

ctext::FunctionDef resolve_anchor(std::string_view unit_text, const AnchorSpec& anchor) {
  std::vector<ctext::FunctionDef> matches;
  for (auto& f : ctext::find_functions(unit_text)) {
    bool hit = anchor.step_function_name.empty() ? ctext::ends_with(f.name, anchor.step_suffix)
                                                 : f.name == anchor.step_function_name;
    if (hit) matches.push_back(f);
  }
  const std::string what = anchor.step_function_name.empty()
                               ? "function ending in '" + anchor.step_suffix + "'"
                               : "function '" + anchor.step_function_name + "'";
  if (matches.empty()) fail(ErrorCode::AnchorNotFound, "no " + what);
  if (matches.size() > 1) {
    std::string names;
    for (auto& m : matches) names += (names.empty() ? "" : ", ") + m.name;
    fail(ErrorCode::AnchorAmbiguous, what + " matches " + names);
  }
  return matches.front();
}

InstrumentedUnit inject(std::string_view unit_text, const AssertionPlan& plan,
                        std::filesystem::path original_path) {
  if (plan.aux_declarations.empty() && plan.pre_step_statements.empty() &&
      plan.post_step_assertions.empty() && plan.post_step_updates.empty()) {
    InstrumentedUnit out{std::move(original_path), std::string(unit_text), plan, {}};
    const auto n = ctext::split_lines(unit_text).lines.size();
    for (std::size_t i = 1; i <= n; ++i) out.line_map.emplace_back(i, i);
    return out;
  }
  const auto fn = resolve_anchor(unit_text, plan.anchor);
  const std::string masked = ctext::mask_comments(unit_text);
  const auto lines = ctext::split_lines(unit_text);
  const auto masked_lines = ctext::split_lines(masked);
  const auto mode = plan.anchor.insertion_mode;
  const bool assert_entry = mode != InsertionMode::ExitOfStep;
  const bool assert_exit = mode != InsertionMode::EntryOfStep;

  // Lines to insert before original line index (0-based).
  std::map<std::size_t, std::vector<std::string>> before;

  // File scope: after the last #include.
  std::size_t file_scope_at = 0;
  for (std::size_t i = 0; i < masked_lines.lines.size(); ++i) {
    auto t = ctext::trim(masked_lines.lines[i]);
    if (ctext::starts_with(t, "#") && ctext::trim(t.substr(1)).rfind("include", 0) == 0) {
      file_scope_at = i + 1;
    }
  }
  {
    auto& block = before[file_scope_at];
    if (!plan.requirement_id.empty()) {
      block.push_back(marked("", "#define SV_REQUIREMENT_ID \"" + plan.requirement_id + "\""));
    }
    block.push_back(marked("", "#include \"sv_assert.h\""));
  }
  // Auxiliary state goes right above the step function so unit typedefs are in scope.
  for (const auto& d : plan.aux_declarations) {
    before[ctext::line_of(unit_text, fn.begin)].push_back(marked("", d));
  }

  const std::size_t open_line = ctext::line_of(unit_text, fn.open_brace);
  const std::size_t close_line = ctext::line_of(unit_text, fn.close_brace);
  {
    auto after_brace = masked.substr(fn.open_brace + 1,
                                     masked.find('\n', fn.open_brace) == std::string::npos
                                         ? std::string::npos
                                         : masked.find('\n', fn.open_brace) - fn.open_brace - 1);
    if (!blank(after_brace)) {
      fail(ErrorCode::InjectionUnsupported, fn.name + ": code follows the opening brace on its line");
    }
    auto close_line_text = masked_lines.lines[close_line];
    auto col = fn.close_brace - (masked.rfind('\n', fn.close_brace) == std::string::npos
                                     ? 0
                                     : masked.rfind('\n', fn.close_brace) + 1);
    if (!blank(close_line_text.substr(0, col)) || open_line == close_line) {
      fail(ErrorCode::InjectionUnsupported, fn.name + ": closing brace must start its own line");
    }
  }

  std::string body_indent;
  for (std::size_t i = open_line + 1; i < close_line; ++i) {
    if (!blank(masked_lines.lines[i])) {
      body_indent = leading_ws(lines.lines[i]);
      break;
    }
  }
  if (body_indent.empty()) body_indent = leading_ws(lines.lines[open_line]) + "  ";

  std::vector<std::string> entry_block;
  for (const auto& s : plan.pre_step_statements) entry_block.push_back(s);
  if (assert_entry) {
    for (const auto& a : plan.post_step_assertions) entry_block.push_back(a);
  }
  if (!entry_block.empty()) {
    auto& block = before[open_line + 1];
    for (const auto& s : entry_block) block.push_back(marked(body_indent, s));
  }

  std::vector<std::string> exit_block;
  if (assert_exit) {
    for (const auto& a : plan.post_step_assertions) exit_block.push_back(a);
  }
  for (const auto& u : plan.post_step_updates) exit_block.push_back(u);

  if (!exit_block.empty()) {
    // Every `return` inside the step body.
    bool ends_with_return = false;
    std::size_t pos = fn.open_brace + 1;
    while (true) {
      auto hit = masked.find("return", pos);
      if (hit == std::string::npos || hit >= fn.close_brace) break;
      pos = hit + 6;
      bool word = (hit == 0 || !(std::isalnum(static_cast<unsigned char>(masked[hit - 1])) ||
                                 masked[hit - 1] == '_')) &&
                  !(std::isalnum(static_cast<unsigned char>(masked[hit + 6])) ||
                    masked[hit + 6] == '_');
      if (!word) continue;
      std::size_t line = ctext::line_of(unit_text, hit);
      std::size_t line_start = masked.rfind('\n', hit);
      line_start = line_start == std::string::npos ? 0 : line_start + 1;
      char prev = prev_significant(masked, hit);
      if (!blank(masked.substr(line_start, hit - line_start)) ||
          !(prev == ';' || prev == '{' || prev == '}')) {
        fail(ErrorCode::InjectionUnsupported,
             fn.name + ": return on line " + std::to_string(line + 1) +
                 " is not a standalone statement");
      }
      auto& block = before[line];
      auto indent = leading_ws(lines.lines[line]);
      for (const auto& s : exit_block) block.push_back(marked(indent, s));
      // Is this the final statement of the body?
      auto semi = masked.find(';', hit);
      if (semi != std::string::npos && prev_significant(masked, fn.close_brace) == ';' &&
          masked.find(';', semi + 1) > fn.close_brace) {
        ends_with_return = true;
      }
    }
    if (fn.returns_void && !ends_with_return) {
      auto& block = before[close_line];
      for (const auto& s : exit_block) block.push_back(marked(body_indent, s));
    }
  }

  InstrumentedUnit out;
  out.original_path = std::move(original_path);
  out.plan = plan;
  ctext::Lines result;
  result.trailing_newline = lines.trailing_newline;
  for (std::size_t i = 0; i <= lines.lines.size(); ++i) {
    if (auto it = before.find(i); it != before.end()) {
      for (const auto& l : it->second) result.lines.push_back(l);
    }
    if (i == lines.lines.size()) break;
    result.lines.push_back(lines.lines[i]);
    out.line_map.emplace_back(i + 1, result.lines.size());
  }
  if (!lines.trailing_newline && before.count(lines.lines.size())) {
    fail(ErrorCode::InjectionUnsupported, "insertion after an unterminated final line");
  }
  out.instrumented_text = ctext::join_lines(result);
  return out;
}

std::string strip(const InstrumentedUnit& unit) {
  const auto lines = ctext::split_lines(unit.instrumented_text);
  ctext::Lines original;
  original.trailing_newline = lines.trailing_newline;
  for (const auto& [orig, inst] : unit.line_map) {
    (void)orig;
    original.lines.push_back(lines.lines.at(inst - 1));
  }
  return ctext::join_lines(original);
}

std::string strip_markers(std::string_view text) {
  auto lines = ctext::split_lines(text);
  ctext::Lines kept;
  kept.trailing_newline = lines.trailing_newline;
  for (auto& l : lines.lines) {
    if (!ctext::ends_with(l, kInjectedMarker)) kept.lines.push_back(std::move(l));
  }
  return ctext::join_lines(kept);
}

std::string sv_assert_header() {
  return R"(/* Assertion shim for instrumented units.
 *
 * Default: the bounded model checker's assertion intrinsic.
 * SV_WITNESS_BUILD: print SV_FAIL:<requirement>:<condition> and abort.
 * SV_PLAIN_ASSERT: <assert.h>.
 * SV_COUNT_EVALUATIONS: count every evaluated assertion in sv_assert_evaluations.
 */
#ifndef SV_ASSERT_H
#define SV_ASSERT_H

#ifndef SV_REQUIREMENT_ID
#define SV_REQUIREMENT_ID "unknown"
#endif

#ifdef SV_COUNT_EVALUATIONS
extern unsigned long sv_assert_evaluations;
#define SV_COUNT_EVALUATION() (++sv_assert_evaluations)
#else
#define SV_COUNT_EVALUATION() ((void)0)
#endif

#if defined(SV_WITNESS_BUILD)
#include <stdio.h>
#include <stdlib.h>
#define SV_ASSERT(cond)                                                      \
  do {                                                                       \
    SV_COUNT_EVALUATION();                                                   \
    if (!(cond)) {                                                           \
      fprintf(stderr, "SV_FAIL:%s:%s\n", SV_REQUIREMENT_ID, #cond);          \
      fflush(stderr);                                                        \
      abort();                                                               \
    }                                                                        \
  } while (0)
#elif defined(SV_PLAIN_ASSERT)
#include <assert.h>
#define SV_ASSERT(cond)                                                      \
  do {                                                                       \
    SV_COUNT_EVALUATION();                                                   \
    assert(cond);                                                            \
  } while (0)
#else
void __ESBMC_assert(_Bool cond, const char *reason);
#define SV_ASSERT(cond) __ESBMC_assert((cond), "SV_FAIL:" SV_REQUIREMENT_ID ":" #cond)
#endif

#endif
)";
}

bool is_input_root(std::string_view name) {
  return name == "rtU" || (name.size() > 2 && ctext::ends_with(name, "_U"));
}

bool is_output_root(std::string_view name) {
  return name == "rtY" || (name.size() > 2 && ctext::ends_with(name, "_Y"));
}

UnitInterface analyze_unit(std::string_view unit_text, const AnchorSpec& anchor) {
  UnitInterface iface;
  iface.step_function = resolve_anchor(unit_text, anchor).name;
  std::vector<std::string> inits;
  for (const auto& f : ctext::find_functions(unit_text)) {
    if (ctext::ends_with(f.name, "_initialize") || ctext::ends_with(f.name, "_init")) {
      inits.push_back(f.name);
    }
  }
  if (inits.size() == 1) iface.init_function = inits.front();
  for (auto& g : ctext::global_variables(unit_text)) {
    if (g.is_static || g.is_const) continue;
    if (is_input_root(g.name)) iface.inputs.push_back(g);
    else if (is_output_root(g.name)) iface.outputs.push_back(g);
    else iface.state.push_back(g);
  }
  return iface;
}

}  // namespace specverify
