#include "specverify/formalizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "specverify/ctext.hpp"
#include "specverify/error.hpp"

namespace specverify {

namespace {

constexpr std::string_view kFormalizeSystem =
    R"(You are a formal verification engineer. Translate a natural-language requirement
for embedded C code into a Hoare-style specification over the concrete variables
of the code shown to you.

Answer with exactly these sections and nothing else:
PRE: <boolean condition over code variables under which the requirement applies>
DEF:
<name> = <meaning>      (one per line; auxiliary values or abstract-to-code mappings)
POST: <condition that must hold after the step function runs>
WHY: <short explanation>

Use identifiers exactly as they appear in the code. Do not add assumptions that
are not stated in the requirement text.)";

constexpr std::string_view kFormalizeUser =
    R"(Requirement {{requirement_id}} ({{category}}):
{{requirement_text}}

C code:
{{code_context}}
)";

constexpr std::string_view kAssertionsSystem =
    R"(You generate C assertions for a bounded model checker from a Hoare-style
specification. Assertions are written as SV_ASSERT(condition); exactly one per line.
Auxiliary state (previous-step values, event counters) must be declared at file
scope with names starting with sv_, and is updated after the assertions at the
end of the step function.

Answer with exactly these sections:
DECL:
<one C declaration per line, identifiers prefixed sv_>
ENTRY:
<statements executed at the start of the step function>
ASSERT:
<one SV_ASSERT(...); per line>
UPDATE:
<statements executed after the assertions at the end of the step function>
MODE: exit | entry | both)";

constexpr std::string_view kAssertionsUser =
    R"(Specification for requirement {{requirement_id}}:
{{triple}}

C code:
{{code_context}}
)";

const std::regex& section_header() {
  static const std::regex re(R"(^\s*(PRE|DEF|POST|WHY):\s?(.*)$)");
  return re;
}

std::string join_section(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return ctext::trim(out);
}

bool is_fence(std::string_view line) {
  auto t = ctext::trim(line);
  return ctext::starts_with(t, "```") || ctext::starts_with(t, "~~~");
}

bool code_shaped(const std::vector<std::string>& path) {
  if (path.size() > 1) return true;
  const auto& w = path.front();
  bool has_lower = false, inner_upper = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    char c = w[i];
    if (c == '_' || std::isdigit(static_cast<unsigned char>(c))) return true;
    if (std::islower(static_cast<unsigned char>(c))) has_lower = true;
    if (i > 0 && std::isupper(static_cast<unsigned char>(c))) inner_upper = true;
  }
  return has_lower && inner_upper;
}

// True when `text` is nothing but one identifier path, e.g. `rtU.airspeed[0]`.
bool is_single_path(std::string_view text) {
  auto tokens = ctext::tokenize(text);
  if (tokens.empty() || tokens.front().kind != ctext::Token::Kind::Identifier) return false;
  if (ctext::is_c_keyword(tokens.front().text)) return false;
  std::size_t i = 1;
  while (i < tokens.size()) {
    const auto& t = tokens[i].text;
    if ((t == "." || t == "->") && i + 1 < tokens.size() &&
        tokens[i + 1].kind == ctext::Token::Kind::Identifier) {
      i += 2;
    } else if (t == "[") {
      int depth = 0;
      for (; i < tokens.size(); ++i) {
        if (tokens[i].text == "[") ++depth;
        if (tokens[i].text == "]" && --depth == 0) break;
      }
      if (i == tokens.size()) return false;
      ++i;
    } else {
      return false;
    }
  }
  return true;
}

}  // namespace

PromptTemplates PromptTemplates::defaults() {
  return {std::string(kFormalizeSystem), std::string(kFormalizeUser),
          std::string(kAssertionsSystem), std::string(kAssertionsUser)};
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  auto t = defaults();
  auto override_from = [&](const char* name, std::string& field) {
    std::ifstream in(dir / (std::string(name) + ".txt"), std::ios::binary);
    if (!in) return;
    std::ostringstream ss;
    ss << in.rdbuf();
    field = ss.str();
  };
  override_from("formalize_system", t.formalize_system);
  override_from("formalize_user", t.formalize_user);
  override_from("assertions_system", t.assertions_system);
  override_from("assertions_user", t.assertions_user);
  return t;
}

std::string fill_template(std::string_view tpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tpl.size()) {
    auto open = tpl.find("{{", pos);
    if (open == std::string_view::npos) break;
    auto close = tpl.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    out.append(tpl.substr(pos, open - pos));
    std::string key(tpl.substr(open + 2, close - open - 2));
    auto it = vars.find(key);
    if (it != vars.end()) out += it->second;
    else out.append(tpl.substr(open, close + 2 - open));
    pos = close + 2;
  }
  out.append(tpl.substr(pos));
  return out;
}

HoareTriple parse_triple_response(std::string_view response, std::string requirement_id) {
  std::map<std::string, std::vector<std::string>> sections;
  std::optional<std::string> current;
  for (const auto& raw : ctext::split_lines(response).lines) {
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_fence(line)) continue;
    std::smatch m;
    if (std::regex_match(line, m, section_header())) {
      current = m[1];
      if (sections.count(*current)) {
        fail(ErrorCode::UnparseableResponse, requirement_id + ": duplicate " + *current + " section");
      }
      auto& body = sections[*current];
      if (!ctext::trim(m[2].str()).empty()) body.push_back(m[2]);
      continue;
    }
    // Text before the first section is chatter and ignored.
    if (current) sections[*current].push_back(line);
  }

  for (const char* mandatory : {"PRE", "POST"}) {
    if (!sections.count(mandatory)) {
      fail(ErrorCode::UnparseableResponse, requirement_id + ": missing " + mandatory + ": section");
    }
  }
  HoareTriple triple;
  triple.requirement_id = std::move(requirement_id);
  triple.precondition = join_section(sections["PRE"]);
  triple.postcondition = join_section(sections["POST"]);
  if (triple.precondition.empty() || triple.postcondition.empty()) {
    fail(ErrorCode::UnparseableResponse, triple.requirement_id + ": empty PRE or POST");
  }
  if (sections.count("WHY")) triple.rationale = join_section(sections["WHY"]);
  if (sections.count("DEF")) {
    for (auto& line : sections["DEF"]) {
      auto t = ctext::trim(line);
      if (t.empty()) continue;
      if (ctext::starts_with(t, "- ")) t = ctext::trim(t.substr(2));
      auto eq = t.find('=');
      if (eq == std::string::npos) {
        fail(ErrorCode::UnparseableResponse, triple.requirement_id + ": DEF line without '=': " + t);
      }
      Definition d{ctext::trim(t.substr(0, eq)), ctext::trim(t.substr(eq + 1))};
      if (!ctext::is_identifier(d.name) || d.meaning.empty()) {
        fail(ErrorCode::UnparseableResponse, triple.requirement_id + ": malformed DEF line: " + t);
      }
      triple.definitions.push_back(std::move(d));
    }
  }
  return triple;
}

std::vector<VariableMapping> extract_mappings(const HoareTriple& triple) {
  std::vector<VariableMapping> out;
  for (const auto& d : triple.definitions) {
    if (is_single_path(d.meaning)) out.push_back({d.name, d.meaning, {}});
  }
  return out;
}

void validate_triple(const HoareTriple& triple, std::string_view code_context) {
  std::set<std::string> defined;
  for (const auto& d : triple.definitions) defined.insert(d.name);

  for (const auto& m : extract_mappings(triple)) {
    for (const auto& path : ctext::identifier_paths(m.concrete_name)) {
      for (const auto& part : path) {
        if (!ctext::contains_word(code_context, part)) {
          fail(ErrorCode::UnmappedVariable, triple.requirement_id + ": '" + m.abstract_name +
                                                "' maps to '" + m.concrete_name +
                                                "', but '" + part + "' is not in the code");
        }
      }
    }
  }
  for (const auto* text : {&triple.precondition, &triple.postcondition}) {
    for (const auto& path : ctext::identifier_paths(*text)) {
      if (ctext::is_c_keyword(path.front()) || !code_shaped(path)) continue;
      for (std::size_t i = 0; i < path.size(); ++i) {
        bool known = ctext::contains_word(code_context, path[i]) ||
                     (i == 0 && defined.count(path[i]));
        if (!known) {
          fail(ErrorCode::UnmappedVariable, triple.requirement_id + ": '" + path[i] +
                                                "' is neither in the code nor defined");
        }
      }
    }
  }
}

PromptExchange formalize_prompt(const Requirement& req, std::string_view code_context,
                                const PromptTemplates& templates) {
  std::map<std::string, std::string> vars{
      {"requirement_id", req.id},
      {"category", std::string(to_string(req.category))},
      {"requirement_text", req.text},
      {"code_context", std::string(code_context)},
  };
  return PromptExchange::make(Stage::Formalize, fill_template(templates.formalize_system, vars),
                              fill_template(templates.formalize_user, vars), req.id);
}

HoareTriple formalize(const Requirement& req, std::string_view code_context, Gateway& gateway,
                      const PromptTemplates& templates) {
  require(!ctext::trim(code_context).empty(), req.id + ": empty code context");
  auto done = gateway.complete(formalize_prompt(req, code_context, templates));
  auto triple = parse_triple_response(done.response_text, req.id);
  validate_triple(triple, code_context);
  return triple;
}

std::string render_for_review(const HoareTriple& triple, std::string_view requirement_text) {
  std::ostringstream out;
  out << "# Specification " << triple.requirement_id << "\n\n";
  out << "## Requirement\n\n";
  if (requirement_text.empty()) {
    out << "> (requirement text not supplied)\n";
  } else {
    for (auto& line : ctext::split_lines(requirement_text).lines) {
      out << (line.empty() ? ">" : "> " + line) << '\n';
    }
  }
  out << "\n## Precondition\n\n~~~c\n" << triple.precondition << "\n~~~\n";
  out << "\n## Definitions\n\n";
  if (triple.definitions.empty()) {
    out << "(no auxiliary definitions)\n";
  } else {
    for (const auto& d : triple.definitions) out << "- `" << d.name << "` = " << d.meaning << '\n';
  }
  out << "\n## Postcondition\n\n~~~c\n" << triple.postcondition << "\n~~~\n";
  out << "\n## Rationale\n\n~~~text\n";
  if (!triple.rationale.empty()) out << triple.rationale << '\n';
  out << "~~~\n";
  return out.str();
}

HoareTriple parse_review_document(std::string_view document) {
  HoareTriple triple;
  const auto lines = ctext::split_lines(document).lines;
  std::string section;
  bool saw_id = false;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (ctext::starts_with(line, "# Specification ")) {
      triple.requirement_id = ctext::trim(line.substr(16));
      saw_id = true;
      continue;
    }
    if (ctext::starts_with(line, "## ")) {
      section = ctext::trim(line.substr(3));
      seen.insert(section);
      continue;
    }
    if (ctext::starts_with(line, "~~~")) {
      std::vector<std::string> block;
      std::size_t j = i + 1;
      for (; j < lines.size() && lines[j] != "~~~"; ++j) block.push_back(lines[j]);
      if (j == lines.size()) fail(ErrorCode::UnparseableResponse, "unterminated block in " + section);
      std::string text;
      for (std::size_t k = 0; k < block.size(); ++k) text += (k ? "\n" : "") + block[k];
      if (section == "Precondition") triple.precondition = text;
      else if (section == "Postcondition") triple.postcondition = text;
      else if (section == "Rationale") triple.rationale = text;
      i = j;
      continue;
    }
    if (section == "Definitions" && ctext::starts_with(line, "- `")) {
      auto close = line.find("` = ", 3);
      if (close == std::string::npos) fail(ErrorCode::UnparseableResponse, "bad definition: " + line);
      triple.definitions.push_back({line.substr(3, close - 3), line.substr(close + 4)});
    }
  }
  if (!saw_id || !seen.count("Precondition") || !seen.count("Postcondition")) {
    fail(ErrorCode::UnparseableResponse, "review document lacks id, precondition or postcondition");
  }
  return triple;
}

}  // namespace specverify
