#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "specverify/llm_gateway.hpp"
#include "specverify/requirements.hpp"

namespace specverify {

struct Definition {
  std::string name;
  std::string meaning;

  bool operator==(const Definition&) const = default;
};

/// Precondition / definitions / postcondition over concrete code variables.
struct HoareTriple {
  std::string requirement_id;
  std::string precondition;
  std::vector<Definition> definitions;
  std::string postcondition;
  std::string rationale;

  bool operator==(const HoareTriple&) const = default;
};

struct VariableMapping {
  std::string abstract_name;
  std::string concrete_name;
  std::string justification;
};

/// Prompt text is configuration. Placeholders use `{{name}}`.
struct PromptTemplates {
  std::string formalize_system;
  std::string formalize_user;
  std::string assertions_system;
  std::string assertions_user;

  static PromptTemplates defaults();
  /// Files named `<field>.txt` in `dir` replace the matching default.
  static PromptTemplates load(const std::filesystem::path& dir);
};

std::string fill_template(std::string_view tpl, const std::map<std::string, std::string>& vars);

/// Response grammar: sections headed `PRE:`, `DEF:` (`name = meaning` per
/// line), `POST:`, `WHY:`. Code fences are ignored; PRE and POST are mandatory.
HoareTriple parse_triple_response(std::string_view response, std::string requirement_id);

/// DEF entries whose meaning is a bare identifier path map an abstract name to code.
std::vector<VariableMapping> extract_mappings(const HoareTriple& triple);

/// Code-shaped identifiers (containing `_`, digits, camel case, or member
/// access) must occur in the code context or be defined. Throws UnmappedVariable.
void validate_triple(const HoareTriple& triple, std::string_view code_context);

PromptExchange formalize_prompt(const Requirement& req, std::string_view code_context,
                                const PromptTemplates& templates);

HoareTriple formalize(const Requirement& req, std::string_view code_context, Gateway& gateway,
                      const PromptTemplates& templates = PromptTemplates::defaults());

std::string render_for_review(const HoareTriple& triple, std::string_view requirement_text = {});
HoareTriple parse_review_document(std::string_view document);

}  // namespace specverify
