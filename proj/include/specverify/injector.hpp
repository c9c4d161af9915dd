#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "specverify/ctext.hpp"
#include "specverify/formalizer.hpp"
#include "specverify/llm_gateway.hpp"

namespace specverify {

enum class InsertionMode { EntryOfStep, ExitOfStep, BothEntryExit };

std::string_view to_string(InsertionMode m) noexcept;

struct AnchorSpec {
  /// Exact function name; empty selects the unique function ending in `step_suffix`.
  std::string step_function_name;
  InsertionMode insertion_mode = InsertionMode::ExitOfStep;
  std::string step_suffix = "_step";
};

struct AssertionPlan {
  std::string requirement_id;
  std::vector<std::string> aux_declarations;      ///< file scope, `sv_` identifiers only
  std::vector<std::string> pre_step_statements;   ///< at step entry
  std::vector<std::string> post_step_assertions;  ///< one SV_ASSERT(...) each
  std::vector<std::string> post_step_updates;     ///< history updates, after the assertions
  AnchorSpec anchor;
};

struct InstrumentedUnit {
  std::filesystem::path original_path;
  std::string instrumented_text;
  AssertionPlan plan;
  /// 1-based (original_line, instrumented_line) for every original line.
  std::vector<std::pair<std::size_t, std::size_t>> line_map;
};

/// Every line added by `inject` ends with this marker.
inline constexpr std::string_view kInjectedMarker = "/* sv:injected */";

/// Response grammar: sections `DECL:`, `ENTRY:`, `ASSERT:`, `UPDATE:` with one
/// item per line, plus optional `MODE: exit|entry|both` and `STEP: <name>`.
AssertionPlan parse_plan_response(std::string_view response, std::string requirement_id);

/// Throws IdentifierUnknown, MultipleAssertionsPerStatement or UnparseableResponse.
void validate_plan(const AssertionPlan& plan, std::string_view code_context);

/// The triple in the stage-1 response grammar, as fed to the stage-2 prompt.
std::string triple_prompt_text(const HoareTriple& triple);

PromptExchange assertions_prompt(const HoareTriple& triple, std::string_view code_context,
                                 const PromptTemplates& templates);

AssertionPlan synthesize_plan(const HoareTriple& triple, std::string_view code_context,
                              Gateway& gateway,
                              const PromptTemplates& templates = PromptTemplates::defaults());

/// Throws AnchorNotFound / AnchorAmbiguous.
ctext::FunctionDef resolve_anchor(std::string_view unit_text, const AnchorSpec& anchor);

InstrumentedUnit inject(std::string_view unit_text, const AssertionPlan& plan,
                        std::filesystem::path original_path = {});

/// Exact original text, reconstructed from the line map.
std::string strip(const InstrumentedUnit& unit);

/// Drops every line carrying the injection marker. Idempotent.
std::string strip_markers(std::string_view text);

/// Contents of `sv_assert.h`: the verifier intrinsic by default, a
/// print-and-abort reporting `SV_FAIL:<id>:<condition>` under SV_WITNESS_BUILD.
std::string sv_assert_header();

/// Externally visible shape of a generated unit. Inputs follow the Embedded
/// Coder convention (`rtU` or `<model>_U`), outputs likewise (`rtY`, `<model>_Y`).
struct UnitInterface {
  std::string step_function;
  std::optional<std::string> init_function;
  std::vector<ctext::Declarator> inputs;
  std::vector<ctext::Declarator> outputs;
  std::vector<ctext::Declarator> state;  ///< other non-static globals
};

bool is_input_root(std::string_view name);
bool is_output_root(std::string_view name);
UnitInterface analyze_unit(std::string_view unit_text, const AnchorSpec& anchor);

}  // namespace specverify
