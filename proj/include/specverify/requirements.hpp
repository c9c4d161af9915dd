#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace specverify {

enum class Category { SignalProcessing, FiniteStateControl, Navigation, SystemIntegration };

std::string_view to_string(Category c) noexcept;
Category parse_category(std::string_view name);  // throws UnknownCategory

struct Requirement {
  std::string id;
  Category category = Category::SignalProcessing;
  std::string text;
  std::filesystem::path source_unit;  ///< as written in the document (relative to it)
  std::filesystem::path resolved_source;  ///< absolute, resolved against the document directory

  bool operator==(const Requirement&) const = default;
};

struct CodeMetadata {
  int lines_of_code = 0;
  int block_count = 0;

  bool operator==(const CodeMetadata&) const = default;
};

struct RequirementSet {
  std::string task;
  std::vector<Requirement> requirements;
  CodeMetadata code_metadata;

  const Requirement* find(std::string_view id) const;
};

/// Requirement documents look like
///
///     task: REG
///     lines_of_code: 251
///     block_count: 40
///
///     [REQ REG-001]
///     category: FiniteStateControl
///     code: reg.c
///       The free-text body, indented.
///
/// The preamble is optional; the task defaults to the id prefix of the first
/// requirement. `#` starts a comment line outside bodies.
RequirementSet parse_requirement_set(std::string_view document,
                                     const std::filesystem::path& base_dir = {});
RequirementSet load_requirement_set(const std::filesystem::path& doc);
std::string serialize_requirement_set(const RequirementSet& set);

/// Throws SourceMissing naming the first requirement whose unit is unreadable.
void check_sources(const RequirementSet& set);

/// 1 token per 4 characters, rounded up.
std::size_t estimate_tokens(std::string_view text);

/// Excerpt of the requirement's C unit fitting `budget` estimated tokens.
/// Whole unit if it fits; otherwise comments go first, then bodies of functions
/// other than the step function, then the step body itself. Declarations and the
/// step-function signature are always kept (BudgetTooSmall otherwise).
std::string slice_code_context(const Requirement& req, std::size_t budget,
                               std::string_view step_suffix = "_step");
std::string slice_code_text(std::string_view unit, std::size_t budget,
                            std::string_view step_suffix = "_step");

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace specverify
