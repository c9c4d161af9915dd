#pragma once

// Lightweight lexical helpers over C translation units. Nothing here parses C;
// the routines rely on the regular layout of generated step-function code
// (one top-level item per line group, balanced braces, no brace-bearing macros).

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specverify::ctext {

struct Lines {
  std::vector<std::string> lines;
  bool trailing_newline = false;
};

Lines split_lines(std::string_view text);
std::string join_lines(const Lines& lines);

std::string trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

/// Same length as `text`; comment bodies (and, optionally, string and char
/// literal bodies) are blanked with spaces. Newlines are preserved so offsets
/// and line numbers stay valid.
std::string mask_comments(std::string_view text, bool mask_literals = true);

/// Removes comments, right-trims lines, and drops lines that held only a comment.
std::string strip_comments(std::string_view text);

struct Token {
  enum class Kind { Identifier, Number, Literal, Punct };
  Kind kind;
  std::string text;
};

std::vector<Token> tokenize(std::string_view expr);

/// Identifier tokens, in order of appearance, duplicates kept.
std::vector<std::string> identifiers(std::string_view expr);

/// Member-access paths such as `rtDW.Delay1_DSTATE[2]` reduced to their
/// components {"rtDW", "Delay1_DSTATE"}.
std::vector<std::vector<std::string>> identifier_paths(std::string_view expr);

bool is_c_keyword(std::string_view word);
bool is_identifier(std::string_view word);
bool contains_word(std::string_view text, std::string_view word);

struct FunctionDef {
  std::string name;
  std::size_t begin = 0;       ///< first character of the declaration
  std::size_t open_brace = 0;
  std::size_t close_brace = 0;
  bool returns_void = false;
};

std::vector<FunctionDef> find_functions(std::string_view text);

std::size_t line_of(std::string_view text, std::size_t offset);  ///< 0-based

enum class ChunkKind { Preprocessor, Declaration, Typedef, Function, Comment };

struct Chunk {
  ChunkKind kind;
  std::size_t first_line;  ///< 0-based, inclusive
  std::size_t last_line;   ///< 0-based, inclusive
  std::string name;        ///< function name for Function chunks
};

std::vector<Chunk> top_level_chunks(std::string_view text);

struct Declarator {
  std::string type;          ///< e.g. "ExtU", "real32_T", "float *"
  std::string name;
  std::string array_suffix;  ///< e.g. "[3]"
  bool is_static = false;
  bool is_const = false;
};

/// File-scope variable definitions (typedefs, externs and prototypes excluded).
std::vector<Declarator> global_variables(std::string_view text);

/// Members of `typedef struct {...} name;` or `struct name {...};`.
std::optional<std::vector<Declarator>> struct_fields(std::string_view text,
                                                     std::string_view type_name);

/// Parses one declaration statement body (no trailing ';') into declarators.
std::vector<Declarator> parse_declaration(std::string_view decl);

}  // namespace specverify::ctext
