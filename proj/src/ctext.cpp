#include "specverify/ctext.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace specverify::ctext {

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

char last_significant(std::string_view s) {
  for (auto it = s.rbegin(); it != s.rend(); ++it) {
    if (!std::isspace(static_cast<unsigned char>(*it))) return *it;
  }
  return '\0';
}

std::string_view first_word(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  std::size_t j = i;
  while (j < s.size() && is_ident_char(s[j])) ++j;
  return s.substr(i, j - i);
}

// Splits at `sep` occurring outside (), [] and {}.
std::vector<std::string> split_top(std::string_view s, char sep) {
  std::vector<std::string> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '(' || c == '[' || c == '{') ++depth;
    else if (c == ')' || c == ']' || c == '}') --depth;
    else if (c == sep && depth == 0) {
      parts.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.emplace_back(s.substr(start));
  return parts;
}

}  // namespace

Lines split_lines(std::string_view text) {
  Lines out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      out.lines.emplace_back(text.substr(start));
      out.trailing_newline = false;
      return out;
    }
    out.lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  out.trailing_newline = !text.empty();
  return out;
}

std::string join_lines(const Lines& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.lines.size(); ++i) {
    out += lines.lines[i];
    if (i + 1 < lines.lines.size() || lines.trailing_newline) out += '\n';
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += c;
    }
  }
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string mask_comments(std::string_view text, bool mask_literals) {
  enum class State { Code, LineComment, BlockComment, String, Char };
  std::string out(text);
  State state = State::Code;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    char next = i + 1 < text.size() ? text[i + 1] : '\0';
    switch (state) {
      case State::Code:
        if (c == '/' && next == '/') {
          state = State::LineComment;
          out[i] = ' ';
        } else if (c == '/' && next == '*') {
          state = State::BlockComment;
          out[i] = out[i + 1] = ' ';
          ++i;
        } else if (c == '"') {
          state = State::String;
        } else if (c == '\'') {
          state = State::Char;
        }
        break;
      case State::LineComment:
        if (c == '\n') state = State::Code;
        else out[i] = ' ';
        break;
      case State::BlockComment:
        if (c == '*' && next == '/') {
          out[i] = out[i + 1] = ' ';
          ++i;
          state = State::Code;
        } else if (c != '\n') {
          out[i] = ' ';
        }
        break;
      case State::String:
      case State::Char: {
        char close = state == State::String ? '"' : '\'';
        if (c == '\\' && next != '\0') {
          if (mask_literals) {
            out[i] = ' ';
            if (next != '\n') out[i + 1] = ' ';
          }
          ++i;
        } else if (c == close) {
          state = State::Code;
        } else if (c == '\n') {
          state = State::Code;  // unterminated literal; resynchronise
        } else if (mask_literals) {
          out[i] = ' ';
        }
        break;
      }
    }
  }
  return out;
}

std::string strip_comments(std::string_view text) {
  const std::string masked = mask_comments(text, false);
  Lines original = split_lines(text);
  Lines stripped = split_lines(masked);
  Lines out;
  out.trailing_newline = stripped.trailing_newline;
  for (std::size_t i = 0; i < stripped.lines.size(); ++i) {
    std::string line = stripped.lines[i];
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    if (line.empty() && !is_blank(original.lines[i])) continue;
    out.lines.push_back(std::move(line));
  }
  // Collapse runs of blank lines left behind by removed comment blocks.
  Lines collapsed;
  collapsed.trailing_newline = out.trailing_newline;
  for (auto& line : out.lines) {
    if (line.empty() && !collapsed.lines.empty() && collapsed.lines.back().empty()) continue;
    collapsed.lines.push_back(std::move(line));
  }
  return join_lines(collapsed);
}

std::vector<Token> tokenize(std::string_view expr) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < expr.size()) {
    char c = expr[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < expr.size() && is_ident_char(expr[j])) ++j;
      tokens.push_back({Token::Kind::Identifier, std::string(expr.substr(i, j - i))});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < expr.size() &&
                std::isdigit(static_cast<unsigned char>(expr[i + 1])))) {
      std::size_t j = i;
      while (j < expr.size()) {
        char d = expr[j];
        if (is_ident_char(d) || d == '.') {
          ++j;
        } else if ((d == '+' || d == '-') && j > i &&
                   (expr[j - 1] == 'e' || expr[j - 1] == 'E' || expr[j - 1] == 'p' ||
                    expr[j - 1] == 'P') &&
                   !(expr[i] == '0' && i + 1 < expr.size() &&
                     (expr[i + 1] == 'x' || expr[i + 1] == 'X') &&
                     (expr[j - 1] == 'e' || expr[j - 1] == 'E'))) {
          ++j;
        } else {
          break;
        }
      }
      tokens.push_back({Token::Kind::Number, std::string(expr.substr(i, j - i))});
      i = j;
    } else if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < expr.size() && expr[j] != c) {
        if (expr[j] == '\\') ++j;
        ++j;
      }
      j = std::min(j + 1, expr.size());
      tokens.push_back({Token::Kind::Literal, std::string(expr.substr(i, j - i))});
      i = j;
    } else {
      static constexpr std::array<std::string_view, 19> kMulti = {
          "->", "==", "!=", "<=", ">=", "&&", "||", "<<", ">>", "++",
          "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^="};
      std::string punct(1, c);
      for (auto op : kMulti) {
        if (expr.substr(i, op.size()) == op) {
          punct = std::string(op);
          break;
        }
      }
      tokens.push_back({Token::Kind::Punct, punct});
      i += punct.size();
    }
  }
  return tokens;
}

std::vector<std::string> identifiers(std::string_view expr) {
  std::vector<std::string> out;
  for (auto& t : tokenize(expr)) {
    if (t.kind == Token::Kind::Identifier) out.push_back(t.text);
  }
  return out;
}

std::vector<std::vector<std::string>> identifier_paths(std::string_view expr) {
  const auto tokens = tokenize(expr);
  std::vector<std::vector<std::string>> paths;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (tokens[i].kind != Token::Kind::Identifier) {
      ++i;
      continue;
    }
    std::vector<std::string> path{tokens[i].text};
    std::size_t j = i + 1;
    while (j < tokens.size()) {
      if (tokens[j].text == "[") {
        int depth = 0;
        while (j < tokens.size()) {
          if (tokens[j].text == "[") ++depth;
          if (tokens[j].text == "]" && --depth == 0) break;
          ++j;
        }
        ++j;
        continue;
      }
      if ((tokens[j].text == "." || tokens[j].text == "->") && j + 1 < tokens.size() &&
          tokens[j + 1].kind == Token::Kind::Identifier) {
        path.push_back(tokens[j + 1].text);
        j += 2;
        continue;
      }
      break;
    }
    // Identifiers inside an index expression are separate paths.
    std::size_t k = i + 1;
    while (k < j) {
      if (tokens[k].text == "[") {
        std::size_t end = k;
        int depth = 0;
        for (; end < j; ++end) {
          if (tokens[end].text == "[") ++depth;
          if (tokens[end].text == "]" && --depth == 0) break;
        }
        std::string inner;
        for (std::size_t m = k + 1; m < end; ++m) inner += tokens[m].text + " ";
        for (auto& p : identifier_paths(inner)) paths.push_back(std::move(p));
        k = end + 1;
      } else {
        ++k;
      }
    }
    paths.push_back(std::move(path));
    i = j;
  }
  return paths;
}

bool is_c_keyword(std::string_view word) {
  static constexpr std::array<std::string_view, 44> kKeywords = {
      "auto",     "break",    "case",     "char",     "const",    "continue", "default",
      "do",       "double",   "else",     "enum",     "extern",   "float",    "for",
      "goto",     "if",       "inline",   "int",      "long",     "register", "restrict",
      "return",   "short",    "signed",   "sizeof",   "static",   "struct",   "switch",
      "typedef",  "union",    "unsigned", "void",     "volatile", "while",    "_Bool",
      "_Complex", "_Alignas", "_Alignof", "_Atomic",  "_Generic", "_Noreturn", "_Static_assert",
      "_Thread_local", "bool"};
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

bool is_identifier(std::string_view word) {
  if (word.empty() || !is_ident_start(word.front())) return false;
  return std::all_of(word.begin(), word.end(), is_ident_char);
}

bool contains_word(std::string_view text, std::string_view word) {
  if (word.empty()) return false;
  std::size_t pos = 0;
  while ((pos = text.find(word, pos)) != std::string_view::npos) {
    bool left_ok = pos == 0 || !is_ident_char(text[pos - 1]);
    std::size_t end = pos + word.size();
    bool right_ok = end >= text.size() || !is_ident_char(text[end]);
    if (left_ok && right_ok) return true;
    pos = end;
  }
  return false;
}

std::size_t line_of(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

std::vector<FunctionDef> find_functions(std::string_view text) {
  const std::string masked = mask_comments(text);
  std::vector<FunctionDef> found;
  int depth = 0;
  std::size_t item_start = 0;
  std::optional<FunctionDef> open;
  bool line_start = true;

  for (std::size_t i = 0; i < masked.size(); ++i) {
    char c = masked[i];
    if (line_start && depth == 0) {
      std::size_t j = i;
      while (j < masked.size() && (masked[j] == ' ' || masked[j] == '\t')) ++j;
      if (j < masked.size() && masked[j] == '#') {
        // Skip the preprocessor line including continuations.
        while (j < masked.size()) {
          auto nl = masked.find('\n', j);
          if (nl == std::string::npos) {
            j = masked.size();
            break;
          }
          bool continued = nl > 0 && masked[nl - 1] == '\\';
          j = nl + 1;
          if (!continued) break;
        }
        i = j - 1;
        item_start = j;
        line_start = true;
        continue;
      }
    }
    line_start = c == '\n';
    if (c == '{') {
      if (depth == 0) {
        std::size_t k = i;
        while (k > item_start && std::isspace(static_cast<unsigned char>(masked[k - 1]))) --k;
        if (k > item_start && masked[k - 1] == ')') {
          int parens = 0;
          std::size_t p = k - 1;
          for (;; --p) {
            if (masked[p] == ')') ++parens;
            else if (masked[p] == '(' && --parens == 0) break;
            if (p == item_start) break;
          }
          std::size_t e = p;
          while (e > item_start && std::isspace(static_cast<unsigned char>(masked[e - 1]))) --e;
          std::size_t b = e;
          while (b > item_start && is_ident_char(masked[b - 1])) --b;
          std::string name(masked.substr(b, e - b));
          if (is_identifier(name) && !is_c_keyword(name)) {
            std::size_t begin = item_start;
            while (begin < b && std::isspace(static_cast<unsigned char>(masked[begin]))) ++begin;
            FunctionDef def;
            def.name = name;
            def.begin = begin;
            def.open_brace = i;
            auto return_type = collapse_whitespace(masked.substr(begin, b - begin));
            auto words = identifiers(return_type);
            def.returns_void = !words.empty() && words.back() == "void" &&
                               return_type.find('*') == std::string::npos;
            open = def;
          }
        }
      }
      ++depth;
    } else if (c == '}') {
      --depth;
      if (depth == 0) {
        if (open) {
          open->close_brace = i;
          found.push_back(*open);
          open.reset();
        }
        item_start = i + 1;
      }
    } else if (c == ';' && depth == 0) {
      item_start = i + 1;
    }
  }
  return found;
}

std::vector<Chunk> top_level_chunks(std::string_view text) {
  const std::string masked = mask_comments(text);
  const Lines original = split_lines(text);
  const Lines lines = split_lines(masked);
  const auto functions = find_functions(text);

  std::vector<Chunk> chunks;
  int depth = 0;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::size_t open_start = kNone;
  bool continuation = false;

  auto classify = [&](std::size_t first, std::size_t last) -> Chunk {
    for (const auto& f : functions) {
      std::size_t fl = line_of(text, f.begin);
      if (fl >= first && fl <= last) return {ChunkKind::Function, first, last, f.name};
    }
    auto word = first_word(lines.lines[first]);
    if (word == "typedef") return {ChunkKind::Typedef, first, last, {}};
    if (word == "struct" || word == "enum" || word == "union") {
      // A bare tag definition `struct X { ... };` declares a type only.
      std::string joined;
      for (std::size_t l = first; l <= last; ++l) joined += lines.lines[l] + "\n";
      auto close = joined.rfind('}');
      if (close != std::string::npos && trim(joined.substr(close + 1)) == ";") {
        return {ChunkKind::Typedef, first, last, {}};
      }
    }
    return {ChunkKind::Declaration, first, last, {}};
  };

  for (std::size_t i = 0; i < lines.lines.size(); ++i) {
    const std::string& line = lines.lines[i];
    if (continuation) {
      chunks.back().last_line = i;
      continuation = ends_with(trim(line), "\\");
      continue;
    }
    if (open_start == kNone && depth == 0) {
      if (is_blank(line)) {
        if (!is_blank(original.lines[i])) {
          if (!chunks.empty() && chunks.back().kind == ChunkKind::Comment &&
              chunks.back().last_line + 1 == i) {
            chunks.back().last_line = i;
          } else {
            chunks.push_back({ChunkKind::Comment, i, i, {}});
          }
        }
        continue;
      }
      if (trim(line).front() == '#') {
        chunks.push_back({ChunkKind::Preprocessor, i, i, {}});
        continuation = ends_with(trim(line), "\\");
        continue;
      }
      open_start = i;
    }
    for (char c : line) {
      if (c == '{' || c == '(' || c == '[') ++depth;
      else if (c == '}' || c == ')' || c == ']') --depth;
    }
    char last = last_significant(line);
    if (open_start != kNone && depth == 0 && (last == ';' || last == '}')) {
      chunks.push_back(classify(open_start, i));
      open_start = kNone;
    }
  }
  if (open_start != kNone) chunks.push_back(classify(open_start, lines.lines.size() - 1));
  return chunks;
}

std::vector<Declarator> parse_declaration(std::string_view decl) {
  std::vector<Declarator> out;
  auto parts = split_top(decl, ',');
  std::string base_type;
  bool is_static = false;
  bool is_const = false;
  for (std::size_t n = 0; n < parts.size(); ++n) {
    std::string part = parts[n];
    // Drop initializer.
    auto pieces = split_top(part, '=');
    std::string lhs = trim(pieces.front());
    std::string suffix;
    while (!lhs.empty() && lhs.back() == ']') {
      auto open = lhs.rfind('[');
      if (open == std::string::npos) break;
      suffix = lhs.substr(open) + suffix;
      lhs = trim(lhs.substr(0, open));
    }
    std::size_t e = lhs.size();
    std::size_t b = e;
    while (b > 0 && is_ident_char(lhs[b - 1])) --b;
    std::string name = lhs.substr(b, e - b);
    if (!is_identifier(name)) continue;
    std::string prefix = trim(lhs.substr(0, b));
    if (n == 0) {
      std::string type;
      for (auto& t : tokenize(prefix)) {
        if (t.text == "static") { is_static = true; continue; }
        if (t.text == "const") { is_const = true; continue; }
        if (t.text == "volatile" || t.text == "register") continue;
        if (t.text == "*") {
          // Pointer declarators keep the star on the type for this declarator only.
          continue;
        }
        if (!type.empty()) type += ' ';
        type += t.text;
      }
      base_type = type;
    }
    if (base_type.empty()) continue;
    Declarator d;
    d.type = base_type;
    if (prefix.find('*') != std::string::npos) d.type += " *";
    d.name = name;
    d.array_suffix = suffix;
    d.is_static = is_static;
    d.is_const = is_const;
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<Declarator> global_variables(std::string_view text) {
  const std::string masked = mask_comments(text);
  const Lines lines = split_lines(masked);
  std::vector<Declarator> out;
  for (const auto& chunk : top_level_chunks(text)) {
    if (chunk.kind != ChunkKind::Declaration) continue;
    std::string body;
    for (std::size_t l = chunk.first_line; l <= chunk.last_line; ++l) body += lines.lines[l] + "\n";
    body = trim(body);
    if (body.empty() || body.back() != ';') continue;
    body.pop_back();
    auto word = first_word(body);
    if (word == "extern") continue;
    // Prototypes: a parenthesised parameter list right after the declarator name.
    auto lhs = split_top(body, '=').front();
    auto tokens = tokenize(lhs);
    bool prototype = false;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      if (tokens[t].text == "(" && tokens[t - 1].kind == Token::Kind::Identifier) {
        prototype = true;
        break;
      }
    }
    if (prototype) continue;
    for (auto& d : parse_declaration(body)) out.push_back(std::move(d));
  }
  return out;
}

std::optional<std::vector<Declarator>> struct_fields(std::string_view text,
                                                     std::string_view type_name) {
  const std::string masked = mask_comments(text);
  const Lines lines = split_lines(masked);
  for (const auto& chunk : top_level_chunks(text)) {
    if (chunk.kind != ChunkKind::Typedef) continue;
    std::string body;
    for (std::size_t l = chunk.first_line; l <= chunk.last_line; ++l) body += lines.lines[l] + "\n";
    auto open = body.find('{');
    auto close = body.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open) continue;
    auto head = tokenize(body.substr(0, open));
    auto tail = tokenize(body.substr(close + 1));
    bool is_struct = std::any_of(head.begin(), head.end(),
                                 [](const Token& t) { return t.text == "struct"; });
    if (!is_struct) continue;
    bool matches = false;
    if (!head.empty() && head.front().text == "typedef") {
      for (auto& t : tail) matches |= t.kind == Token::Kind::Identifier && t.text == type_name;
    }
    if (!head.empty() && head.back().kind == Token::Kind::Identifier &&
        head.back().text == type_name) {
      matches = true;
    }
    if (!matches) continue;
    std::vector<Declarator> fields;
    for (auto& member : split_top(body.substr(open + 1, close - open - 1), ';')) {
      auto m = trim(member);
      if (m.empty()) continue;
      for (auto& d : parse_declaration(m)) fields.push_back(std::move(d));
    }
    return fields;
  }
  return std::nullopt;
}

}  // namespace specverify::ctext
