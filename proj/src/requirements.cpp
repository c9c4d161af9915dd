#include "specverify/requirements.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "specverify/ctext.hpp"
#include "specverify/error.hpp"

namespace specverify {

namespace {

bool indented(std::string_view line) {
  return !line.empty() && (line.front() == ' ' || line.front() == '\t');
}

std::size_t indent_width(std::string_view line) {
  std::size_t n = 0;
  while (n < line.size() && (line[n] == ' ' || line[n] == '\t')) ++n;
  return n;
}

// `key: value` with a bare identifier key at column 0.
bool split_key(std::string_view line, std::string& key, std::string& value) {
  auto colon = line.find(':');
  if (colon == std::string_view::npos || indented(line)) return false;
  key = ctext::trim(line.substr(0, colon));
  if (!ctext::is_identifier(key)) return false;
  value = ctext::trim(line.substr(colon + 1));
  return true;
}

int parse_int_field(const std::string& key, const std::string& value, std::size_t line_no) {
  try {
    std::size_t used = 0;
    int v = std::stoi(value, &used);
    if (used == value.size() && v >= 0) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::MalformedDocument,
       "line " + std::to_string(line_no) + ": " + key + " must be a non-negative integer");
}

std::string finish_body(std::vector<std::string>& body) {
  while (!body.empty() && ctext::trim(body.back()).empty()) body.pop_back();
  std::size_t common = std::string::npos;
  for (auto& l : body) {
    if (ctext::trim(l).empty()) continue;
    common = std::min(common, indent_width(l));
  }
  std::string text;
  for (std::size_t i = 0; i < body.size(); ++i) {
    std::string_view l = body[i];
    if (ctext::trim(l).empty()) l = {};
    else l.remove_prefix(common);
    text += l;
    if (i + 1 < body.size()) text += '\n';
  }
  return text;
}

}  // namespace

std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::SignalProcessing: return "SignalProcessing";
    case Category::FiniteStateControl: return "FiniteStateControl";
    case Category::Navigation: return "Navigation";
    case Category::SystemIntegration: return "SystemIntegration";
  }
  return "SignalProcessing";
}

Category parse_category(std::string_view name) {
  for (auto c : {Category::SignalProcessing, Category::FiniteStateControl, Category::Navigation,
                 Category::SystemIntegration}) {
    if (to_string(c) == name) return c;
  }
  fail(ErrorCode::UnknownCategory, "'" + std::string(name) + "'");
}

const Requirement* RequirementSet::find(std::string_view id) const {
  for (const auto& r : requirements) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

RequirementSet parse_requirement_set(std::string_view document,
                                     const std::filesystem::path& base_dir) {
  static const std::regex kHeader(R"(^\[REQ\s+([^\]\s]+)\]\s*$)");
  RequirementSet set;
  const auto lines = ctext::split_lines(document);

  struct Pending {
    Requirement req;
    bool has_category = false;
    bool has_code = false;
    std::vector<std::string> body;
    std::size_t header_line = 0;
  };
  std::optional<Pending> current;
  std::set<std::string> seen;

  auto flush = [&]() {
    if (!current) return;
    auto where = "requirement " + current->req.id + " (line " +
                 std::to_string(current->header_line) + ")";
    if (!current->has_category) fail(ErrorCode::MalformedDocument, where + ": missing category");
    if (!current->has_code) fail(ErrorCode::MalformedDocument, where + ": missing code");
    current->req.text = finish_body(current->body);
    if (current->req.text.empty()) fail(ErrorCode::MalformedDocument, where + ": empty body");
    set.requirements.push_back(std::move(current->req));
    current.reset();
  };

  for (std::size_t i = 0; i < lines.lines.size(); ++i) {
    std::string line = lines.lines[i];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t line_no = i + 1;
    std::smatch m;
    if (std::regex_match(line, m, kHeader)) {
      flush();
      std::string id = m[1];
      if (!seen.insert(id).second) fail(ErrorCode::DuplicateId, id);
      current.emplace();
      current->req.id = id;
      current->header_line = line_no;
      continue;
    }
    if (current && (indented(line) || (ctext::trim(line).empty() && !current->body.empty()))) {
      current->body.push_back(line);
      continue;
    }
    if (ctext::trim(line).empty() || line.front() == '#') continue;
    std::string key, value;
    if (!split_key(line, key, value)) {
      fail(ErrorCode::MalformedDocument, "line " + std::to_string(line_no) + ": unexpected '" +
                                             line + "'");
    }
    if (!current) {
      if (key == "task") set.task = value;
      else if (key == "lines_of_code") set.code_metadata.lines_of_code = parse_int_field(key, value, line_no);
      else if (key == "block_count") set.code_metadata.block_count = parse_int_field(key, value, line_no);
      else fail(ErrorCode::MalformedDocument, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
      continue;
    }
    if (!current->body.empty()) {
      fail(ErrorCode::MalformedDocument,
           "line " + std::to_string(line_no) + ": field after body in " + current->req.id);
    }
    if (key == "category") {
      current->req.category = parse_category(value);
      current->has_category = true;
    } else if (key == "code") {
      if (value.empty()) fail(ErrorCode::MalformedDocument, "line " + std::to_string(line_no) + ": empty code path");
      current->req.source_unit = value;
      current->req.resolved_source =
          std::filesystem::path(value).is_absolute() ? std::filesystem::path(value)
                                                     : base_dir / value;
      current->has_code = true;
    } else {
      fail(ErrorCode::MalformedDocument, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  flush();

  if (set.requirements.empty()) fail(ErrorCode::MalformedDocument, "no requirements");
  if (set.task.empty()) {
    const auto& first = set.requirements.front().id;
    auto dash = first.find('-');
    set.task = dash == std::string::npos ? first : first.substr(0, dash);
  }
  for (const auto& r : set.requirements) {
    if (!ctext::starts_with(r.id, set.task + "-")) {
      fail(ErrorCode::MalformedDocument, "id " + r.id + " does not carry task prefix " + set.task);
    }
  }
  return set;
}

RequirementSet load_requirement_set(const std::filesystem::path& doc) {
  std::ifstream in(doc, std::ios::binary);
  if (!in) fail(ErrorCode::MalformedDocument, "cannot read " + doc.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto base = std::filesystem::absolute(doc).parent_path();
  return parse_requirement_set(ss.str(), base);
}

std::string serialize_requirement_set(const RequirementSet& set) {
  std::ostringstream out;
  out << "task: " << set.task << '\n';
  out << "lines_of_code: " << set.code_metadata.lines_of_code << '\n';
  out << "block_count: " << set.code_metadata.block_count << '\n';
  for (const auto& r : set.requirements) {
    out << '\n' << "[REQ " << r.id << "]\n";
    out << "category: " << to_string(r.category) << '\n';
    out << "code: " << r.source_unit.generic_string() << '\n';
    for (auto& line : ctext::split_lines(r.text).lines) {
      if (line.empty()) out << '\n';
      else out << "  " << line << '\n';
    }
  }
  return out.str();
}

void check_sources(const RequirementSet& set) {
  for (const auto& r : set.requirements) {
    std::ifstream in(r.resolved_source);
    if (!in) fail(ErrorCode::SourceMissing, r.id + ": " + r.resolved_source.string());
  }
}

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorCode::IoError, "short write to " + path.string());
}

std::string slice_code_context(const Requirement& req, std::size_t budget,
                               std::string_view step_suffix) {
  require(budget > 0, "slice budget must be positive");
  std::ifstream in(req.resolved_source, std::ios::binary);
  if (!in) fail(ErrorCode::SourceMissing, req.id + ": " + req.resolved_source.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return slice_code_text(ss.str(), budget, step_suffix);
}

std::string slice_code_text(std::string_view unit, std::size_t budget,
                            std::string_view step_suffix) {
  require(budget > 0, "slice budget must be positive");
  if (estimate_tokens(unit) <= budget) return std::string(unit);

  const std::string bare = ctext::strip_comments(unit);
  if (estimate_tokens(bare) <= budget) return bare;

  const auto lines = ctext::split_lines(bare);
  const auto chunks = ctext::top_level_chunks(bare);
  const auto functions = ctext::find_functions(bare);

  auto chunk_text = [&](const ctext::Chunk& c) {
    std::string t;
    for (std::size_t l = c.first_line; l <= c.last_line; ++l) {
      if (l > c.first_line) t += '\n';
      t += lines.lines[l];
    }
    return t;
  };

  // Each chunk gets one of: omitted, stub (signature only), full.
  enum class Pick { Omit, Stub, Full };
  std::vector<Pick> picks(chunks.size(), Pick::Omit);
  std::vector<std::string> stubs(chunks.size());
  std::optional<std::size_t> step_chunk;

  for (std::size_t i = 0; i < chunks.size(); ++i) {
    const auto& c = chunks[i];
    if (c.kind == ctext::ChunkKind::Function) {
      for (const auto& f : functions) {
        if (f.name != c.name) continue;
        stubs[i] = ctext::trim(bare.substr(f.begin, f.open_brace - f.begin)) + " { ... }";
      }
      if (ctext::ends_with(c.name, step_suffix)) {
        if (step_chunk) {
          // More than one candidate: keep the first as the anchor.
          continue;
        }
        step_chunk = i;
        picks[i] = Pick::Stub;
      }
    } else if (c.kind != ctext::ChunkKind::Comment) {
      picks[i] = Pick::Full;
    }
  }

  auto render = [&](const std::vector<Pick>& p) {
    std::string out;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      if (p[i] == Pick::Omit) continue;
      if (!out.empty()) out += '\n';
      out += p[i] == Pick::Full ? chunk_text(chunks[i]) : stubs[i];
    }
    return out;
  };

  std::string best = render(picks);
  if (estimate_tokens(best) > budget) {
    fail(ErrorCode::BudgetTooSmall,
         "declarations and step-function signature need " +
             std::to_string(estimate_tokens(best)) + " tokens, budget is " +
             std::to_string(budget));
  }
  auto try_upgrade = [&](std::size_t i, Pick to) {
    auto trial = picks;
    trial[i] = to;
    auto text = render(trial);
    if (estimate_tokens(text) <= budget) {
      picks = std::move(trial);
      best = std::move(text);
      return true;
    }
    return false;
  };
  if (step_chunk) try_upgrade(*step_chunk, Pick::Full);
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    if (chunks[i].kind != ctext::ChunkKind::Function || picks[i] != Pick::Omit) continue;
    if (!try_upgrade(i, Pick::Full)) try_upgrade(i, Pick::Stub);
  }
  return best;
}

}  // namespace specverify
