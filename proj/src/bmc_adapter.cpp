#include "specverify/bmc_adapter.hpp"

#include <cerrno>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <cstring>
#include <iomanip>
#include <regex>
#include <set>
#include <sstream>

#include "specverify/ctext.hpp"
#include "specverify/error.hpp"

namespace specverify {

namespace {

bool search(std::string_view text, const std::string& pattern) {
  if (pattern.empty()) return false;
  std::regex re(pattern);
  return std::regex_search(text.begin(), text.end(), re);
}

std::string format_float(double v, int digits) {
  if (std::isnan(v)) return "NAN";
  if (std::isinf(v)) return v < 0 ? "-INFINITY" : "INFINITY";
  std::ostringstream out;
  out << std::setprecision(digits) << v;
  auto s = out.str();
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::optional<std::uint64_t> parse_bits(std::string_view text) {
  std::uint64_t bits = 0;
  int n = 0;
  for (char c : text) {
    if (c == ' ') continue;
    if (c != '0' && c != '1') return std::nullopt;
    if (++n > 64) return std::nullopt;
    bits = (bits << 1) | static_cast<std::uint64_t>(c - '0');
  }
  if (n == 0) return std::nullopt;
  return bits;
}

int count_bits(std::string_view text) {
  int n = 0;
  for (char c : text) n += (c == '0' || c == '1');
  return n;
}

std::optional<TypedValue> parse_value(std::string literal, std::string_view bits_text) {
  literal = ctext::trim(literal);
  if (literal.empty()) return std::nullopt;
  TypedValue v;
  v.literal = literal;
  if (literal == "true" || literal == "TRUE") return TypedValue::of_bool(true);
  if (literal == "false" || literal == "FALSE") return TypedValue::of_bool(false);

  std::string lower;
  for (char c : literal) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  bool hex = ctext::starts_with(lower, "0x") || ctext::starts_with(lower, "-0x");
  bool f_suffix = !hex && !lower.empty() && lower.back() == 'f' && lower.find("inf") == std::string::npos;
  bool floaty = f_suffix || (!hex && lower.find_first_of(".e") != std::string::npos) ||
                lower.find("inf") != std::string::npos || lower.find("nan") != std::string::npos;
  auto bits = parse_bits(bits_text);
  int width = count_bits(bits_text);

  if (!floaty) {
    std::string digits = literal;
    while (!digits.empty() && (digits.back() == 'u' || digits.back() == 'U' || digits.back() == 'l' ||
                               digits.back() == 'L')) {
      digits.pop_back();
    }
    char* end = nullptr;
    errno = 0;
    long long n = std::strtoll(digits.c_str(), &end, 0);
    if (errno != 0 || end == digits.c_str() || *end != '\0') {
      unsigned long long u = std::strtoull(digits.c_str(), &end, 0);
      if (end == digits.c_str() || *end != '\0') return std::nullopt;
      n = static_cast<long long>(u);
    }
    auto out = TypedValue::of_int(n);
    out.literal = literal;
    return out;
  }

  // Bits are authoritative for floats.
  if (bits && width == 32) {
    auto out = TypedValue::of_float32_bits(static_cast<std::uint32_t>(*bits));
    out.literal = literal;
    return out;
  }
  if (bits && width == 64) {
    double d;
    std::uint64_t b = *bits;
    std::memcpy(&d, &b, sizeof d);
    auto out = TypedValue::of_float64(d);
    out.literal = literal;
    return out;
  }
  std::string body = f_suffix ? literal.substr(0, literal.size() - 1) : literal;
  char* end = nullptr;
  double d = std::strtod(body.c_str(), &end);
  if (end == body.c_str() || *end != '\0') {
    if (lower.find("nan") != std::string::npos) d = NAN;
    else if (lower.find("inf") != std::string::npos) d = lower.front() == '-' ? -INFINITY : INFINITY;
    else return std::nullopt;
  }
  auto out = f_suffix ? TypedValue::of_float32(static_cast<float>(d)) : TypedValue::of_float64(d);
  out.bit_pattern.reset();  // the tool gave no bits; drive by decimal
  out.literal = literal;
  return out;
}

// Splits `{ .a=1, .b={ .c=2 } }` at depth-0 commas.
std::vector<std::string> split_aggregate(std::string_view inner) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : inner) {
    if (c == '{') ++depth;
    if (c == '}') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(ctext::trim(cur));
      cur.clear();
      continue;
    }
    cur += c;
  }
  if (!ctext::trim(cur).empty()) parts.push_back(ctext::trim(cur));
  return parts;
}

void expand_assignment(const std::string& lhs, const std::string& rhs, std::string_view bits,
                       std::vector<std::pair<std::string, TypedValue>>& out) {
  auto t = ctext::trim(rhs);
  if (ctext::starts_with(t, "{") && !ctext::ends_with(t, "}")) {
    // Aggregate followed by its bit dump, `{ .a=1 } ({ 0000... })`: keep the literal.
    int depth = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] == '{') ++depth;
      if (t[i] == '}' && --depth == 0) {
        t = t.substr(0, i + 1);
        break;
      }
    }
  }
  if (ctext::starts_with(t, "{") && ctext::ends_with(t, "}")) {
    auto parts = split_aggregate(std::string_view(t).substr(1, t.size() - 2));
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto& p = parts[i];
      if (ctext::starts_with(p, ".")) {
        auto eq = p.find('=');
        if (eq == std::string::npos) continue;
        expand_assignment(lhs + "." + ctext::trim(p.substr(1, eq - 1)), p.substr(eq + 1), {}, out);
      } else {
        expand_assignment(lhs + "[" + std::to_string(i) + "]", p, {}, out);
      }
    }
    return;
  }
  if (auto v = parse_value(t, bits)) out.emplace_back(lhs, std::move(*v));
}

std::string normalize_identifier(std::string id) {
  if (ctext::starts_with(id, "c:@")) id = id.substr(3);
  auto scope = id.rfind("::");
  if (scope != std::string::npos) id = id.substr(scope + 2);
  return id;
}

}  // namespace

void BmcConfig::validate() const {
  if (unwind_bound < 1) fail(ErrorCode::ConfigInvalid, "unwind bound must be at least 1");
  if (!(timeout.count() > 0)) fail(ErrorCode::ConfigInvalid, "timeout must be positive");
  if (kill_grace.count() < 0) fail(ErrorCode::ConfigInvalid, "kill grace must not be negative");
  for (const auto* p : {&patterns.success, &patterns.failure, &patterns.bound}) {
    try {
      std::regex re(*p);
    } catch (const std::regex_error& e) {
      fail(ErrorCode::ConfigInvalid, "bad output pattern '" + *p + "': " + e.what());
    }
  }
}

std::filesystem::path BmcConfig::effective_tool() const {
  if (const char* env = std::getenv("SPECVERIFY_BMC"); env && *env) return env;
  return tool_path;
}

std::vector<std::string> BmcConfig::command_line(const std::filesystem::path& file) const {
  std::vector<std::string> argv{effective_tool().string(), file.string(), "--unwind",
                                std::to_string(unwind_bound), "--timeout",
                                std::to_string(static_cast<long long>(std::ceil(timeout.count()))) + "s"};
  argv.push_back(floating_point_mode == FloatingPointMode::IeeeFloat ? "--floatbv" : "--fixedbv");
  argv.insert(argv.end(), extra_flags.begin(), extra_flags.end());
  return argv;
}

std::string_view to_string(VerdictStatus s) noexcept {
  switch (s) {
    case VerdictStatus::Verified: return "verified";
    case VerdictStatus::Falsifiable: return "falsifiable";
    case VerdictStatus::Undetermined: return "undetermined";
  }
  return "undetermined";
}

std::string_view to_string(VerdictReason r) noexcept {
  switch (r) {
    case VerdictReason::Proved: return "proved";
    case VerdictReason::CounterexampleFound: return "counterexample_found";
    case VerdictReason::Timeout: return "timeout";
    case VerdictReason::BoundHit: return "bound_hit";
    case VerdictReason::ToolError: return "tool_error";
  }
  return "tool_error";
}

std::string_view to_string(FloatingPointMode m) noexcept {
  return m == FloatingPointMode::IeeeFloat ? "ieee" : "rational";
}

VerdictStatus parse_verdict_status(std::string_view s) {
  for (auto v : {VerdictStatus::Verified, VerdictStatus::Falsifiable, VerdictStatus::Undetermined}) {
    if (to_string(v) == s) return v;
  }
  fail(ErrorCode::MalformedDocument, "unknown verdict status '" + std::string(s) + "'");
}

VerdictReason parse_verdict_reason(std::string_view s) {
  for (auto v : {VerdictReason::Proved, VerdictReason::CounterexampleFound, VerdictReason::Timeout,
                 VerdictReason::BoundHit, VerdictReason::ToolError}) {
    if (to_string(v) == s) return v;
  }
  fail(ErrorCode::MalformedDocument, "unknown verdict reason '" + std::string(s) + "'");
}

std::string_view to_string(TypedValue::Kind k) noexcept {
  switch (k) {
    case TypedValue::Kind::Bool: return "bool";
    case TypedValue::Kind::Int: return "int";
    case TypedValue::Kind::Float32: return "float32";
    case TypedValue::Kind::Float64: return "float64";
  }
  return "int";
}

TypedValue TypedValue::of_float32(float f) {
  TypedValue v;
  v.kind = Kind::Float32;
  v.value = f;
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof bits);
  v.bit_pattern = bits;
  v.literal = format_float(f, 9) + "f";
  return v;
}

TypedValue TypedValue::of_float32_bits(std::uint32_t bits) {
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return of_float32(f);
}

TypedValue TypedValue::of_float64(double d) {
  TypedValue v;
  v.kind = Kind::Float64;
  v.value = d;
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  v.bit_pattern = bits;
  v.literal = format_float(d, 17);
  return v;
}

TypedValue TypedValue::of_int(long long n) {
  TypedValue v;
  v.kind = Kind::Int;
  v.value = static_cast<double>(n);
  v.literal = std::to_string(n);
  return v;
}

TypedValue TypedValue::of_bool(bool b) {
  TypedValue v;
  v.kind = Kind::Bool;
  v.value = b ? 1.0 : 0.0;
  v.literal = b ? "true" : "false";
  return v;
}

std::string TypedValue::hex() const {
  if (!bit_pattern) return {};
  std::ostringstream out;
  int width = kind == Kind::Float64 ? 16 : 8;
  out << "0x" << std::uppercase << std::hex << std::setw(width) << std::setfill('0') << *bit_pattern;
  return out.str();
}

std::string TypedValue::c_literal() const {
  switch (kind) {
    case Kind::Bool: return value != 0.0 ? "1" : "0";
    case Kind::Int: {
      auto n = static_cast<long long>(value);
      if (n == std::numeric_limits<long long>::min()) return "(-9223372036854775807LL - 1)";
      return std::to_string(n) + (std::llabs(n) > 2147483647LL ? "LL" : "");
    }
    case Kind::Float32:
      if (bit_pattern) return "sv_f32(" + hex() + "u)";
      return format_float(value, 9) + "f";
    case Kind::Float64:
      if (bit_pattern) return "sv_f64(" + hex() + "ull)";
      return format_float(value, 17);
  }
  return "0";
}

Counterexample parse_counterexample(std::string_view raw) {
  static const std::regex kState(R"(^\s*State\s+\d+)");
  static const std::regex kAssign(
      R"(^\s*([A-Za-z_@:][A-Za-z0-9_@:.\[\]>-]*)\s*=\s*(.*?)\s*(\(([01 ]+)\))?\s*$)");

  Counterexample cex;
  cex.raw_trace = std::string(raw);
  const auto lines = ctext::split_lines(raw).lines;

  bool saw_state = false;
  bool in_property = false;
  std::vector<std::string> property_lines;
  std::vector<CounterexampleStep> steps;
  CounterexampleStep current;

  auto flush = [&] {
    if (!current.assignments.empty()) {
      current.step_index = static_cast<int>(steps.size());
      steps.push_back(std::move(current));
      current = {};
    }
  };

  for (const auto& raw_line : lines) {
    std::string line = raw_line;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::regex_search(line, kState)) {
      saw_state = true;
      in_property = false;
      continue;
    }
    if (ctext::starts_with(ctext::trim(line), "Violated property:")) {
      in_property = true;
      continue;
    }
    if (in_property) {
      auto t = ctext::trim(line);
      if (t.empty()) {
        if (!property_lines.empty()) in_property = false;
        continue;
      }
      if (ctext::starts_with(t, "VERIFICATION")) {
        in_property = false;
        continue;
      }
      property_lines.push_back(t);
      continue;
    }
    if (!saw_state) continue;
    auto t = ctext::trim(line);
    if (t.empty() || ctext::starts_with(t, "---")) continue;
    std::smatch m;
    if (!std::regex_match(line, m, kAssign)) continue;
    std::vector<std::pair<std::string, TypedValue>> assigned;
    expand_assignment(normalize_identifier(m[1]), m[2], m[4].str(), assigned);
    for (auto& [id, value] : assigned) {
      if (current.assignments.count(id)) flush();
      current.assignments.insert_or_assign(id, std::move(value));
    }
  }
  flush();

  if (!saw_state) fail(ErrorCode::NoStatesFound, "trace contains no State block");
  if (steps.empty()) fail(ErrorCode::NoStatesFound, "State blocks carry no parseable assignment");
  cex.steps = std::move(steps);

  // Prefer the condition reported in an SV_FAIL message; else the last non-location line.
  for (const auto& p : property_lines) {
    auto at = p.find("SV_FAIL:");
    if (at != std::string::npos) {
      auto colon = p.find(':', at + 8);
      if (colon != std::string::npos) {
        cex.failed_assertion = ctext::trim(p.substr(colon + 1));
        break;
      }
    }
  }
  if (cex.failed_assertion.empty()) {
    for (const auto& p : property_lines) {
      if (ctext::starts_with(p, "file ") || ctext::starts_with(p, "Location")) continue;
      cex.failed_assertion = p;
    }
  }
  return cex;
}

Verdict normalize_output(std::string requirement_id, std::string_view output, int exit_code,
                         bool timed_out, const OutputPatterns& patterns) {
  Verdict v;
  v.requirement_id = std::move(requirement_id);
  v.raw_output = std::string(output);
  v.exit_code = exit_code;
  v.status = VerdictStatus::Undetermined;
  v.reason = VerdictReason::ToolError;

  if (timed_out) {
    v.reason = VerdictReason::Timeout;
  } else if (search(output, patterns.failure)) {
    try {
      auto cex = parse_counterexample(output);
      if (search(cex.failed_assertion, patterns.bound)) {
        v.reason = VerdictReason::BoundHit;
      } else {
        v.status = VerdictStatus::Falsifiable;
        v.reason = VerdictReason::CounterexampleFound;
        v.counterexample = std::move(cex);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoStatesFound) throw;
    }
  } else if (search(output, patterns.bound)) {
    v.reason = VerdictReason::BoundHit;
  } else if (search(output, patterns.success)) {
    v.status = VerdictStatus::Verified;
    v.reason = VerdictReason::Proved;
  }
  return v;
}

std::string verification_driver(const UnitInterface& iface, std::string_view requirement_id,
                                 std::string_view instrumented_filename) {
  std::ostringstream out;
  out << "/* sv-requirement: " << requirement_id << " */\n";
  out << "#include <string.h>\n";
  out << "#include \"" << instrumented_filename << "\"\n\n";
  out << "int main(void)\n{\n";
  if (iface.init_function) out << "  " << *iface.init_function << "();\n";
  out << "  for (;;) {\n";
  for (const auto& in : iface.inputs) {
    auto local = "sv_nondet_" + in.name;
    out << "    " << in.type << " " << local << in.array_suffix << ";\n";
    if (in.array_suffix.empty()) {
      out << "    " << in.name << " = " << local << ";\n";
    } else {
      out << "    memcpy(" << in.name << ", " << local << ", sizeof " << in.name << ");\n";
    }
  }
  out << "    " << iface.step_function << "();\n";
  out << "  }\n";
  out << "  return 0;\n}\n";
  return out.str();
}

Verdict run_verifier(const std::filesystem::path& file, std::string requirement_id,
                     const BmcConfig& cfg) {
  cfg.validate();
  const auto tool = cfg.effective_tool();
  if (!find_executable(tool.string())) {
    fail(ErrorCode::ToolNotFound, "verifier '" + tool.string() + "' not found or not executable");
  }
  auto argv = cfg.command_line(file);
  auto proc = run_process(argv, cfg.timeout, {}, cfg.kill_grace);
  int code = proc.term_signal ? 128 + proc.term_signal : proc.exit_code;
  auto v = normalize_output(std::move(requirement_id), proc.output, code, proc.timed_out, cfg.patterns);
  v.wall_time = proc.wall_time;
  bool recognised = search(proc.output, cfg.patterns.success) ||
                    search(proc.output, cfg.patterns.failure) ||
                    search(proc.output, cfg.patterns.bound);
  if (!proc.timed_out && code != 0 && !recognised) {
    auto tail = proc.output.size() > 400 ? proc.output.substr(proc.output.size() - 400) : proc.output;
    fail(ErrorCode::ToolCrashed, v.requirement_id + ": verifier exited with status " +
                                     std::to_string(code) + " and no verdict: " + ctext::trim(tail));
  }
  return v;
}

}  // namespace specverify
