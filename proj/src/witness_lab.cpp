#include "specverify/witness_lab.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

#include "specverify/ctext.hpp"
#include "specverify/error.hpp"
#include "specverify/requirements.hpp"

namespace specverify {

namespace {

enum class PrintKind { None, F32, F64, Int, UInt };

PrintKind classify_type(std::string type) {
  type = ctext::collapse_whitespace(type);
  if (type.find('*') != std::string::npos) return PrintKind::None;
  for (std::string_view prefix : {"const ", "volatile ", "static "}) {
    while (ctext::starts_with(type, prefix)) type = type.substr(prefix.size());
  }
  if (type == "float" || type == "real32_T") return PrintKind::F32;
  if (type == "double" || type == "real_T" || type == "real64_T" || type == "time_T") {
    return PrintKind::F64;
  }
  if (type == "boolean_T" || type == "_Bool" || type == "bool") return PrintKind::Int;
  if (ctext::starts_with(type, "uint") || ctext::starts_with(type, "unsigned") ||
      type == "size_t" || type == "uchar_T" || type == "ushort_T" || type == "ulong_T") {
    return PrintKind::UInt;
  }
  static const std::set<std::string> ints{"int", "char", "short", "long", "long long", "signed",
                                          "signed char", "int8_T", "int16_T", "int32_T",
                                          "int64_T", "int_T", "char_T", "byte_T", "int8_t",
                                          "int16_t", "int32_t", "int64_t", "short int",
                                          "long int"};
  if (ints.count(type)) return PrintKind::Int;
  return PrintKind::None;
}

PrintKind kind_of(const TypedValue& v) {
  switch (v.kind) {
    case TypedValue::Kind::Float32: return PrintKind::F32;
    case TypedValue::Kind::Float64: return PrintKind::F64;
    default: return PrintKind::Int;
  }
}

std::string print_call(PrintKind k, const std::string& lvalue) {
  switch (k) {
    case PrintKind::F32: return "sv_print_f32(\"" + lvalue + "\", " + lvalue + ");";
    case PrintKind::F64: return "sv_print_f64(\"" + lvalue + "\", " + lvalue + ");";
    case PrintKind::Int: return "sv_print_int(\"" + lvalue + "\", (long long)" + lvalue + ");";
    case PrintKind::UInt:
      return "sv_print_uint(\"" + lvalue + "\", (unsigned long long)" + lvalue + ");";
    case PrintKind::None: break;
  }
  return {};
}

std::string root_of(std::string_view id) {
  auto end = id.find_first_of(".[-");
  return std::string(id.substr(0, end));
}

std::optional<int> array_extent(std::string_view suffix) {
  if (suffix.size() < 3 || suffix.front() != '[' || suffix.back() != ']') return std::nullopt;
  auto inner = suffix.substr(1, suffix.size() - 2);
  if (inner.find('[') != std::string_view::npos) return std::nullopt;
  int n = 0;
  for (char c : inner) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    n = n * 10 + (c - '0');
  }
  return n;
}

// Print statements covering a global, one level into structs, arrays up to 16 elements.
std::vector<std::string> print_global(std::string_view unit_text, const ctext::Declarator& g) {
  std::vector<std::string> out;
  auto emit = [&](const std::string& type, const std::string& lvalue, const std::string& suffix) {
    auto k = classify_type(type);
    if (k == PrintKind::None) return;
    if (suffix.empty()) {
      out.push_back(print_call(k, lvalue));
    } else if (auto n = array_extent(suffix); n && *n <= 16) {
      for (int i = 0; i < *n; ++i) out.push_back(print_call(k, lvalue + "[" + std::to_string(i) + "]"));
    }
  };
  if (g.array_suffix.empty()) {
    if (auto fields = ctext::struct_fields(unit_text, g.type)) {
      for (const auto& f : *fields) emit(f.type, g.name + "." + f.name, f.array_suffix);
      return out;
    }
  }
  emit(g.type, g.name, g.array_suffix);
  return out;
}

constexpr std::string_view kHelpers = R"(static float sv_f32(uint32_t bits)
{
  float f;
  memcpy(&f, &bits, sizeof f);
  return f;
}

static double sv_f64(uint64_t bits)
{
  double d;
  memcpy(&d, &bits, sizeof d);
  return d;
}

static void sv_print_f32(const char *name, float v)
{
  uint32_t bits;
  memcpy(&bits, &v, sizeof bits);
  printf("  %s = %.9g (0x%08X)\n", name, (double)v, (unsigned)bits);
}

static void sv_print_f64(const char *name, double v)
{
  uint64_t bits;
  memcpy(&bits, &v, sizeof bits);
  printf("  %s = %.17g (0x%016llX)\n", name, v, (unsigned long long)bits);
}

static void sv_print_int(const char *name, long long v)
{
  printf("  %s = %lld\n", name, v);
}

static void sv_print_uint(const char *name, unsigned long long v)
{
  printf("  %s = %llu\n", name, v);
}
)";

std::string squeeze(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

std::filesystem::path make_temp_dir() {
  auto pattern = (std::filesystem::temp_directory_path() / "sv-witness-XXXXXX").string();
  std::vector<char> buf(pattern.begin(), pattern.end());
  buf.push_back('\0');
  if (!::mkdtemp(buf.data())) fail(ErrorCode::IoError, "cannot create a temporary directory");
  return buf.data();
}

struct TempDir {
  std::filesystem::path path = make_temp_dir();
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace

std::string_view to_string(WitnessOutcome o) noexcept {
  switch (o) {
    case WitnessOutcome::Confirmed: return "confirmed";
    case WitnessOutcome::Spurious: return "spurious";
    case WitnessOutcome::BuildFailed: return "build_failed";
    case WitnessOutcome::InputUnmappable: return "input_unmappable";
    case WitnessOutcome::UnexpectedFailure: return "unexpected_failure";
  }
  return "build_failed";
}

WitnessOutcome parse_witness_outcome(std::string_view s) {
  for (auto o : {WitnessOutcome::Confirmed, WitnessOutcome::Spurious, WitnessOutcome::BuildFailed,
                 WitnessOutcome::InputUnmappable, WitnessOutcome::UnexpectedFailure}) {
    if (to_string(o) == s) return o;
  }
  fail(ErrorCode::MalformedDocument, "unknown witness outcome '" + std::string(s) + "'");
}

WitnessHarness generate_harness(const Counterexample& cex, std::string_view unit_text,
                                std::string requirement_id, const AnchorSpec& anchor) {
  require(!cex.steps.empty(), requirement_id + ": counterexample without steps");
  const auto iface = analyze_unit(unit_text, anchor);
  std::map<std::string, const ctext::Declarator*> globals;
  for (const auto* group : {&iface.inputs, &iface.outputs, &iface.state}) {
    for (const auto& g : *group) globals[g.name] = &g;
  }
  auto is_input = [&](const std::string& root) {
    return std::any_of(iface.inputs.begin(), iface.inputs.end(),
                       [&](const auto& d) { return d.name == root; });
  };

  WitnessHarness h;
  h.requirement_id = std::move(requirement_id);
  h.expected_failure = cex.failed_assertion;
  h.step_count = cex.steps.size();

  std::set<std::string> driven, observed;
  std::map<std::string, TypedValue> observed_kind;
  for (const auto& step : cex.steps) {
    for (const auto& [id, value] : step.assignments) {
      auto root = root_of(id);
      if (ctext::starts_with(root, "sv_") || ctext::starts_with(root, "__")) continue;
      if (is_input(root)) {
        driven.insert(id);
      } else if (globals.count(root)) {
        if (!globals[root]->is_static) {
          observed.insert(id);
          observed_kind.emplace(id, value);
        }
      } else if (!ctext::contains_word(unit_text, root)) {
        fail(ErrorCode::InputUnmappable,
             h.requirement_id + ": counterexample identifier '" + id + "' matches nothing in the unit");
      }
    }
  }
  if (driven.empty()) {
    fail(ErrorCode::InputUnmappable, h.requirement_id + ": no counterexample identifier is a unit input");
  }
  h.driven.assign(driven.begin(), driven.end());
  for (const auto& o : observed) {
    if (!driven.count(o)) h.observed.push_back(o);
  }

  std::ostringstream out;
  out << "/* sv-witness: " << h.requirement_id << ", " << h.step_count << " step(s) */\n";
  out << "#include <stdint.h>\n#include <stdio.h>\n#include <string.h>\n";
  const auto lines = ctext::split_lines(unit_text).lines;
  for (const auto& line : lines) {
    if (ctext::ends_with(line, kInjectedMarker)) continue;
    auto t = ctext::trim(line);
    if (!ctext::starts_with(t, "#")) continue;
    auto directive = ctext::trim(t.substr(1));
    if (ctext::starts_with(directive, "include")) {
      if (t.find("sv_assert.h") != std::string::npos || t.find(".c\"") != std::string::npos) continue;
      out << t << '\n';
    } else if (ctext::starts_with(directive, "define")) {
      out << t << '\n';
    }
  }
  out << '\n';
  for (const auto& chunk : ctext::top_level_chunks(unit_text)) {
    if (chunk.kind != ctext::ChunkKind::Typedef) continue;
    for (auto i = chunk.first_line; i <= chunk.last_line; ++i) out << lines[i] << '\n';
    out << '\n';
  }

  std::set<std::string> declared_roots;
  for (const auto& in : iface.inputs) declared_roots.insert(in.name);
  for (const auto& o : iface.outputs) declared_roots.insert(o.name);
  for (const auto& o : h.observed) declared_roots.insert(root_of(o));
  for (const auto& name : declared_roots) {
    const auto* g = globals.at(name);
    if (g->is_static) continue;
    out << "extern " << (g->is_const ? "const " : "") << g->type << ' ' << g->name << g->array_suffix
        << ";\n";
  }
  out << "void " << iface.step_function << "(void);\n";
  if (iface.init_function) out << "void " << *iface.init_function << "(void);\n";
  out << "unsigned long sv_assert_evaluations;\n\n";
  out << kHelpers << '\n';

  out << "int main(void)\n{\n";
  out << "  setvbuf(stdout, NULL, _IONBF, 0);\n";
  if (iface.init_function) out << "  " << *iface.init_function << "();\n";
  for (const auto& step : cex.steps) {
    out << "\n  /* step " << step.step_index << " */\n";
    out << "  printf(\"step " << step.step_index << "\\n\");\n";
    for (const auto& in : iface.inputs) {
      if (!in.is_static) out << "  memset(&" << in.name << ", 0, sizeof " << in.name << ");\n";
    }
    for (const auto& [id, value] : step.assignments) {
      if (driven.count(id)) out << "  " << id << " = " << value.c_literal() << ";\n";
    }
    for (const auto& in : iface.inputs) {
      for (const auto& p : print_global(unit_text, in)) out << "  " << p << '\n';
    }
    out << "  " << iface.step_function << "();\n";
    for (const auto& o : iface.outputs) {
      for (const auto& p : print_global(unit_text, o)) out << "  " << p << '\n';
    }
    for (const auto& o : h.observed) {
      out << "  " << print_call(kind_of(observed_kind.at(o)), o) << '\n';
    }
  }
  out << "\n  printf(\"SV_WITNESS_DONE\\n\");\n";
  out << "  return 0;\n}\n";
  h.harness_text = out.str();
  return h;
}

std::filesystem::path WitnessOptions::effective_compiler() const {
  if (!compiler.empty()) return compiler;
  if (const char* env = std::getenv("SPECVERIFY_CC"); env && *env) return env;
  return "cc";
}

WitnessResult execute_witness(const WitnessHarness& h, const InstrumentedUnit& unit,
                              const WitnessOptions& opts) {
  const auto cc = opts.effective_compiler();
  if (!find_executable(cc.string())) {
    fail(ErrorCode::ToolNotFound, "compiler '" + cc.string() + "' not found");
  }
  TempDir tmp;
  write_file(tmp.path / "harness.c", h.harness_text);
  write_file(tmp.path / "unit.c", unit.instrumented_text);
  write_file(tmp.path / "sv_assert.h", sv_assert_header());

  std::vector<std::string> argv{cc.string(), "-O0", "-w", "-DSV_WITNESS_BUILD", "-I" + tmp.path.string()};
  if (!unit.original_path.empty() && unit.original_path.has_parent_path()) {
    argv.push_back("-I" + std::filesystem::absolute(unit.original_path).parent_path().string());
  }
  for (const auto& dir : opts.include_dirs) argv.push_back("-I" + dir.string());
  for (const auto& d : opts.defines) argv.push_back("-D" + d);
  argv.insert(argv.end(), {"-o", (tmp.path / "witness").string(), (tmp.path / "harness.c").string(),
                           (tmp.path / "unit.c").string(), "-lm"});

  WitnessResult r;
  r.requirement_id = h.requirement_id;
  auto build = run_process(argv, std::chrono::seconds(60), tmp.path);

  auto save_logs = [&](const std::string& run_log) {
    if (!opts.log_dir) return;
    std::filesystem::create_directories(*opts.log_dir);
    write_file(*opts.log_dir / "harness.c", h.harness_text);
    write_file(*opts.log_dir / "build.log", build.output);
    write_file(*opts.log_dir / "run.log", run_log);
    std::ostringstream summary;
    summary << "outcome: " << to_string(r.outcome) << "\nexit_code: " << r.exit_code
            << "\nexpected_failure: " << h.expected_failure << '\n';
    if (!r.diagnostics.empty()) summary << "diagnostics: " << r.diagnostics << '\n';
    write_file(*opts.log_dir / "result.txt", summary.str());
  };

  if (!build.exited_normally()) {
    r.outcome = WitnessOutcome::BuildFailed;
    r.exit_code = build.term_signal ? 128 + build.term_signal : build.exit_code;
    r.diagnostics = build.output;
    save_logs({});
    return r;
  }

  auto run = run_process({(tmp.path / "witness").string()}, opts.run_limit, tmp.path);
  r.observed_output = run.output;
  r.exit_code = run.term_signal ? 128 + run.term_signal : run.exit_code;
  const bool abnormal = run.timed_out || r.exit_code != 0;

  const std::string sentinel = "SV_FAIL:" + h.requirement_id + ":";
  std::optional<std::string> tripped;
  for (const auto& line : ctext::split_lines(run.output).lines) {
    auto at = line.find(sentinel);
    if (at != std::string::npos) {
      tripped = line.substr(at + sentinel.size());
      break;
    }
  }

  if (run.timed_out) {
    r.outcome = WitnessOutcome::UnexpectedFailure;
    r.diagnostics = "run exceeded the time limit";
  } else if (!abnormal) {
    r.outcome = WitnessOutcome::Spurious;
  } else if (tripped && (h.expected_failure.empty() || squeeze(*tripped) == squeeze(h.expected_failure))) {
    r.outcome = WitnessOutcome::Confirmed;
  } else if (tripped) {
    r.outcome = WitnessOutcome::UnexpectedFailure;
    r.diagnostics = "a different assertion tripped: " + *tripped;
  } else {
    r.outcome = WitnessOutcome::UnexpectedFailure;
    r.diagnostics = "abnormal exit without the SV_FAIL sentinel";
  }
  save_logs(run.output);
  return r;
}

}  // namespace specverify
