#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "specverify/llm_gateway.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <httplib.h>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "specverify/ctext.hpp"
#include "specverify/error.hpp"

namespace specverify {

namespace {

using json = nlohmann::json;

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    fail(ErrorCode::ContractViolation, "endpoint must be an absolute URL: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool transient_status(int status) {
  return status == 408 || status == 429 || (status >= 500 && status <= 599);
}

}  // namespace

std::string_view to_string(Stage s) noexcept {
  switch (s) {
    case Stage::Formalize: return "formalize";
    case Stage::SynthesizeAssertions: return "synthesize_assertions";
  }
  return "formalize";
}

std::string compute_fingerprint(Stage stage, std::string_view system_text,
                                std::string_view user_text) {
  std::string material;
  material += to_string(stage);
  material += '\n';
  material += std::to_string(system_text.size());
  material += '\n';
  material += system_text;
  material += std::to_string(user_text.size());
  material += '\n';
  material += user_text;

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(material.data(), material.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::ContractViolation, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

PromptExchange PromptExchange::make(Stage stage, std::string system_text, std::string user_text,
                                    std::string requirement_id) {
  PromptExchange ex;
  ex.stage = stage;
  ex.fingerprint = compute_fingerprint(stage, system_text, user_text);
  ex.system_text = std::move(system_text);
  ex.user_text = std::move(user_text);
  ex.requirement_id = std::move(requirement_id);
  return ex;
}

void ProviderConfig::validate() const {
  require(max_retries >= 0, "max_retries must be >= 0");
  require(timeout_seconds > 0, "timeout must be > 0");
  require(requests_per_minute >= 0, "requests_per_minute must be >= 0");
}

ReplayProvider::ReplayProvider(std::filesystem::path store) : store_(std::move(store)) {}

std::string ReplayProvider::complete(const PromptExchange& exchange, const ProviderConfig&) {
  auto path = store_ / (exchange.fingerprint + ".txt");
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::ReplayMiss, "no replay entry for fingerprint " + exchange.fingerprint +
                                    " (" + std::string(to_string(exchange.stage)) +
                                    (exchange.requirement_id.empty() ? "" : ", " + exchange.requirement_id) +
                                    ")");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScriptedProvider::ScriptedProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string ScriptedProvider::complete(const PromptExchange& exchange, const ProviderConfig&) {
  auto path = dir_ / (exchange.requirement_id + "." + std::string(to_string(exchange.stage)) + ".txt");
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ReplayMiss, "no scripted response " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

HttpProvider::HttpProvider() : api_key_(env_or_empty("SPECVERIFY_API_KEY")) {}

std::string build_request_body(const PromptExchange& exchange, const ProviderConfig& cfg) {
  json body;
  body["model"] = cfg.model_name;
  body["temperature"] = cfg.temperature;
  if (cfg.max_tokens > 0) body["max_tokens"] = cfg.max_tokens;
  json messages = json::array();
  if (cfg.system_field.empty()) {
    messages.push_back({{"role", "system"}, {"content", exchange.system_text}});
  } else {
    body[cfg.system_field] = exchange.system_text;
  }
  messages.push_back({{"role", "user"}, {"content", exchange.user_text}});
  body["messages"] = std::move(messages);
  return body.dump();
}

std::string extract_response_text(std::string_view body, std::string_view path) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) fail(ErrorCode::ResponseEmpty, "response is not JSON");
  const json* node = &doc;
  std::string segment;
  std::stringstream ss{std::string(path)};
  while (std::getline(ss, segment, '/')) {
    if (segment.empty()) continue;
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(segment);
      } catch (const std::exception&) {
        fail(ErrorCode::ResponseEmpty, "path segment '" + segment + "' is not an index");
      }
      if (idx >= node->size()) fail(ErrorCode::ResponseEmpty, "index " + segment + " out of range");
      node = &(*node)[idx];
    } else if (node->is_object() && node->contains(segment)) {
      node = &(*node)[segment];
    } else {
      fail(ErrorCode::ResponseEmpty, "response has no field '" + segment + "'");
    }
  }
  if (!node->is_string()) fail(ErrorCode::ResponseEmpty, "response field is not text");
  auto text = node->get<std::string>();
  if (text.empty()) fail(ErrorCode::ResponseEmpty, "assistant text is empty");
  return text;
}

std::string HttpProvider::complete(const PromptExchange& exchange, const ProviderConfig& cfg) {
  std::string endpoint = cfg.endpoint.empty() ? env_or_empty("SPECVERIFY_ENDPOINT") : cfg.endpoint;
  if (endpoint.empty()) fail(ErrorCode::ContractViolation, "no endpoint configured");
  auto url = parse_url(endpoint);
  const std::string body = build_request_body(exchange, cfg);

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace(cfg.auth_header, cfg.auth_prefix + api_key_);
  for (const auto& [k, v] : cfg.headers) headers.emplace(k, v);

  const int attempts = 1 + cfg.max_retries;
  std::string last_problem;
  last_attempts_ = 0;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    last_attempts_ = attempt;
    httplib::Client client(url.origin);
    auto secs = static_cast<time_t>(cfg.timeout_seconds);
    auto usecs = static_cast<time_t>((cfg.timeout_seconds - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    auto res = client.Post(url.path, headers, body, "application/json");
    if (!res) {
      last_problem = "transport error: " + httplib::to_string(res.error());
    } else if (res->status == 401 || res->status == 403) {
      fail(ErrorCode::AuthFailure, "HTTP " + std::to_string(res->status));
    } else if (res->status >= 200 && res->status < 300) {
      return extract_response_text(res->body, cfg.response_path);
    } else if (transient_status(res->status)) {
      last_problem = "HTTP " + std::to_string(res->status);
    } else {
      fail(ErrorCode::ProviderUnavailable,
           "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    }
    if (attempt < attempts) {
      std::this_thread::sleep_for(cfg.backoff_base * (1 << (attempt - 1)));
    }
  }
  fail(ErrorCode::ProviderUnavailable,
       std::to_string(attempts) + " attempts exhausted; last: " + last_problem);
}

void RateLimiter::acquire() {
  if (rpm_ <= 0) return;
  std::unique_lock lock(mutex_);
  using clock = std::chrono::steady_clock;
  for (;;) {
    auto now = clock::now();
    while (!window_.empty() && now - window_.front() >= std::chrono::minutes(1)) window_.pop_front();
    if (static_cast<int>(window_.size()) < rpm_) {
      window_.push_back(now);
      return;
    }
    auto wake = window_.front() + std::chrono::minutes(1);
    lock.unlock();
    std::this_thread::sleep_until(wake);
    lock.lock();
  }
}

PromptExchange complete(PromptExchange exchange, ChatProvider& provider,
                        const ProviderConfig& cfg) {
  require(exchange.response_text.empty(), "exchange already completed");
  exchange.response_text = provider.complete(exchange, cfg);
  if (exchange.response_text.empty()) {
    fail(ErrorCode::ResponseEmpty, "provider " + provider.id() + " returned no text");
  }
  exchange.provider_id = provider.id();
  return exchange;
}

void record(const PromptExchange& exchange, const std::filesystem::path& store) {
  require(!exchange.response_text.empty(), "cannot record an incomplete exchange");
  std::error_code ec;
  std::filesystem::create_directories(store, ec);
  if (ec) fail(ErrorCode::StoreWriteFailure, store.string() + ": " + ec.message());
  const auto target = store / (exchange.fingerprint + ".txt");
  {
    std::ifstream existing(target, std::ios::binary);
    if (existing) {
      std::ostringstream ss;
      ss << existing.rdbuf();
      if (ss.str() == exchange.response_text) return;
    }
  }
  std::ostringstream tmp_name;
  tmp_name << exchange.fingerprint << ".tmp." << std::this_thread::get_id();
  const auto tmp = store / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << exchange.response_text;
    if (!out) fail(ErrorCode::StoreWriteFailure, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorCode::StoreWriteFailure, "cannot publish " + target.string());
  }
}

Gateway::Gateway(std::unique_ptr<ChatProvider> provider, ProviderConfig cfg,
                 std::optional<std::filesystem::path> record_store)
    : provider_(std::move(provider)),
      cfg_(std::move(cfg)),
      record_store_(std::move(record_store)),
      limiter_(cfg_.requests_per_minute) {
  cfg_.validate();
}

PromptExchange Gateway::complete(PromptExchange exchange) {
  limiter_.acquire();
  auto done = specverify::complete(std::move(exchange), *provider_, cfg_);
  if (record_store_) record(done, *record_store_);
  return done;
}

}  // namespace specverify
