#pragma once

#include <atomic>
#include <chrono>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace specverify {

enum class Stage { Formalize, SynthesizeAssertions };

std::string_view to_string(Stage s) noexcept;

/// Hex SHA-256 over the stage name and both prompt texts (length-prefixed).
std::string compute_fingerprint(Stage stage, std::string_view system_text,
                                std::string_view user_text);

struct PromptExchange {
  Stage stage = Stage::Formalize;
  std::string system_text;
  std::string user_text;
  std::string response_text;
  std::string provider_id;
  std::string fingerprint;
  std::string requirement_id;  ///< routing tag only; not part of the fingerprint

  static PromptExchange make(Stage stage, std::string system_text, std::string user_text,
                             std::string requirement_id = {});
};

struct ProviderConfig {
  std::string endpoint;
  std::string model_name;
  int max_retries = 3;
  double timeout_seconds = 120.0;
  double temperature = 0.0;

  // Wire-shape knobs so both OpenAI- and Anthropic-style endpoints fit.
  std::string response_path = "choices/0/message/content";
  std::string system_field;  ///< empty: system text goes in as the first message
  std::string auth_header = "Authorization";
  std::string auth_prefix = "Bearer ";
  std::vector<std::pair<std::string, std::string>> headers;
  int max_tokens = 0;  ///< 0: field omitted from the request body

  std::chrono::milliseconds backoff_base{500};
  int requests_per_minute = 0;  ///< 0: unlimited

  void validate() const;  // throws ContractViolation
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string id() const = 0;
  virtual std::string complete(const PromptExchange& exchange, const ProviderConfig& cfg) = 0;
};

/// Directory of `<fingerprint>.txt` files.
class ReplayProvider final : public ChatProvider {
 public:
  explicit ReplayProvider(std::filesystem::path store);
  std::string id() const override { return "replay"; }
  std::string complete(const PromptExchange& exchange, const ProviderConfig& cfg) override;

 private:
  std::filesystem::path store_;
};

/// Hand-authored responses addressed by `<requirement_id>.<stage>.txt`; used to
/// seed replay stores without needing to know prompt fingerprints up front.
class ScriptedProvider final : public ChatProvider {
 public:
  explicit ScriptedProvider(std::filesystem::path dir);
  std::string id() const override { return "scripted"; }
  std::string complete(const PromptExchange& exchange, const ProviderConfig& cfg) override;

 private:
  std::filesystem::path dir_;
};

/// JSON chat-completion over HTTP(S). The API key is read from
/// SPECVERIFY_API_KEY; an empty endpoint falls back to SPECVERIFY_ENDPOINT.
class HttpProvider final : public ChatProvider {
 public:
  HttpProvider();
  std::string id() const override { return "http"; }
  std::string complete(const PromptExchange& exchange, const ProviderConfig& cfg) override;

  int last_attempts() const { return last_attempts_.load(); }

 private:
  std::string api_key_;
  std::atomic<int> last_attempts_{0};
};

std::string build_request_body(const PromptExchange& exchange, const ProviderConfig& cfg);
std::string extract_response_text(std::string_view body, std::string_view path);

/// Sliding one-minute window; callers beyond the ceiling block until a slot frees.
class RateLimiter {
 public:
  explicit RateLimiter(int requests_per_minute) : rpm_(requests_per_minute) {}
  void acquire();

 private:
  int rpm_;
  std::mutex mutex_;
  std::deque<std::chrono::steady_clock::time_point> window_;
};

/// Fills `response_text` using `provider`; precondition: response empty.
PromptExchange complete(PromptExchange exchange, ChatProvider& provider,
                        const ProviderConfig& cfg);

/// Persists the exchange's response under its fingerprint. Idempotent.
void record(const PromptExchange& exchange, const std::filesystem::path& store);

class Gateway {
 public:
  Gateway(std::unique_ptr<ChatProvider> provider, ProviderConfig cfg,
          std::optional<std::filesystem::path> record_store = std::nullopt);

  PromptExchange complete(PromptExchange exchange);
  const ProviderConfig& config() const { return cfg_; }
  std::string provider_id() const { return provider_->id(); }

 private:
  std::unique_ptr<ChatProvider> provider_;
  ProviderConfig cfg_;
  std::optional<std::filesystem::path> record_store_;
  RateLimiter limiter_;
};

}  // namespace specverify
