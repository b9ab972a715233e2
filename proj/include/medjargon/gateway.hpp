#pragma once

#include <chrono>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace medjargon {

struct ProviderConfig {
  std::string name;
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string model;
  std::string auth_env;  // env var holding the API key; empty = no auth header
  int max_tokens = 512;
  double temperature = 0.0;
  int requests_per_minute = 60;
};

struct HttpRequest {
  std::string url;
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Seam between the gateway and the network. Tests script it; production
/// wires the cpp-httplib implementation.
class Transport {
public:
  virtual ~Transport() = default;
  /// Raises TransportFailure on connect/timeout trouble.
  virtual HttpResponse post(const HttpRequest& req) = 0;
};

std::unique_ptr<Transport> make_http_transport(
    std::chrono::milliseconds timeout = std::chrono::milliseconds(120000));

struct ChatExchange {
  std::string cache_key;  // digest of provider name, model, prompt, temperature, max_tokens
  std::string prompt;
  std::string response;
  std::string timestamp;
  int attempts = 1;
};

std::string cache_key_for(const ProviderConfig& cfg, const std::string& prompt_text);

/// Append-only line-delimited ChatExchange store; lookups hit memory,
/// appends are serialized through one writer.
class ResponseCache {
public:
  explicit ResponseCache(std::string path);

  std::optional<std::string> lookup(const std::string& key) const;
  void append(const ChatExchange& exchange);  // idempotent per key
  const std::string& path() const { return path_; }
  std::size_t size() const;

private:
  std::string path_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> responses_;
  std::ofstream out_;
};

/// Sliding-window limiter; window is injectable so tests don't wait a minute.
class RateLimiter {
public:
  RateLimiter(int max_requests, std::chrono::milliseconds window);
  void acquire();

private:
  int max_requests_;
  std::chrono::milliseconds window_;
  std::mutex mutex_;
  std::deque<std::chrono::steady_clock::time_point> stamps_;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_delay{1000};
  double factor = 2.0;
  bool jitter = true;
};

struct BatchItem {
  bool ok = false;
  std::string text;
  std::string error;
};

/// One provider endpoint with caching, retries, rate limiting and bounded
/// parallel dispatch. Identical prompts against a primed cache never touch
/// the transport.
class Gateway {
public:
  struct Options {
    RetryPolicy retry;
    std::chrono::milliseconds rate_window{60000};
    std::function<void(std::chrono::milliseconds)> sleeper;  // default: real sleep
  };

  Gateway(ProviderConfig cfg, std::shared_ptr<Transport> transport,
          std::shared_ptr<ResponseCache> cache);
  Gateway(ProviderConfig cfg, std::shared_ptr<Transport> transport,
          std::shared_ptr<ResponseCache> cache, Options options);

  /// Raises AuthMissing, ProviderRejected, ExhaustedRetries.
  std::string complete(const std::string& prompt_text);

  /// Outputs aligned to input order; per-item failures reported in place,
  /// the batch itself always runs to completion.
  std::vector<BatchItem> run_batch(const std::vector<std::string>& prompts,
                                   int parallelism);

  const ProviderConfig& config() const { return cfg_; }

private:
  ProviderConfig cfg_;
  std::shared_ptr<Transport> transport_;
  std::shared_ptr<ResponseCache> cache_;
  Options options_;
  RateLimiter limiter_;
};

}  // namespace medjargon
