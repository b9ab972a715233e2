#include "medjargon/gateway.hpp"

#include <httplib.h>
#include <json.hpp>
#include <fmt/format.h>

#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "medjargon/errors.hpp"
#include "medjargon/util.hpp"

namespace medjargon {

namespace {

using nlohmann::json;

class HttplibTransport : public Transport {
public:
  explicit HttplibTransport(std::chrono::milliseconds timeout) : timeout_(timeout) {}

  HttpResponse post(const HttpRequest& req) override {
    const std::size_t scheme_end = req.url.find("://");
    if (scheme_end == std::string::npos) {
      raise(ErrorKind::ConfigError, "url has no scheme: " + req.url);
    }
    const std::size_t path_start = req.url.find('/', scheme_end + 3);
    const std::string origin =
        path_start == std::string::npos ? req.url : req.url.substr(0, path_start);
    const std::string path =
        path_start == std::string::npos ? "/" : req.url.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout_));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout_));
    httplib::Headers headers;
    for (const auto& [k, v] : req.headers) headers.emplace(k, v);

    auto res = client.Post(path, headers, req.body, "application/json");
    if (!res) {
      raise(ErrorKind::TransportFailure,
            "request to " + origin + " failed: " + httplib::to_string(res.error()));
    }
    return {res->status, res->body};
  }

private:
  std::chrono::milliseconds timeout_;
};

bool transient_status(int status) { return status == 429 || status >= 500; }

std::chrono::milliseconds jittered(std::chrono::milliseconds base, bool jitter) {
  if (!jitter) return base;
  thread_local std::mt19937_64 rng{std::random_device{}()};
  const auto ms = base.count();
  // Half fixed, half uniform: keeps an upper bound while decorrelating peers.
  return std::chrono::milliseconds(ms / 2 + static_cast<long>(rng() % (ms / 2 + 1)));
}

}  // namespace

std::unique_ptr<Transport> make_http_transport(std::chrono::milliseconds timeout) {
  return std::make_unique<HttplibTransport>(timeout);
}

std::string cache_key_for(const ProviderConfig& cfg, const std::string& prompt_text) {
  return sha256_hex(fmt::format("{}\n{}\n{}\n{}\n{}", cfg.name, cfg.model,
                                cfg.temperature, cfg.max_tokens, prompt_text));
}

ResponseCache::ResponseCache(std::string path) : path_(std::move(path)) {
  if (file_exists(path_)) {
    const std::string body = read_file(path_);
    std::size_t line_no = 0;
    for (const auto& line : split_lines(body)) {
      ++line_no;
      if (trim(line).empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const std::exception& e) {
        raise(ErrorKind::MalformedRecord,
              path_ + ":" + std::to_string(line_no) + ": bad cache line: " + e.what());
      }
      if (!j.contains("cache_key") || !j.contains("response")) {
        raise(ErrorKind::MalformedRecord,
              path_ + ":" + std::to_string(line_no) + ": cache line missing fields");
      }
      responses_[j["cache_key"].get<std::string>()] = j["response"].get<std::string>();
    }
  }
}

std::optional<std::string> ResponseCache::lookup(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = responses_.find(key);
  if (it == responses_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::append(const ChatExchange& exchange) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (responses_.count(exchange.cache_key)) return;
  if (!out_.is_open()) {
    ensure_parent_dir(path_);
    out_.open(path_, std::ios::app | std::ios::binary);
    if (!out_) raise(ErrorKind::IoFailure, "cannot open cache for append: " + path_);
  }
  json j;
  j["cache_key"] = exchange.cache_key;
  j["prompt"] = exchange.prompt;
  j["response"] = exchange.response;
  j["timestamp"] = exchange.timestamp;
  j["attempts"] = exchange.attempts;
  out_ << j.dump() << '\n';
  out_.flush();
  responses_[exchange.cache_key] = exchange.response;
}

std::size_t ResponseCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return responses_.size();
}

RateLimiter::RateLimiter(int max_requests, std::chrono::milliseconds window)
    : max_requests_(max_requests), window_(window) {}

void RateLimiter::acquire() {
  for (;;) {
    std::chrono::milliseconds wait{0};
    {
      std::lock_guard<std::mutex> lock(mutex_);
      const auto now = std::chrono::steady_clock::now();
      while (!stamps_.empty() && now - stamps_.front() >= window_) stamps_.pop_front();
      if (static_cast<int>(stamps_.size()) < max_requests_) {
        stamps_.push_back(now);
        return;
      }
      wait = std::chrono::duration_cast<std::chrono::milliseconds>(
                 stamps_.front() + window_ - now) +
             std::chrono::milliseconds(1);
    }
    std::this_thread::sleep_for(wait);
  }
}

Gateway::Gateway(ProviderConfig cfg, std::shared_ptr<Transport> transport,
                 std::shared_ptr<ResponseCache> cache)
    : Gateway(std::move(cfg), std::move(transport), std::move(cache), Options{}) {}

Gateway::Gateway(ProviderConfig cfg, std::shared_ptr<Transport> transport,
                 std::shared_ptr<ResponseCache> cache, Options options)
    : cfg_(std::move(cfg)),
      transport_(std::move(transport)),
      cache_(std::move(cache)),
      options_(std::move(options)),
      limiter_(cfg_.requests_per_minute, options_.rate_window) {
  if (!options_.sleeper) {
    options_.sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

std::string Gateway::complete(const std::string& prompt_text) {
  if (prompt_text.empty()) raise(ErrorKind::ConfigError, "empty prompt");
  const std::string key = cache_key_for(cfg_, prompt_text);
  if (auto hit = cache_->lookup(key)) return *hit;

  const char* auth = nullptr;
  if (!cfg_.auth_env.empty()) {
    auth = std::getenv(cfg_.auth_env.c_str());
    if (!auth || !*auth) {
      raise(ErrorKind::AuthMissing, "env var " + cfg_.auth_env + " not set for provider " +
                                        cfg_.name);
    }
  }

  json body;
  body["model"] = cfg_.model;
  body["messages"] = json::array({json{{"role", "user"}, {"content", prompt_text}}});
  body["temperature"] = cfg_.temperature;
  body["max_tokens"] = cfg_.max_tokens;

  HttpRequest req;
  req.url = cfg_.base_url + "/chat/completions";
  req.body = body.dump();
  if (auth) req.headers.emplace_back("Authorization", std::string("Bearer ") + auth);

  int last_status = 0;
  std::string last_note;
  auto delay = options_.retry.initial_delay;
  for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
    if (attempt > 1) {
      options_.sleeper(jittered(delay, options_.retry.jitter));
      delay = std::chrono::milliseconds(
          static_cast<long>(std::llround(static_cast<double>(delay.count()) *
                                         options_.retry.factor)));
    }
    limiter_.acquire();

    HttpResponse res;
    try {
      res = transport_->post(req);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::TransportFailure) throw;
      last_status = 0;
      last_note = e.what();
      continue;  // connect/timeout trouble is transient
    }

    if (res.status == 200) {
      std::string text;
      try {
        json parsed = json::parse(res.body);
        text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const std::exception& e) {
        raise(ErrorKind::ProviderRejected,
              cfg_.name + " returned an unreadable completion body: " + e.what());
      }
      cache_->append({key, prompt_text, text, iso8601_utc_now(), attempt});
      return text;
    }
    if (!transient_status(res.status)) {
      raise(ErrorKind::ProviderRejected,
            cfg_.name + " rejected the request with status " + std::to_string(res.status));
    }
    last_status = res.status;
    last_note = "status " + std::to_string(res.status);
  }
  raise(ErrorKind::ExhaustedRetries,
        cfg_.name + " still failing after " + std::to_string(options_.retry.max_attempts) +
            " attempts (last: " + (last_note.empty() ? std::to_string(last_status) : last_note) +
            ")");
}

std::vector<BatchItem> Gateway::run_batch(const std::vector<std::string>& prompts,
                                          int parallelism) {
  if (parallelism < 1) raise(ErrorKind::ConfigError, "parallelism must be >= 1");
  std::vector<BatchItem> results(prompts.size());
  if (prompts.empty()) return results;

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= prompts.size()) return;
      try {
        results[i].text = complete(prompts[i]);
        results[i].ok = true;
      } catch (const std::exception& e) {
        results[i].ok = false;
        results[i].error = e.what();
      }
    }
  };

  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(parallelism), prompts.size());
  if (n_workers == 1) {
    worker();
    return results;
  }
  std::vector<std::thread> threads;
  threads.reserve(n_workers);
  for (std::size_t i = 0; i < n_workers; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  return results;
}

}  // namespace medjargon
