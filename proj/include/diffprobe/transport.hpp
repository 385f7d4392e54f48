#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

namespace diffprobe::agent {

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string content;
};

struct ChatResult {
    std::string text;
    long long prompt_tokens = -1;      // -1 when the endpoint does not report usage
    long long completion_tokens = -1;
};

/// Abstract chat-completion backend. Counts every completion call so tests
/// can assert that offline agents never reach a transport.
class ChatTransport {
  public:
    virtual ~ChatTransport() = default;

    ChatResult complete(const std::vector<ChatMessage>& messages, const std::string& model,
                        double temperature) {
        calls_.fetch_add(1, std::memory_order_relaxed);
        return do_complete(messages, model, temperature);
    }

    long long call_count() const { return calls_.load(std::memory_order_relaxed); }

  protected:
    virtual ChatResult do_complete(const std::vector<ChatMessage>& messages,
                                   const std::string& model, double temperature) = 0;

  private:
    std::atomic<long long> calls_{0};
};

/// Deterministic in-memory backend for tests and offline demos: a callback
/// maps the message list to a reply.
class FunctionTransport : public ChatTransport {
  public:
    using Fn = std::function<std::string(const std::vector<ChatMessage>&)>;
    explicit FunctionTransport(Fn fn) : fn_(std::move(fn)) {}

  protected:
    ChatResult do_complete(const std::vector<ChatMessage>& messages, const std::string&,
                           double) override {
        return ChatResult{fn_(messages), -1, -1};
    }

  private:
    Fn fn_;
};

namespace detail_transport {

/// Counting gate bounding concurrent in-flight requests.
class InflightGate {
  public:
    explicit InflightGate(int slots) : available_(slots > 0 ? slots : 1) {}

    struct Token {
        InflightGate* gate = nullptr;
        ~Token() {
            if (gate) gate->release();
        }
        Token(InflightGate* g) : gate(g) {}
        Token(const Token&) = delete;
        Token& operator=(const Token&) = delete;
    };

    Token acquire() {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return available_ > 0; });
        --available_;
        return Token(this);
    }

  private:
    void release() {
        {
            std::lock_guard lock(mu_);
            ++available_;
        }
        cv_.notify_one();
    }

    std::mutex mu_;
    std::condition_variable cv_;
    int available_;
};

struct SplitUrl {
    std::string base;  // scheme://host[:port]
    std::string path;  // /v1/chat/completions
};

inline SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw TransportError("endpoint URL needs a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/v1/chat/completions"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace detail_transport

/// Name of the environment variable holding the endpoint credential. The key
/// is read from the environment only — never from config files — and is never
/// written to logs or transcripts.
inline constexpr const char* kApiKeyEnvVar = "DIFFPROBE_API_KEY";

struct HttpTransportOptions {
    std::string endpoint_url = "http://127.0.0.1:8080/v1/chat/completions";
    double timeout_seconds = 30.0;
    int max_in_flight = 4;
    int max_attempts = 3;
    int backoff_initial_ms = 500;  // doubles per attempt
};

/// Client for any HTTP JSON chat-completion-compatible endpoint. Retries
/// transient failures (timeouts, non-2xx, malformed bodies) with bounded
/// exponential backoff before giving up with TransportError.
class HttpChatTransport : public ChatTransport {
  public:
    explicit HttpChatTransport(HttpTransportOptions opts = {})
        : opts_(std::move(opts)), gate_(opts_.max_in_flight) {
        auto split = detail_transport::split_url(opts_.endpoint_url);
        base_ = split.base;
        path_ = split.path;
        if (const char* key = std::getenv(kApiKeyEnvVar)) api_key_ = key;
    }

  protected:
    ChatResult do_complete(const std::vector<ChatMessage>& messages, const std::string& model,
                           double temperature) override {
        nlohmann::json body;
        body["model"] = model;
        body["temperature"] = temperature;
        body["messages"] = nlohmann::json::array();
        for (const auto& m : messages)
            body["messages"].push_back({{"role", m.role}, {"content", m.content}});
        const std::string payload = body.dump();

        std::string last_error;
        for (int attempt = 0; attempt < opts_.max_attempts; ++attempt) {
            if (attempt > 0) {
                int delay = opts_.backoff_initial_ms << (attempt - 1);
                std::this_thread::sleep_for(std::chrono::milliseconds(delay));
            }
            auto token = gate_.acquire();
            httplib::Client cli(base_);
            int conn_s = static_cast<int>(opts_.timeout_seconds);
            int conn_us = static_cast<int>((opts_.timeout_seconds - conn_s) * 1e6);
            cli.set_connection_timeout(conn_s, conn_us);
            cli.set_read_timeout(conn_s, conn_us);
            cli.set_write_timeout(conn_s, conn_us);
            httplib::Headers headers;
            if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

            auto res = cli.Post(path_, headers, payload, "application/json");
            if (!res) {
                last_error = "transport failure: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status < 200 || res->status >= 300) {
                last_error = "endpoint returned HTTP " + std::to_string(res->status);
                continue;
            }
            try {
                auto j = nlohmann::json::parse(res->body);
                ChatResult out;
                out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
                if (j.contains("usage")) {
                    out.prompt_tokens = j["usage"].value("prompt_tokens", -1);
                    out.completion_tokens = j["usage"].value("completion_tokens", -1);
                }
                return out;
            } catch (const nlohmann::json::exception& e) {
                last_error = std::string("malformed completion body: ") + e.what();
                continue;
            }
        }
        throw TransportError(last_error + " (after " + std::to_string(opts_.max_attempts) +
                             " attempts)");
    }

  private:
    HttpTransportOptions opts_;
    detail_transport::InflightGate gate_;
    std::string base_;
    std::string path_;
    std::string api_key_;
};

}  // namespace diffprobe::agent
