#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "puntua/metrics.hpp"
#include "puntua/prompt.hpp"
#include "puntua/text.hpp"
#include "puntua/types.hpp"

namespace puntua {

inline constexpr const char* kApiKeyEnvVar = "PUNTUA_LLM_API_KEY";

// Key comes from the environment only, never from a flag.
inline std::string api_key_from_env() {
  const char* v = std::getenv(kApiKeyEnvVar);
  if (v == nullptr || *v == '\0') {
    throw ConfigError(std::string(kApiKeyEnvVar) + " is not set");
  }
  return v;
}

// Minimal chat-completion endpoint: one user message per request, no system
// prompt, so any compatible server works.
struct LlmEndpointConfig {
  std::string base_url;  // scheme://host[:port][/prefix]
  std::string model;
  double temperature = 0.2;
  int max_output_tokens = 1024;
  std::string api_key;
  std::string chat_path = "/v1/chat/completions";
  int timeout_s = 60;
};

struct BenchOptions {
  int max_inflight = 1;  // >1 contaminates latency; off by default
  int retries = 2;       // extra attempts after a transport failure
};

struct BenchOutcome {
  std::string id;
  std::string output;                 // raw content, kept even when unreliable
  bool reliable = false;
  std::optional<double> latency_s;    // absent when transport never succeeded
  std::optional<std::string> transport_error;
};

struct BenchRun {
  std::vector<BenchOutcome> outcomes;  // input order
  double reliability_pct = 0.0;
  std::optional<LatencyStats> latency;
};

namespace detail {

struct SplitUrl {
  std::string scheme_host_port;
  std::string path_prefix;
};

inline SplitUrl split_base_url(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint URL needs a scheme: " + base_url);
  }
  const auto path_start = base_url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {base_url, ""};
  }
  std::string prefix = base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, path_start), prefix};
}

struct CallResult {
  std::string content;
  double latency_s = 0.0;
};

// One request, timed from request build through response parse.
inline CallResult call_once(httplib::Client& client,
                            const LlmEndpointConfig& cfg,
                            const std::string& path,
                            const std::string& prompt) {
  const auto t0 = std::chrono::steady_clock::now();
  nlohmann::json body;
  body["model"] = cfg.model;
  body["temperature"] = cfg.temperature;
  body["max_tokens"] = cfg.max_output_tokens;
  body["messages"] =
      nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
  const std::string payload = body.dump();

  httplib::Result res = client.Post(path, payload, "application/json");
  if (!res) {
    throw EndpointError("transport failure: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw EndpointError("HTTP " + std::to_string(res->status) + ": " +
                        res->body.substr(0, 200));
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw EndpointError(std::string("malformed response body: ") + e.what());
  }
  if (!doc.contains("choices") || !doc["choices"].is_array() ||
      doc["choices"].empty() ||
      !doc["choices"][0].contains("message") ||
      !doc["choices"][0]["message"].contains("content") ||
      !doc["choices"][0]["message"]["content"].is_string()) {
    throw EndpointError("response carries no choices[0].message.content");
  }
  CallResult out;
  out.content = doc["choices"][0]["message"]["content"].get<std::string>();
  const auto t1 = std::chrono::steady_clock::now();
  out.latency_s = std::chrono::duration<double>(t1 - t0).count();
  return out;
}

}  // namespace detail

// Runs every utterance through the endpoint: render the words bare, build the
// prompt, issue one completion, time it, and check that the output reproduces
// the input words. Transport failures are retried, then recorded as
// unreliable with no latency. Outcomes land in input order.
inline BenchRun benchmark_llm(const std::vector<Utterance>& utterances,
                              const LlmEndpointConfig& cfg,
                              const PromptTemplate& tmpl,
                              const BenchOptions& opt = {}) {
  if (cfg.api_key.empty()) {
    throw ConfigError(std::string("missing API key; set ") + kApiKeyEnvVar);
  }
  if (cfg.model.empty()) {
    throw ConfigError("missing model name");
  }
  if (opt.max_inflight < 1) {
    throw ConfigError("max_inflight must be >= 1");
  }
  validate_template(tmpl);
  for (const Utterance& u : utterances) {
    if (u.words.empty()) {
      throw ValidationError("utterance '" + u.id + "' has no words");
    }
  }
  const detail::SplitUrl url = detail::split_base_url(cfg.base_url);
  // A base URL with its own path prefix replaces the default API prefix.
  const std::string path = url.path_prefix.empty()
                               ? cfg.chat_path
                               : url.path_prefix + "/chat/completions";

  BenchRun run;
  run.outcomes.resize(utterances.size());
  if (utterances.empty()) return run;

  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    httplib::Client client(url.scheme_host_port);
    client.set_connection_timeout(cfg.timeout_s, 0);
    client.set_read_timeout(cfg.timeout_s, 0);
    client.set_default_headers({{"Authorization", "Bearer " + cfg.api_key}});
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= utterances.size()) break;
      const Utterance& u = utterances[i];
      BenchOutcome& out = run.outcomes[i];
      out.id = u.id;
      const std::string prompt = build_prompt(join_words(u.words), tmpl);
      std::string last_error;
      for (int attempt = 0; attempt <= opt.retries; ++attempt) {
        try {
          const detail::CallResult r = detail::call_once(client, cfg, path,
                                                         prompt);
          out.output = r.content;
          out.latency_s = r.latency_s;
          out.reliable = check_reliability(u.words, r.content);
          out.transport_error.reset();
          break;
        } catch (const EndpointError& e) {
          last_error = e.what();
          out.transport_error = last_error;
        }
      }
    }
  };

  const std::size_t workers = std::min<std::size_t>(
      static_cast<std::size_t>(opt.max_inflight), utterances.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::size_t reliable = 0;
  std::vector<double> latencies;
  std::size_t failures = 0;
  for (const auto& out : run.outcomes) {
    if (out.reliable) ++reliable;
    if (out.latency_s) latencies.push_back(*out.latency_s);
    if (out.transport_error) ++failures;
  }
  if (failures == utterances.size()) {
    throw EndpointError("every request failed; last error: " +
                        *run.outcomes.back().transport_error);
  }
  run.reliability_pct = 100.0 * static_cast<double>(reliable) /
                        static_cast<double>(utterances.size());
  if (!latencies.empty()) run.latency = summarize_latency(latencies);
  return run;
}

}  // namespace puntua
