#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <string>
#include <vector>

#include "puntua/llm.hpp"
#include "puntua/rules.hpp"
#include "stub_server.hpp"

using namespace puntua;

namespace {

std::vector<Utterance> words_only(const std::vector<std::vector<std::string>>& rows) {
  std::vector<Utterance> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Utterance u;
    u.id = "u" + std::to_string(i);
    u.words = rows[i];
    u.lexical.assign(rows[i].size(), TokenPrediction{});
    out.push_back(std::move(u));
  }
  return out;
}

LlmEndpointConfig config_for(const testutil::StubLlmServer& server) {
  LlmEndpointConfig cfg;
  cfg.base_url = server.base_url();
  cfg.model = "stub-model";
  cfg.api_key = "test-key";
  return cfg;
}

}  // namespace

TEST_CASE("echoing endpoint is fully reliable", "[llm]") {
  testutil::StubLlmServer server(
      [](const std::string& input, std::size_t) { return input + "."; });
  const auto utts = words_only({{"hola", "que", "tal"}, {"okey"}});
  const BenchRun run = benchmark_llm(utts, config_for(server), PromptTemplate{});
  REQUIRE(run.outcomes.size() == 2);
  CHECK(run.reliability_pct == 100.0);
  for (const auto& out : run.outcomes) {
    CHECK(out.reliable);
    CHECK(out.latency_s.has_value());
    CHECK_FALSE(out.transport_error);
  }
  CHECK(run.latency);
}

TEST_CASE("rewriting endpoint is unreliable but logged", "[llm]") {
  testutil::StubLlmServer server([](const std::string&, std::size_t) {
    return std::string("no puedo ayudar con eso");
  });
  const auto utts = words_only({{"hola"}, {"okey", "los"}});
  const BenchRun run = benchmark_llm(utts, config_for(server), PromptTemplate{});
  CHECK(run.reliability_pct == 0.0);
  for (const auto& out : run.outcomes) {
    CHECK_FALSE(out.reliable);
    // Raw output is retained for inspection.
    CHECK(out.output == "no puedo ayudar con eso");
    CHECK(out.latency_s.has_value());
  }
}

TEST_CASE("reliability tolerates casing and added marks only", "[llm]") {
  testutil::StubLlmServer server([](const std::string& input, std::size_t i) {
    if (i % 2 == 0) return "¿" + input + "?";
    return input + " bueno";
  });
  const auto utts = words_only({{"a"}, {"b"}, {"c"}, {"d"}});
  const BenchRun run = benchmark_llm(utts, config_for(server), PromptTemplate{});
  CHECK(run.reliability_pct == 50.0);
}

TEST_CASE("transport failures retry then record as unreliable", "[llm]") {
  testutil::StubLlmServer server(
      [](const std::string& input, std::size_t) { return input; });
  const auto utts = words_only({{"hola"}});

  SECTION("a retry rescues a flaky request") {
    server.fail_next(1);
    BenchOptions opt;
    opt.retries = 2;
    const BenchRun run =
        benchmark_llm(utts, config_for(server), PromptTemplate{}, opt);
    CHECK(run.outcomes[0].reliable);
    CHECK_FALSE(run.outcomes[0].transport_error);
  }

  SECTION("exhausted retries leave an error and no latency") {
    server.fail_next(100);
    BenchOptions opt;
    opt.retries = 1;
    CHECK_THROWS_AS(
        benchmark_llm(utts, config_for(server), PromptTemplate{}, opt),
        EndpointError);  // every utterance failed -> aggregate error
  }

  SECTION("partial failure is not aggregate failure") {
    const auto two = words_only({{"hola"}, {"adios"}});
    server.fail_next(2);  // first utterance burns its retries, second is fine
    BenchOptions opt;
    opt.retries = 1;
    const BenchRun run =
        benchmark_llm(two, config_for(server), PromptTemplate{}, opt);
    CHECK_FALSE(run.outcomes[0].reliable);
    CHECK(run.outcomes[0].transport_error);
    CHECK_FALSE(run.outcomes[0].latency_s.has_value());
    CHECK(run.outcomes[1].reliable);
    CHECK(run.reliability_pct == 50.0);
  }
}

TEST_CASE("configuration is validated before any request", "[llm]") {
  const auto utts = words_only({{"hola"}});
  LlmEndpointConfig cfg;
  cfg.base_url = "http://127.0.0.1:1";
  cfg.model = "m";
  CHECK_THROWS_AS(benchmark_llm(utts, cfg, PromptTemplate{}), ConfigError);

  cfg.api_key = "k";
  cfg.model = "";
  CHECK_THROWS_AS(benchmark_llm(utts, cfg, PromptTemplate{}), ConfigError);

  cfg.model = "m";
  cfg.base_url = "127.0.0.1:1";  // no scheme
  CHECK_THROWS_AS(benchmark_llm(utts, cfg, PromptTemplate{}), ConfigError);

  LlmEndpointConfig bad_inflight;
  bad_inflight.base_url = "http://127.0.0.1:1";
  bad_inflight.model = "m";
  bad_inflight.api_key = "k";
  BenchOptions opt;
  opt.max_inflight = 0;
  CHECK_THROWS_AS(benchmark_llm(utts, bad_inflight, PromptTemplate{}, opt),
                  ConfigError);
}

TEST_CASE("base url splitting", "[llm]") {
  const auto plain = detail::split_base_url("http://127.0.0.1:8089");
  CHECK(plain.scheme_host_port == "http://127.0.0.1:8089");
  CHECK(plain.path_prefix.empty());

  const auto prefixed = detail::split_base_url("https://api.example.com/v1/");
  CHECK(prefixed.scheme_host_port == "https://api.example.com");
  CHECK(prefixed.path_prefix == "/v1");

  CHECK_THROWS_AS(detail::split_base_url("api.example.com"), ConfigError);
}

TEST_CASE("empty utterances are rejected before any request", "[llm]") {
  Utterance u;
  u.id = "empty";
  LlmEndpointConfig cfg;
  cfg.base_url = "http://127.0.0.1:1";
  cfg.model = "m";
  cfg.api_key = "k";
  CHECK_THROWS_AS(benchmark_llm({u}, cfg, PromptTemplate{}), ValidationError);
}

TEST_CASE("api key env helper", "[llm]") {
  ::unsetenv(kApiKeyEnvVar);
  CHECK_THROWS_AS(api_key_from_env(), ConfigError);
  ::setenv(kApiKeyEnvVar, "secret", 1);
  CHECK(api_key_from_env() == "secret");
  ::unsetenv(kApiKeyEnvVar);
}

TEST_CASE("concurrent requests keep input order", "[llm]") {
  // Later utterances answer faster; outcomes must still land in order.
  testutil::StubLlmServer server([](const std::string& input, std::size_t) {
    const int delay = input.size() > 2 ? 40 : 5;
    std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    return input;
  });
  const auto utts =
      words_only({{"aaaa", "bbbb"}, {"cccc", "dddd"}, {"e"}, {"f"}});
  BenchOptions opt;
  opt.max_inflight = 4;
  const BenchRun run =
      benchmark_llm(utts, config_for(server), PromptTemplate{}, opt);
  REQUIRE(run.outcomes.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(run.outcomes[i].id == "u" + std::to_string(i));
    CHECK(run.outcomes[i].reliable);
  }
}

TEST_CASE("latency reflects endpoint delay", "[llm]") {
  testutil::StubLlmServer server(
      [](const std::string& input, std::size_t) { return input; }, 30);
  const auto utts = words_only({{"uno"}, {"dos"}, {"tres"}});
  const BenchRun run = benchmark_llm(utts, config_for(server), PromptTemplate{});
  REQUIRE(run.latency);
  CHECK(run.latency->mean_s >= 0.029);
  CHECK(run.latency->mean_s < 0.2);
  CHECK(run.latency->count == 3);
}

TEST_CASE("empty input produces an empty run", "[llm]") {
  testutil::StubLlmServer server(
      [](const std::string& input, std::size_t) { return input; });
  const BenchRun run = benchmark_llm({}, config_for(server), PromptTemplate{});
  CHECK(run.outcomes.empty());
  CHECK(server.requests_served() == 0);
}
