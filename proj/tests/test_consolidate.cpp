#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "puntua/consolidate.hpp"
#include "testutil.hpp"

using namespace puntua;
using Catch::Matchers::WithinAbs;

namespace {

constexpr Mark N = Mark::None;
constexpr Mark OQ = Mark::OpenQuestion;
constexpr Mark CQ = Mark::CloseQuestion;
constexpr Mark CO = Mark::Comma;
constexpr Mark PE = Mark::Period;

TokenPrediction lex(Mark trail, std::optional<double> prob = std::nullopt) {
  return TokenPrediction{N, trail, prob};
}

AcousticPrediction ac(Mark trail) { return AcousticPrediction{trail}; }

}  // namespace

TEST_CASE("token consolidation branches", "[consolidate]") {
  const Thresholds th{0.75, 0.75};
  // Acoustic ? against lexical . : confidence at or under the threshold
  // surrenders to the acoustic channel.
  CHECK(consolidate_token(ac(CQ), lex(PE, 0.60), th) ==
        ConsolidationOutcome{CQ, ConsolidationSource::AcousticOverride});
  CHECK(consolidate_token(ac(CQ), lex(PE, 0.90), th) ==
        ConsolidationOutcome{PE, ConsolidationSource::LexicalKept});
  CHECK(consolidate_token(ac(CQ), lex(CO, 0.60), th) ==
        ConsolidationOutcome{CQ, ConsolidationSource::AcousticOverride});
  // Lexical ? without acoustic support demotes to a period.
  CHECK(consolidate_token(ac(N), lex(CQ, 0.60), th) ==
        ConsolidationOutcome{PE, ConsolidationSource::DemotedToPeriod});
  CHECK(consolidate_token(ac(N), lex(CQ, 0.90), th) ==
        ConsolidationOutcome{CQ, ConsolidationSource::LexicalKept});
  // The else branch ignores the confidence entirely.
  CHECK(consolidate_token(ac(N), lex(CO, 0.10), th) ==
        ConsolidationOutcome{CO, ConsolidationSource::LexicalKept});
  // Acoustic ? against lexical NONE falls through unchanged.
  CHECK(consolidate_token(ac(CQ), lex(N, 0.99), th) ==
        ConsolidationOutcome{N, ConsolidationSource::LexicalKept});
  // Both channels agreeing on ? needs no confidence at all.
  CHECK(consolidate_token(ac(CQ), lex(CQ), th) ==
        ConsolidationOutcome{CQ, ConsolidationSource::LexicalKept});
}

TEST_CASE("comparisons are inclusive at the boundary", "[consolidate]") {
  const Thresholds th{0.75, 0.75};
  CHECK(consolidate_token(ac(CQ), lex(PE, 0.75), th).trail == CQ);
  CHECK(consolidate_token(ac(N), lex(CQ, 0.75), th).trail == PE);
}

TEST_CASE("missing confidence only matters when a branch reads it",
          "[consolidate]") {
  const Thresholds th{0.75, 0.75};
  CHECK_THROWS_AS(consolidate_token(ac(CQ), lex(PE), th), ValidationError);
  CHECK_THROWS_AS(consolidate_token(ac(N), lex(CQ), th), ValidationError);
  CHECK_NOTHROW(consolidate_token(ac(N), lex(CO), th));
  CHECK_NOTHROW(consolidate_token(ac(CQ), lex(N), th));
}

TEST_CASE("sequence consolidation on the worked example", "[consolidate]") {
  Utterance u;
  u.id = "golden";
  u.words = {"okey", "los", "sábados", "están", "abiertos"};
  u.lexical = {lex(CO, 0.95), lex(N, 0.99), lex(N, 0.99), lex(N, 0.99),
               lex(PE, 0.60)};
  u.acoustic = std::vector<AcousticPrediction>{ac(N), ac(N), ac(N), ac(N),
                                               ac(CQ)};
  const auto out = consolidate_sequence(u, Thresholds{0.75, 0.75});
  REQUIRE(out.size() == 5);
  CHECK(out[0].trail == CO);
  CHECK(out[4].trail == CQ);
  for (const auto& t : out) CHECK(t.lead == N);
  // Confidence rides along untouched.
  CHECK(out[4].prob == 0.60);

  // Lead slots pass through untouched, whatever they hold.
  Utterance with_lead = u;
  with_lead.lexical[1].lead = OQ;
  const auto kept = consolidate_sequence(with_lead, Thresholds{0.75, 0.75});
  CHECK(kept[1].lead == OQ);

  Utterance no_acoustic = u;
  no_acoustic.acoustic.reset();
  CHECK_THROWS_AS(consolidate_sequence(no_acoustic, Thresholds{}),
                  ValidationError);
}

TEST_CASE("silent acoustic track only demotes weak questions", "[consolidate]") {
  Utterance u;
  u.id = "silent";
  u.words = {"a", "b", "c"};
  u.lexical = {lex(CQ, 0.60), lex(CO, 0.10), lex(CQ, 0.90)};
  u.acoustic = std::vector<AcousticPrediction>{ac(N), ac(N), ac(N)};
  const auto out = consolidate_sequence(u, Thresholds{0.75, 0.75});
  CHECK(out[0].trail == PE);
  CHECK(out[1].trail == CO);
  CHECK(out[2].trail == CQ);
}

TEST_CASE("zero thresholds keep the lexical channel when probs are positive",
          "[consolidate]") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> prob(0.01, 1.0);
  Utterance u;
  u.id = "zero";
  u.words.assign(50, "w");
  u.acoustic = std::vector<AcousticPrediction>(50);
  std::uniform_int_distribution<int> acq(0, 1);
  for (auto& a : *u.acoustic) a.trail = acq(rng) ? CQ : N;
  u.lexical.assign(50, lex(N));
  const std::vector<Mark> trails = {CQ, CO, PE, N};
  std::uniform_int_distribution<std::size_t> pick(0, 3);
  for (auto& t : u.lexical) {
    t.trail = trails[pick(rng)];
    t.prob = prob(rng);
  }
  const auto out = consolidate_sequence(u, Thresholds{0.0, 0.0});
  for (std::size_t i = 0; i < 50; ++i) CHECK(out[i].trail == u.lexical[i].trail);
}

TEST_CASE("saturated thresholds are acoustic-dominant", "[consolidate]") {
  const Thresholds th{1.0, 1.0};
  for (double p : {0.0, 0.3, 0.999, 1.0}) {
    CHECK(consolidate_token(ac(CQ), lex(PE, p), th).trail == CQ);
    CHECK(consolidate_token(ac(CQ), lex(CO, p), th).trail == CQ);
    CHECK(consolidate_token(ac(N), lex(CQ, p), th).trail == PE);
  }
}

TEST_CASE("agreement with the naive interpreter on random tokens",
          "[consolidate]") {
  std::mt19937 rng(606);
  std::uniform_int_distribution<int> coin(0, 1);
  const std::vector<Mark> trails = {CQ, CO, PE, N};
  std::uniform_int_distribution<std::size_t> pick(0, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int iter = 0; iter < 10000; ++iter) {
    const bool a_cq = coin(rng) == 1;
    const Mark l_trail = trails[pick(rng)];
    const double p = unit(rng);
    const Thresholds th{unit(rng), unit(rng)};
    const auto out = consolidate_token(ac(a_cq ? CQ : N), lex(l_trail, p), th);
    CHECK(out.trail == testutil::naive_consolidate(a_cq, l_trail, p,
                                                   th.t_question,
                                                   th.t_declarative));
    // Branch closure: the outcome is the lexical trail, ? or .
    CHECK((out.trail == l_trail || out.trail == CQ || out.trail == PE));
  }
}

TEST_CASE("threshold monotonicity", "[consolidate]") {
  std::mt19937 rng(607);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int iter = 0; iter < 10000; ++iter) {
    const double p = unit(rng);
    double lo = unit(rng), hi = unit(rng);
    if (lo > hi) std::swap(lo, hi);

    // Raising t_question never turns a demoted . back into ?
    const Mark at_lo =
        consolidate_token(ac(N), lex(CQ, p), Thresholds{lo, 0.5}).trail;
    const Mark at_hi =
        consolidate_token(ac(N), lex(CQ, p), Thresholds{hi, 0.5}).trail;
    if (at_lo == PE) CHECK(at_hi == PE);

    // Raising t_declarative never turns an acoustic ? back into the lexical
    // mark.
    for (Mark m : {PE, CO}) {
      const Mark d_lo =
          consolidate_token(ac(CQ), lex(m, p), Thresholds{0.5, lo}).trail;
      const Mark d_hi =
          consolidate_token(ac(CQ), lex(m, p), Thresholds{0.5, hi}).trail;
      if (d_lo == CQ) CHECK(d_hi == CQ);
    }
  }
}

TEST_CASE("grid arithmetic", "[consolidate]") {
  CHECK(grid_points({0.5, 1.0, 0.05}).size() == 11);
  CHECK(grid_points({0.5, 1.0, 0.05}).front() == 0.5);
  // A step larger than the range collapses to a single point.
  CHECK(grid_points({0.6, 0.7, 0.5}) == std::vector<double>{0.6});
  CHECK(grid_points({0.5, 0.5, 0.1}) == std::vector<double>{0.5});
  CHECK_THROWS_AS(grid_points({0.8, 0.2, 0.1}), ValidationError);
  CHECK_THROWS_AS(grid_points({0.0, 1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(grid_points({0.0, 1.0, -0.1}), ValidationError);
}

namespace {

// Dev utterance built so that each threshold axis has exactly one grid value
// of 0.05 granularity getting every token right: probs at 0.72 and 0.77
// bracket 0.75 from each side on both branches.
std::vector<Utterance> pinpoint_dev_set() {
  Utterance u;
  u.id = "dev0";
  u.words = {"a", "b", "c", "d"};
  u.lexical = {lex(PE, 0.72), lex(PE, 0.77), lex(CQ, 0.72), lex(CQ, 0.77)};
  u.acoustic = std::vector<AcousticPrediction>{ac(CQ), ac(CQ), ac(N), ac(N)};
  // What the pipeline renders at (0.75, 0.75): an override, a kept period, a
  // demotion and a kept question, plus the repaired ¿ leads.
  u.reference = std::vector<TokenPrediction>{
      {OQ, CQ, std::nullopt}, {N, PE, std::nullopt},
      {N, PE, std::nullopt}, {OQ, CQ, std::nullopt}};
  return {u};
}

}  // namespace

TEST_CASE("tuning finds the pinpointed optimum", "[consolidate]") {
  const auto dev = pinpoint_dev_set();
  const GridSpec grid{0.5, 1.0, 0.05};
  const TuneResult result = tune_thresholds(dev, grid, TuneObjective::MicroF1);
  CHECK(result.surface.size() == 121);

  // Independent exhaustive sweep with its own argmax and tie-break.
  const auto points = grid_points(grid);
  double best_obj = -1.0, best_cq = -1.0;
  Thresholds best{};
  for (const double tq : points) {
    for (const double td : points) {
      MarkConfusion conf;
      for (const auto& u : dev) {
        score_against_reference(hybrid_labels(u, {tq, td}), u, conf);
      }
      const double obj = micro_f1(conf) * 100.0;
      const double cq = prf_from(conf.at(CQ)).f1 * 100.0;
      if (obj > best_obj || (obj == best_obj && cq > best_cq)) {
        best_obj = obj;
        best_cq = cq;
        best = {tq, td};
      }
    }
  }
  CHECK(result.best == best);
  CHECK(result.objective_pct == best_obj);
  CHECK_THAT(result.best.t_question, WithinAbs(0.75, 1e-9));
  CHECK_THAT(result.best.t_declarative, WithinAbs(0.75, 1e-9));
  CHECK_THAT(result.objective_pct, WithinAbs(100.0, 1e-9));
}

TEST_CASE("tuning tie-break picks the smallest thresholds", "[consolidate]") {
  // The lexical channel already equals the reference and no acoustic
  // conflicts exist, so every grid point scores alike.
  Utterance u;
  u.id = "flat";
  u.words = {"hola", "que", "tal"};
  u.lexical = {lex(N, 0.9), lex(N, 0.9), lex(PE, 0.9)};
  u.acoustic = std::vector<AcousticPrediction>{ac(N), ac(N), ac(N)};
  u.reference = std::vector<TokenPrediction>{
      {N, N, std::nullopt}, {N, N, std::nullopt}, {N, PE, std::nullopt}};
  const TuneResult result =
      tune_thresholds({u}, GridSpec{0.5, 1.0, 0.05}, TuneObjective::MicroF1);
  CHECK_THAT(result.best.t_question, WithinAbs(0.5, 1e-9));
  CHECK_THAT(result.best.t_declarative, WithinAbs(0.5, 1e-9));
}

TEST_CASE("tuning validates inputs", "[consolidate]") {
  CHECK_THROWS_AS(
      tune_thresholds({}, GridSpec{}, TuneObjective::MicroF1),
      ValidationError);
  Utterance u;
  u.id = "x";
  u.words = {"a"};
  u.lexical = {lex(PE, 0.9)};
  u.reference = std::vector<TokenPrediction>{{N, PE, std::nullopt}};
  CHECK_THROWS_AS(tune_thresholds({u}, GridSpec{}, TuneObjective::MicroF1),
                  ValidationError);
  u.acoustic = std::vector<AcousticPrediction>{ac(N)};
  u.reference.reset();
  CHECK_THROWS_AS(tune_thresholds({u}, GridSpec{}, TuneObjective::MicroF1),
                  ValidationError);
}

TEST_CASE("single-point grid returns its corner", "[consolidate]") {
  Utterance u;
  u.id = "one";
  u.words = {"a"};
  u.lexical = {lex(PE, 0.9)};
  u.acoustic = std::vector<AcousticPrediction>{ac(N)};
  u.reference = std::vector<TokenPrediction>{{N, PE, std::nullopt}};
  const TuneResult result =
      tune_thresholds({u}, GridSpec{0.6, 0.7, 0.5}, TuneObjective::CqF1);
  CHECK(result.surface.size() == 1);
  CHECK_THAT(result.best.t_question, WithinAbs(0.6, 1e-9));
  CHECK_THAT(result.best.t_declarative, WithinAbs(0.6, 1e-9));
}
