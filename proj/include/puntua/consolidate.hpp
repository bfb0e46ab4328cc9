#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "puntua/heuristics.hpp"
#include "puntua/metrics.hpp"
#include "puntua/types.hpp"

namespace puntua {

// ---------------------------------------------------------------------------
// Acoustic/lexical consolidation. Two conflicts exist and each is settled by
// an inclusive threshold on the lexical confidence:
//   (a) acoustic says ? while lexical says . or ,  ->  ? wins iff
//       prob <= t_declarative
//   (b) acoustic is silent while lexical says ?    ->  demoted to . iff
//       prob <= t_question
// Everything else keeps the lexical trail, including an acoustic ? against a
// lexical NONE. Lead slots are untouched here.
// ---------------------------------------------------------------------------

enum class ConsolidationSource : std::uint8_t {
  LexicalKept,
  AcousticOverride,
  DemotedToPeriod,
};

struct ConsolidationOutcome {
  Mark trail = Mark::None;
  ConsolidationSource source = ConsolidationSource::LexicalKept;

  bool operator==(const ConsolidationOutcome&) const = default;
};

inline ConsolidationOutcome consolidate_token(const AcousticPrediction& pred_a,
                                              const TokenPrediction& pred_l,
                                              const Thresholds& th) {
  const auto require_prob = [&pred_l](const char* branch) -> double {
    if (!pred_l.prob) {
      throw ValidationError(std::string("consolidate_token: lexical prob "
                                        "missing but required when ") +
                            branch);
    }
    return *pred_l.prob;
  };

  if (pred_a.trail == Mark::CloseQuestion &&
      (pred_l.trail == Mark::Period || pred_l.trail == Mark::Comma)) {
    const double p =
        require_prob("acoustic C_Q conflicts with lexical PERIOD/COMMA");
    if (p <= th.t_declarative) {
      return {Mark::CloseQuestion, ConsolidationSource::AcousticOverride};
    }
    return {pred_l.trail, ConsolidationSource::LexicalKept};
  }
  if (pred_a.trail != Mark::CloseQuestion &&
      pred_l.trail == Mark::CloseQuestion) {
    const double p = require_prob("lexical C_Q lacks acoustic support");
    if (p <= th.t_question) {
      return {Mark::Period, ConsolidationSource::DemotedToPeriod};
    }
    return {Mark::CloseQuestion, ConsolidationSource::LexicalKept};
  }
  return {pred_l.trail, ConsolidationSource::LexicalKept};
}

// Element-wise consolidation over an utterance. Lead slots and probs pass
// through from the lexical track.
inline std::vector<TokenPrediction> consolidate_sequence(const Utterance& u,
                                                         const Thresholds& th) {
  if (!u.acoustic) {
    throw ValidationError("utterance '" + u.id + "' has no acoustic track");
  }
  if (u.acoustic->size() != u.lexical.size()) {
    throw StructuralError("utterance '" + u.id + "': acoustic track length " +
                          std::to_string(u.acoustic->size()) +
                          " != lexical track length " +
                          std::to_string(u.lexical.size()));
  }
  std::vector<TokenPrediction> out;
  out.reserve(u.lexical.size());
  for (std::size_t i = 0; i < u.lexical.size(); ++i) {
    TokenPrediction t = u.lexical[i];
    t.trail = consolidate_token((*u.acoustic)[i], u.lexical[i], th).trail;
    out.push_back(t);
  }
  return out;
}

// Consolidation followed by pair repair: the label track an utterance ends up
// with before rendering.
inline std::vector<TokenPrediction> hybrid_labels(const Utterance& u,
                                                  const Thresholds& th) {
  return apply_heuristics(consolidate_sequence(u, th));
}

// ---------------------------------------------------------------------------
// Threshold grid search
// ---------------------------------------------------------------------------

struct GridSpec {
  double start = 0.5;
  double stop = 1.0;
  double step = 0.05;
};

inline std::vector<double> grid_points(const GridSpec& grid) {
  if (grid.step <= 0.0) {
    throw ValidationError("grid step must be positive, got " +
                          std::to_string(grid.step));
  }
  if (grid.start > grid.stop) {
    throw ValidationError("grid start " + std::to_string(grid.start) +
                          " exceeds stop " + std::to_string(grid.stop));
  }
  // floor((stop - start) / step) + 1 points, with a tolerance so that e.g.
  // 0.5/0.05 lands on 10 rather than 9.
  const auto n = static_cast<std::size_t>(
      std::floor((grid.stop - grid.start) / grid.step + 1e-9)) + 1;
  std::vector<double> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    points.push_back(grid.start + static_cast<double>(i) * grid.step);
  }
  return points;
}

enum class TuneObjective : std::uint8_t { MicroF1, CqF1 };

struct GridPoint {
  Thresholds th;
  double objective_pct = 0.0;
  double micro_f1_pct = 0.0;
  double cq_f1_pct = 0.0;
};

struct TuneResult {
  Thresholds best;
  double objective_pct = 0.0;
  std::vector<GridPoint> surface;  // row-major: t_question outer, ascending
};

namespace detail {

struct TuneScores {
  double micro_pct = 0.0;
  double cq_pct = 0.0;
};

inline TuneScores tune_scores(const std::vector<Utterance>& dev,
                              const Thresholds& th) {
  MarkConfusion conf;
  for (const Utterance& u : dev) {
    score_against_reference(hybrid_labels(u, th), u, conf);
  }
  return {micro_f1(conf) * 100.0,
          prf_from(conf.at(Mark::CloseQuestion)).f1 * 100.0};
}

}  // namespace detail

// Exhaustive search over the grid, scoring the full pipeline (consolidation
// plus repair) against the references. Ties break toward higher C_Q F1, then
// lower t_question, then lower t_declarative.
inline TuneResult tune_thresholds(const std::vector<Utterance>& dev,
                                  const GridSpec& grid,
                                  TuneObjective objective) {
  if (dev.empty()) {
    throw ValidationError("tune: empty development set");
  }
  for (const Utterance& u : dev) {
    if (!u.acoustic) {
      throw ValidationError("tune: utterance '" + u.id +
                            "' has no acoustic track");
    }
    if (!u.reference) {
      throw ValidationError("tune: utterance '" + u.id +
                            "' has no reference track");
    }
  }

  const std::vector<double> points = grid_points(grid);
  TuneResult result;
  result.surface.reserve(points.size() * points.size());
  bool have_best = false;
  double best_cq = 0.0;

  for (const double tq : points) {
    for (const double td : points) {
      const Thresholds th{tq, td};
      const detail::TuneScores s = detail::tune_scores(dev, th);
      const double value =
          objective == TuneObjective::MicroF1 ? s.micro_pct : s.cq_pct;
      result.surface.push_back({th, value, s.micro_pct, s.cq_pct});
      // Ascending iteration keeps the lowest (t_question, t_declarative)
      // among exact ties.
      if (!have_best || value > result.objective_pct ||
          (value == result.objective_pct && s.cq_pct > best_cq)) {
        have_best = true;
        result.best = th;
        result.objective_pct = value;
        best_cq = s.cq_pct;
      }
    }
  }
  return result;
}

}  // namespace puntua
