#pragma once

#include <optional>
#include <string>
#include <vector>

#include "puntua/consolidate.hpp"
#include "puntua/heuristics.hpp"
#include "puntua/llm.hpp"
#include "puntua/metrics.hpp"
#include "puntua/text.hpp"
#include "puntua/types.hpp"

namespace puntua {

// ---------------------------------------------------------------------------
// Restore: lexical + acoustic -> thresholding -> pair repair -> rendering
// ---------------------------------------------------------------------------

struct PipelineConfig {
  Thresholds thresholds{};
  bool lexical_only = false;
  bool debug = false;  // keep per-stage label tracks
};

struct StageTracks {
  std::vector<TokenPrediction> lexical;
  std::vector<TokenPrediction> consolidated;
  std::vector<TokenPrediction> repaired;
};

struct RestoredUtterance {
  std::string id;
  std::string text;
  bool fallback = false;  // hybrid requested but no acoustic track
  std::optional<StageTracks> stages;
};

struct RestoreResult {
  std::vector<RestoredUtterance> utterances;
  std::size_t fallbacks = 0;
};

inline RestoredUtterance restore_utterance(const Utterance& u,
                                           const PipelineConfig& cfg) {
  RestoredUtterance out;
  out.id = u.id;
  std::vector<TokenPrediction> consolidated;
  if (!cfg.lexical_only && u.acoustic) {
    consolidated = consolidate_sequence(u, cfg.thresholds);
  } else {
    consolidated = u.lexical;
    out.fallback = !cfg.lexical_only;
  }
  std::vector<TokenPrediction> repaired = apply_heuristics(consolidated);
  out.text = attach_marks(u.words, repaired);
  if (cfg.debug) {
    out.stages = StageTracks{u.lexical, std::move(consolidated),
                             std::move(repaired)};
  }
  return out;
}

inline RestoreResult run_restore(const std::vector<Utterance>& utterances,
                                 const PipelineConfig& cfg) {
  validate_thresholds(cfg.thresholds);
  RestoreResult result;
  result.utterances.reserve(utterances.size());
  for (const Utterance& u : utterances) {
    result.utterances.push_back(restore_utterance(u, cfg));
    if (result.utterances.back().fallback) ++result.fallbacks;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

enum class EvalMode : std::uint8_t { Lexical, Acoustic, Hybrid };

inline std::string_view to_string(EvalMode m) {
  switch (m) {
    case EvalMode::Lexical:
      return "lexical";
    case EvalMode::Acoustic:
      return "acoustic";
    case EvalMode::Hybrid:
      return "hybrid";
  }
  return "hybrid";
}

// Scores one channel against the references. Lexical runs the lexical track
// through pair repair; acoustic scores its raw question marks (C_Q is the
// only class it emits); hybrid runs the full pipeline. Predictions ride the
// hypothesis words and move across the alignment when a separate reference
// transcript is present. WER is pooled over the same word tracks.
inline EvalReport run_eval(const std::vector<Utterance>& utterances,
                           EvalMode mode, const PipelineConfig& cfg) {
  validate_thresholds(cfg.thresholds);
  MarkConfusion conf;
  std::size_t fallbacks = 0;
  std::vector<std::vector<std::string>> hyp_words;
  std::vector<std::vector<std::string>> ref_words;

  for (const Utterance& u : utterances) {
    if (!u.reference) {
      throw ValidationError("utterance '" + u.id + "' has no reference track");
    }
    std::vector<TokenPrediction> pred;
    switch (mode) {
      case EvalMode::Lexical:
        pred = apply_heuristics(u.lexical);
        break;
      case EvalMode::Acoustic: {
        if (!u.acoustic) {
          throw ValidationError("utterance '" + u.id +
                                "' has no acoustic track");
        }
        pred.reserve(u.acoustic->size());
        for (const auto& a : *u.acoustic) {
          pred.push_back(TokenPrediction{Mark::None, a.trail, std::nullopt});
        }
        break;
      }
      case EvalMode::Hybrid: {
        if (u.acoustic) {
          pred = hybrid_labels(u, cfg.thresholds);
        } else {
          pred = apply_heuristics(u.lexical);
          ++fallbacks;
        }
        break;
      }
    }
    score_against_reference(pred, u, conf);
    hyp_words.push_back(u.words);
    ref_words.push_back(u.ref_words ? *u.ref_words : u.words);
  }

  if (mode == EvalMode::Acoustic) {
    conf = conf.only(Mark::CloseQuestion);
  }
  const double wer =
      utterances.empty() ? 0.0 : compute_wer(hyp_words, ref_words);
  return build_report(std::string(to_string(mode)), conf, wer,
                      utterances.size(), fallbacks);
}

// ---------------------------------------------------------------------------
// Tuning
// ---------------------------------------------------------------------------

inline TuneResult run_tune(const std::vector<Utterance>& dev,
                           const GridSpec& grid, TuneObjective objective) {
  return tune_thresholds(dev, grid, objective);
}

// ---------------------------------------------------------------------------
// LLM benchmark scoring
// ---------------------------------------------------------------------------

struct BenchReport {
  BenchRun run;
  std::optional<EvalReport> eval;  // reliable subset, when references exist
  std::size_t scored = 0;
  std::size_t unparseable = 0;  // reliable but not decodable into labels
};

// Parses reliable outputs back into label tracks and scores them against the
// references. Unreliable outputs are excluded unless `include_unreliable` is
// set, which scores them as all-NONE instead (sensitivity analysis). Reliable
// outputs that still defy strict parsing (stacked marks) score as all-NONE.
inline BenchReport score_bench(const std::vector<Utterance>& utterances,
                               BenchRun run, bool include_unreliable = false) {
  BenchReport report;
  MarkConfusion conf;
  bool any_reference = false;
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    const Utterance& u = utterances[i];
    const BenchOutcome& out = run.outcomes[i];
    if (!u.reference) continue;
    any_reference = true;
    std::vector<TokenPrediction> pred;
    if (out.reliable) {
      try {
        StrippedUtterance stripped = strip_marks(out.output);
        pred = std::move(stripped.labels);
      } catch (const ValidationError&) {
        pred.assign(u.words.size(), TokenPrediction{});
        ++report.unparseable;
      }
    } else if (include_unreliable) {
      pred.assign(u.words.size(), TokenPrediction{});
    } else {
      continue;
    }
    score_against_reference(pred, u, conf);
    ++report.scored;
  }
  if (any_reference && report.scored > 0) {
    EvalReport eval = build_report("bench", conf, 0.0, report.scored);
    eval.reliability_pct = run.reliability_pct;
    if (run.latency) eval.latency_mean_s = run.latency->mean_s;
    report.eval = std::move(eval);
  }
  report.run = std::move(run);
  return report;
}

}  // namespace puntua
