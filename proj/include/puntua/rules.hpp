#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "puntua/text.hpp"
#include "puntua/types.hpp"

namespace puntua {

// ---------------------------------------------------------------------------
// Deterministic rule-based lexical baseline. A stand-in channel so the full
// pipeline can run and be demoed without a trained classifier: interrogative
// cue words make the utterance a question, discourse markers draw commas.
// ---------------------------------------------------------------------------

struct RuleTable {
  std::vector<std::string> interrogative_cues = {
      "qué",  "que",  "cómo",   "como",   "cuándo", "cuando", "dónde",
      "donde", "cuál", "cual",  "quién",  "quien",  "por"};
  std::vector<std::string> discourse_markers = {"okey", "bueno", "pues",
                                                "entonces"};
  double cue_question_prob = 0.90;
  double default_period_prob = 0.80;
  double marker_comma_prob = 0.85;
};

inline void validate_rules(const RuleTable& rules) {
  for (const double p : {rules.cue_question_prob, rules.default_period_prob,
                         rules.marker_comma_prob}) {
    if (p < 0.0 || p > 1.0) {
      throw ValidationError("rule probability " + std::to_string(p) +
                            " outside [0, 1]");
    }
  }
}

// Final token gets ? (with cue_question_prob) when any word is an
// interrogative cue, otherwise . (default_period_prob). Non-final discourse
// markers get , (marker_comma_prob). Everything else is NONE with prob 1.
// Leads are always NONE; pair repair supplies ¿ downstream.
inline std::vector<TokenPrediction> rule_lexical_predict(
    const std::vector<std::string>& words, const RuleTable& rules = {}) {
  if (words.empty()) {
    throw ValidationError("rule baseline: empty word sequence");
  }
  validate_rules(rules);

  const auto in = [](const std::vector<std::string>& set,
                     const std::string& w) {
    return std::find(set.begin(), set.end(), w) != set.end();
  };

  bool interrogative = false;
  std::vector<std::string> lowered;
  lowered.reserve(words.size());
  for (const auto& w : words) {
    lowered.push_back(casing::to_lower(w));
    if (in(rules.interrogative_cues, lowered.back())) interrogative = true;
  }

  std::vector<TokenPrediction> out(words.size(),
                                   TokenPrediction{Mark::None, Mark::None, 1.0});
  for (std::size_t i = 0; i + 1 < words.size(); ++i) {
    if (in(rules.discourse_markers, lowered[i])) {
      out[i].trail = Mark::Comma;
      out[i].prob = rules.marker_comma_prob;
    }
  }
  auto& last = out.back();
  if (interrogative) {
    last.trail = Mark::CloseQuestion;
    last.prob = rules.cue_question_prob;
  } else {
    last.trail = Mark::Period;
    last.prob = rules.default_period_prob;
  }
  return out;
}

}  // namespace puntua
