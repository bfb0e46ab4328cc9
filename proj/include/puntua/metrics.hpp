#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "puntua/align.hpp"
#include "puntua/text.hpp"
#include "puntua/types.hpp"

namespace puntua {

// Report row order for the four scored classes. NONE is never a class.
inline constexpr std::array<Mark, 4> kScoredMarks = {
    Mark::CloseQuestion, Mark::OpenQuestion, Mark::Comma, Mark::Period};

inline int scored_index(Mark m) {
  for (std::size_t i = 0; i < kScoredMarks.size(); ++i) {
    if (kScoredMarks[i] == m) return static_cast<int>(i);
  }
  return -1;
}

struct MarkCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  MarkCounts& operator+=(const MarkCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const MarkCounts&) const = default;
};

struct MarkConfusion {
  std::array<MarkCounts, 4> by_mark{};

  MarkCounts& at(Mark m) { return by_mark[static_cast<std::size_t>(scored_index(m))]; }
  const MarkCounts& at(Mark m) const {
    return by_mark[static_cast<std::size_t>(scored_index(m))];
  }

  MarkCounts pooled() const {
    MarkCounts sum;
    for (const auto& c : by_mark) sum += c;
    return sum;
  }

  MarkConfusion& operator+=(const MarkConfusion& o) {
    for (std::size_t i = 0; i < by_mark.size(); ++i) by_mark[i] += o.by_mark[i];
    return *this;
  }

  // Keeps one class and zeroes the rest (single-mark evaluations).
  MarkConfusion only(Mark keep) const {
    MarkConfusion out;
    out.at(keep) = at(keep);
    return out;
  }

  bool operator==(const MarkConfusion&) const = default;
};

namespace detail {

inline void score_slot(Mark pred, Mark ref, MarkConfusion& acc) {
  if (pred == ref) {
    if (pred != Mark::None) ++acc.at(pred).tp;
    return;
  }
  if (pred != Mark::None) ++acc.at(pred).fp;
  if (ref != Mark::None) ++acc.at(ref).fn;
}

}  // namespace detail

// Strict positional scoring: a predicted mark counts as a true positive only
// when the reference holds the same mark at the same token and slot.
inline void score_sequence(const std::vector<TokenPrediction>& pred,
                           const std::vector<TokenPrediction>& ref,
                           MarkConfusion& acc) {
  if (pred.size() != ref.size()) {
    throw StructuralError("score_sequence: " + std::to_string(pred.size()) +
                          " predicted labels vs " + std::to_string(ref.size()) +
                          " reference labels");
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    detail::score_slot(pred[i].lead, ref[i].lead, acc);
    detail::score_slot(pred[i].trail, ref[i].trail, acc);
  }
}

inline MarkConfusion score_marks(
    const std::vector<std::vector<TokenPrediction>>& pred,
    const std::vector<std::vector<TokenPrediction>>& ref) {
  if (pred.size() != ref.size()) {
    throw StructuralError("score_marks: " + std::to_string(pred.size()) +
                          " predicted sequences vs " +
                          std::to_string(ref.size()) + " reference sequences");
  }
  MarkConfusion acc;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    score_sequence(pred[i], ref[i], acc);
  }
  return acc;
}

// Scores a prediction that rides the utterance's hypothesis words. When the
// utterance carries a diverging reference transcript, marks are first moved
// onto reference positions through the canonical alignment.
inline void score_against_reference(
    const std::vector<TokenPrediction>& pred_on_words, const Utterance& u,
    MarkConfusion& acc) {
  if (!u.reference) {
    throw ValidationError("utterance '" + u.id + "' has no reference track");
  }
  if (u.ref_words) {
    const EditScript script = align_tokens(u.words, *u.ref_words);
    score_sequence(transfer_marks(pred_on_words, script, u.ref_words->size()),
                   *u.reference, acc);
  } else {
    score_sequence(pred_on_words, *u.reference, acc);
  }
}

// ---------------------------------------------------------------------------
// Precision / recall / F1, with 0/0 taken as 0
// ---------------------------------------------------------------------------

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline Prf prf_from(const MarkCounts& c) {
  Prf out;
  out.precision = (c.tp + c.fp) > 0
                      ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp)
                      : 0.0;
  out.recall = (c.tp + c.fn) > 0
                   ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn)
                   : 0.0;
  out.f1 = (out.precision + out.recall) > 0.0
               ? 2.0 * out.precision * out.recall /
                     (out.precision + out.recall)
               : 0.0;
  return out;
}

inline double micro_f1(const MarkConfusion& c) { return prf_from(c.pooled()).f1; }

// ---------------------------------------------------------------------------
// WER on punctuation-stripped text: (S + D + I) / N_ref pooled over a corpus
// ---------------------------------------------------------------------------

struct WerBreakdown {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_words = 0;

  std::size_t errors() const { return substitutions + deletions + insertions; }
  double wer() const {
    return ref_words > 0
               ? static_cast<double>(errors()) / static_cast<double>(ref_words)
               : 0.0;
  }
};

inline WerBreakdown wer_breakdown(
    const std::vector<std::vector<std::string>>& hyp,
    const std::vector<std::vector<std::string>>& ref) {
  if (hyp.size() != ref.size()) {
    throw StructuralError("wer: " + std::to_string(hyp.size()) +
                          " hypothesis utterances vs " +
                          std::to_string(ref.size()) + " references");
  }
  if (ref.empty()) {
    throw ValidationError("wer: empty reference corpus");
  }
  WerBreakdown acc;
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    const auto h = strip_marks_lenient(hyp[i]);
    const auto r = strip_marks_lenient(ref[i]);
    const EditScript script = align_tokens(h, r);
    for (const auto& op : script.ops) {
      switch (op.kind) {
        case EditKind::Substitute:
          ++acc.substitutions;
          break;
        case EditKind::Delete:
          ++acc.deletions;
          break;
        case EditKind::Insert:
          ++acc.insertions;
          break;
        case EditKind::Match:
          break;
      }
    }
    acc.ref_words += r.size();
  }
  if (acc.ref_words == 0 && acc.errors() > 0) {
    throw ValidationError("wer: reference corpus has no words");
  }
  return acc;
}

inline double compute_wer(const std::vector<std::vector<std::string>>& hyp,
                          const std::vector<std::vector<std::string>>& ref) {
  return wer_breakdown(hyp, ref).wer();
}

// ---------------------------------------------------------------------------
// Reliability: output must reproduce the input words exactly, allowing only
// casing changes and the four marks
// ---------------------------------------------------------------------------

inline bool check_reliability(const std::vector<std::string>& input_words,
                              const std::string& llm_output) {
  return normalize_text_for_wer(llm_output) == casing::to_lower(input_words);
}

// ---------------------------------------------------------------------------
// Latency
// ---------------------------------------------------------------------------

struct LatencyStats {
  double mean_s = 0.0;
  double min_s = 0.0;
  double max_s = 0.0;
  double p50_s = 0.0;
  double p95_s = 0.0;
  std::size_t count = 0;
};

inline LatencyStats summarize_latency(const std::vector<double>& samples) {
  if (samples.empty()) {
    throw ValidationError("latency: no samples");
  }
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const auto pct = [&sorted](double p) {
    const std::size_t n = sorted.size();
    const std::size_t rank = static_cast<std::size_t>(
        std::ceil(p / 100.0 * static_cast<double>(n)));
    return sorted[std::min(n - 1, rank > 0 ? rank - 1 : 0)];
  };
  LatencyStats out;
  out.count = sorted.size();
  double sum = 0.0;
  for (const double s : sorted) sum += s;
  out.mean_s = sum / static_cast<double>(sorted.size());
  out.min_s = sorted.front();
  out.max_s = sorted.back();
  out.p50_s = pct(50.0);
  out.p95_s = pct(95.0);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation report
// ---------------------------------------------------------------------------

struct MarkScore {
  double precision_pct = 0.0;
  double recall_pct = 0.0;
  double f1_pct = 0.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
};

struct EvalReport {
  std::string mode;
  std::array<MarkScore, 4> per_mark{};  // kScoredMarks order
  double micro_f1_pct = 0.0;
  double wer = 0.0;  // rate, not percent
  std::optional<double> reliability_pct;
  std::optional<double> latency_mean_s;
  std::size_t utterances = 0;
  std::size_t fallbacks = 0;  // utterances scored without an acoustic track
};

inline EvalReport build_report(std::string mode, const MarkConfusion& conf,
                               double wer, std::size_t utterances,
                               std::size_t fallbacks = 0) {
  EvalReport report;
  report.mode = std::move(mode);
  for (std::size_t i = 0; i < kScoredMarks.size(); ++i) {
    const MarkCounts& c = conf.by_mark[i];
    const Prf p = prf_from(c);
    report.per_mark[i] = {p.precision * 100.0, p.recall * 100.0, p.f1 * 100.0,
                          c.tp, c.fp, c.fn};
  }
  report.micro_f1_pct = micro_f1(conf) * 100.0;
  report.wer = wer;
  report.utterances = utterances;
  report.fallbacks = fallbacks;
  return report;
}

inline std::string render_table(const EvalReport& report) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "mode: " << report.mode << "  (" << report.utterances
     << " utterances";
  if (report.fallbacks > 0) {
    os << ", " << report.fallbacks << " without acoustic track";
  }
  os << ")\n";
  os << "mark      precision     recall         f1\n";
  for (std::size_t i = 0; i < kScoredMarks.size(); ++i) {
    const auto& s = report.per_mark[i];
    os << to_string(kScoredMarks[i]);
    for (std::size_t pad = to_string(kScoredMarks[i]).size(); pad < 10; ++pad) {
      os << ' ';
    }
    os.width(9);
    os << s.precision_pct;
    os.width(11);
    os << s.recall_pct;
    os.width(11);
    os << s.f1_pct;
    os << "\n";
  }
  os << "micro-F1  " << report.micro_f1_pct << "\n";
  os << "WER       " << report.wer * 100.0 << "%\n";
  if (report.reliability_pct) {
    os << "reliability  " << *report.reliability_pct << "%\n";
  }
  if (report.latency_mean_s) {
    os.precision(3);
    os << "latency mean  " << *report.latency_mean_s << " s\n";
    os.precision(2);
  }
  return os.str();
}

}  // namespace puntua
