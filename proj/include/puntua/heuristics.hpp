#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "puntua/types.hpp"

namespace puntua {

// ---------------------------------------------------------------------------
// Question-span pairing. Greedy left-to-right, non-nested: a ¿ lead opens a
// span, the next ? trail at the same or a later token closes it; a second ¿
// while a span is open orphans the earlier one and restarts the span.
// ---------------------------------------------------------------------------

struct PairScanResult {
  std::vector<std::pair<std::size_t, std::size_t>> matched_pairs;
  std::vector<std::size_t> unmatched_leads;
  std::vector<std::size_t> unmatched_trails;

  bool balanced() const {
    return unmatched_leads.empty() && unmatched_trails.empty();
  }
};

inline PairScanResult pair_scan(const std::vector<TokenPrediction>& labels) {
  PairScanResult result;
  bool open = false;
  std::size_t open_at = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].lead == Mark::OpenQuestion) {
      if (open) result.unmatched_leads.push_back(open_at);
      open = true;
      open_at = i;
    }
    if (labels[i].trail == Mark::CloseQuestion) {
      if (open) {
        result.matched_pairs.emplace_back(open_at, i);
        open = false;
      } else {
        result.unmatched_trails.push_back(i);
      }
    }
  }
  if (open) result.unmatched_leads.push_back(open_at);
  return result;
}

// First token of the continuous word chunk containing `j`: walk left while no
// punctuation sits strictly between tokens. A trail mark ends the chunk after
// its token; a lead mark starts a new chunk at its token.
inline std::size_t chunk_start(const std::vector<TokenPrediction>& labels,
                               std::size_t j) {
  std::size_t s = j;
  while (s > 0 && labels[s - 1].trail == Mark::None &&
         labels[s].lead == Mark::None) {
    --s;
  }
  return s;
}

struct RepairLog {
  std::size_t leads_cleared = 0;
  std::size_t leads_inserted = 0;
  // Chunk-first tokens that already carried a lead; kept as-is, not re-paired.
  std::vector<std::size_t> conflicts;
};

// Repairs unmatched question marks: orphaned ¿ leads become NONE, then every
// remaining orphaned ? gets a ¿ on the first token of its word chunk. Trail
// slots are never modified.
inline std::vector<TokenPrediction> apply_heuristics(
    std::vector<TokenPrediction> labels, RepairLog* log = nullptr) {
  const PairScanResult scan = pair_scan(labels);

  for (const std::size_t i : scan.unmatched_leads) {
    labels[i].lead = Mark::None;
    if (log) ++log->leads_cleared;
  }

  // Orphaned trails stay orphaned after step 1, and leads inserted here pair
  // up immediately: the chunk walk over the live labels sees both.
  for (const std::size_t j : scan.unmatched_trails) {
    const std::size_t s = chunk_start(labels, j);
    if (labels[s].lead != Mark::None) {
      if (log) log->conflicts.push_back(s);
      continue;
    }
    labels[s].lead = Mark::OpenQuestion;
    if (log) ++log->leads_inserted;
  }
  return labels;
}

}  // namespace puntua
