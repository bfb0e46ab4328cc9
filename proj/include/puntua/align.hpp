#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "puntua/text.hpp"
#include "puntua/types.hpp"

namespace puntua {

// ---------------------------------------------------------------------------
// Word-level Levenshtein alignment between an ASR hypothesis and a reference
// transcript. Comparison is case-insensitive and accent-sensitive.
// ---------------------------------------------------------------------------

enum class EditKind : std::uint8_t { Match, Substitute, Insert, Delete };

inline std::string_view to_string(EditKind k) {
  switch (k) {
    case EditKind::Match:
      return "MATCH";
    case EditKind::Substitute:
      return "SUBSTITUTE";
    case EditKind::Insert:
      return "INSERT";
    case EditKind::Delete:
      return "DELETE";
  }
  return "MATCH";
}

struct EditOp {
  EditKind kind = EditKind::Match;
  std::optional<std::size_t> hyp_index;  // Match/Substitute/Insert
  std::optional<std::size_t> ref_index;  // Match/Substitute/Delete

  bool operator==(const EditOp&) const = default;
};

struct EditScript {
  std::vector<EditOp> ops;
  std::size_t cost = 0;  // substitutions + insertions + deletions
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
};

// Minimal-cost script with unit costs. Ties resolve at each backtrace step by
// preferring Match/Substitute over Delete over Insert, which pins down one
// canonical script.
inline EditScript align_tokens(const std::vector<std::string>& hyp,
                               const std::vector<std::string>& ref) {
  const std::size_t h = hyp.size();
  const std::size_t r = ref.size();
  const std::vector<std::string> hl = casing::to_lower(hyp);
  const std::vector<std::string> rl = casing::to_lower(ref);

  std::vector<std::vector<int>> d(h + 1, std::vector<int>(r + 1, 0));
  for (std::size_t i = 1; i <= h; ++i) d[i][0] = static_cast<int>(i);
  for (std::size_t j = 1; j <= r; ++j) d[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= h; ++i) {
    for (std::size_t j = 1; j <= r; ++j) {
      const int sub = d[i - 1][j - 1] + (hl[i - 1] == rl[j - 1] ? 0 : 1);
      const int del = d[i][j - 1] + 1;  // reference word with no hyp word
      const int ins = d[i - 1][j] + 1;  // extra hypothesis word
      d[i][j] = std::min({sub, del, ins});
    }
  }

  EditScript script;
  script.cost = static_cast<std::size_t>(d[h][r]);
  script.hyp_len = h;
  script.ref_len = r;

  std::vector<EditOp> rev;
  std::size_t i = h;
  std::size_t j = r;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        d[i][j] == d[i - 1][j - 1] + (hl[i - 1] == rl[j - 1] ? 0 : 1)) {
      rev.push_back({hl[i - 1] == rl[j - 1] ? EditKind::Match
                                            : EditKind::Substitute,
                     i - 1, j - 1});
      --i;
      --j;
    } else if (j > 0 && d[i][j] == d[i][j - 1] + 1) {
      rev.push_back({EditKind::Delete, std::nullopt, j - 1});
      --j;
    } else {
      rev.push_back({EditKind::Insert, i - 1, std::nullopt});
      --i;
    }
  }
  script.ops.assign(rev.rbegin(), rev.rend());
  return script;
}

// ---------------------------------------------------------------------------
// Mark transfer across an alignment
// ---------------------------------------------------------------------------

inline int trail_merge_priority(Mark m) {
  switch (m) {
    case Mark::CloseQuestion:
      return 3;
    case Mark::Period:
      return 2;
    case Mark::Comma:
      return 1;
    default:
      return 0;
  }
}

// Moves hypothesis-side marks onto reference positions. Matched and
// substituted tokens copy both slots; an inserted token's trail settles on
// the nearest preceding aligned reference token, its lead on the nearest
// following one (dropped at the edges); deleted reference tokens come out
// unmarked. Collisions keep the higher-priority mark (? > . > , on trails).
inline std::vector<TokenPrediction> transfer_marks(
    const std::vector<TokenPrediction>& hyp_labels, const EditScript& script,
    std::size_t ref_len) {
  if (script.hyp_len != hyp_labels.size()) {
    throw StructuralError("transfer_marks: script covers " +
                          std::to_string(script.hyp_len) +
                          " hypothesis tokens, got " +
                          std::to_string(hyp_labels.size()) + " labels");
  }
  if (script.ref_len != ref_len) {
    throw StructuralError("transfer_marks: script covers " +
                          std::to_string(script.ref_len) +
                          " reference tokens, expected " +
                          std::to_string(ref_len));
  }

  std::vector<TokenPrediction> out(ref_len);

  const std::size_t n = script.ops.size();
  std::vector<std::optional<std::size_t>> prev_aligned(n), next_aligned(n);
  std::optional<std::size_t> seen;
  for (std::size_t k = 0; k < n; ++k) {
    prev_aligned[k] = seen;
    const auto& op = script.ops[k];
    if (op.kind == EditKind::Match || op.kind == EditKind::Substitute) {
      seen = *op.ref_index;
      out[*op.ref_index] = hyp_labels[*op.hyp_index];
    }
  }
  seen.reset();
  for (std::size_t k = n; k-- > 0;) {
    next_aligned[k] = seen;
    const auto& op = script.ops[k];
    if (op.kind == EditKind::Match || op.kind == EditKind::Substitute) {
      seen = *op.ref_index;
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    const auto& op = script.ops[k];
    if (op.kind != EditKind::Insert) continue;
    const TokenPrediction& t = hyp_labels[*op.hyp_index];
    if (t.trail != Mark::None && prev_aligned[k]) {
      Mark& slot = out[*prev_aligned[k]].trail;
      if (trail_merge_priority(t.trail) > trail_merge_priority(slot)) {
        slot = t.trail;
      }
    }
    if (t.lead == Mark::OpenQuestion && next_aligned[k]) {
      out[*next_aligned[k]].lead = Mark::OpenQuestion;
    }
  }
  return out;
}

}  // namespace puntua
