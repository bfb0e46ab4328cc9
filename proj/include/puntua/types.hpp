#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace puntua {

// ---------------------------------------------------------------------------
// Errors. The CLI maps these onto exit codes: structural/validation/parse
// failures -> 1, configuration -> 2, endpoint -> 3.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Track shapes do not line up (length mismatches and the like).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Content violates an invariant (slot restriction, range, unsupported char).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Input file or record could not be decoded.
class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EndpointError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Label alphabet
// ---------------------------------------------------------------------------

enum class Mark : std::uint8_t {
  OpenQuestion,   // ¿  leading only
  CloseQuestion,  // ?  trailing
  Comma,          // ,  trailing
  Period,         // .  trailing
  None,
};

inline constexpr std::array<Mark, 5> kAllMarks = {
    Mark::OpenQuestion, Mark::CloseQuestion, Mark::Comma, Mark::Period,
    Mark::None};

inline std::string_view to_string(Mark m) {
  switch (m) {
    case Mark::OpenQuestion:
      return "O_Q";
    case Mark::CloseQuestion:
      return "C_Q";
    case Mark::Comma:
      return "COMMA";
    case Mark::Period:
      return "PERIOD";
    case Mark::None:
      return "NONE";
  }
  return "NONE";
}

inline std::optional<Mark> mark_from_string(std::string_view s) {
  for (Mark m : kAllMarks) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

// A lead slot sits before the word, a trail slot after it.
inline bool valid_lead(Mark m) {
  return m == Mark::OpenQuestion || m == Mark::None;
}

inline bool valid_trail(Mark m) { return m != Mark::OpenQuestion; }

// ---------------------------------------------------------------------------
// Per-token predictions
// ---------------------------------------------------------------------------

// One token's punctuation: lead slot (¿ or nothing), trail slot (? , . or
// nothing) and, for lexical predictions, the classifier confidence.
struct TokenPrediction {
  Mark lead = Mark::None;
  Mark trail = Mark::None;
  std::optional<double> prob;  // confidence of the trail prediction, in [0, 1]

  bool operator==(const TokenPrediction&) const = default;
};

inline void validate_token(const TokenPrediction& t,
                           std::string_view what = "token") {
  if (!valid_lead(t.lead)) {
    throw ValidationError(std::string(what) + ": lead slot cannot hold " +
                          std::string(to_string(t.lead)));
  }
  if (!valid_trail(t.trail)) {
    throw ValidationError(std::string(what) + ": trail slot cannot hold " +
                          std::string(to_string(t.trail)));
  }
  if (t.prob && (*t.prob < 0.0 || *t.prob > 1.0)) {
    throw ValidationError(std::string(what) + ": prob " +
                          std::to_string(*t.prob) + " outside [0, 1]");
  }
}

// The acoustic channel emits question marks only.
struct AcousticPrediction {
  Mark trail = Mark::None;  // CloseQuestion or None

  bool operator==(const AcousticPrediction&) const = default;
};

inline void validate_acoustic(const AcousticPrediction& a,
                              std::string_view what = "acoustic") {
  if (a.trail != Mark::CloseQuestion && a.trail != Mark::None) {
    throw ValidationError(std::string(what) +
                          ": acoustic channel is restricted to C_Q/NONE, got " +
                          std::string(to_string(a.trail)));
  }
}

// ---------------------------------------------------------------------------
// Thresholds
// ---------------------------------------------------------------------------

struct Thresholds {
  double t_question = 0.75;
  double t_declarative = 0.75;

  bool operator==(const Thresholds&) const = default;
};

inline void validate_thresholds(const Thresholds& th) {
  if (th.t_question < 0.0 || th.t_question > 1.0) {
    throw ValidationError("t_question " + std::to_string(th.t_question) +
                          " outside [0, 1]");
  }
  if (th.t_declarative < 0.0 || th.t_declarative > 1.0) {
    throw ValidationError("t_declarative " + std::to_string(th.t_declarative) +
                          " outside [0, 1]");
  }
}

// ---------------------------------------------------------------------------
// Utterance container
// ---------------------------------------------------------------------------

// True if the word contains any of ¿ ? , . — words must carry none of them.
inline bool word_has_mark_char(std::string_view w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto c = static_cast<unsigned char>(w[i]);
    if (c == '?' || c == ',' || c == '.') return true;
    if (c == 0xC2 && i + 1 < w.size() &&
        static_cast<unsigned char>(w[i + 1]) == 0xBF) {
      return true;
    }
  }
  return false;
}

// A word sequence with parallel label tracks. `lexical` always rides `words`.
// `reference` rides `ref_words` when that track is present (hypothesis scored
// against a diverging reference transcript), otherwise `words`.
struct Utterance {
  std::string id;
  std::vector<std::string> words;
  std::vector<TokenPrediction> lexical;
  std::optional<std::vector<AcousticPrediction>> acoustic;
  std::optional<std::vector<TokenPrediction>> reference;  // prob always absent
  std::optional<std::vector<std::string>> ref_words;
};

inline void validate_words(const std::vector<std::string>& words,
                           std::string_view track, std::string_view id) {
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i].empty()) {
      throw ValidationError("utterance '" + std::string(id) + "': " +
                            std::string(track) + "[" + std::to_string(i) +
                            "] is empty");
    }
    if (word_has_mark_char(words[i])) {
      throw ValidationError("utterance '" + std::string(id) + "': " +
                            std::string(track) + "[" + std::to_string(i) +
                            "] contains a punctuation mark: " + words[i]);
    }
  }
}

inline void validate_utterance(const Utterance& u) {
  validate_words(u.words, "words", u.id);
  if (u.lexical.size() != u.words.size()) {
    throw ValidationError("utterance '" + u.id + "': lexical track length " +
                          std::to_string(u.lexical.size()) +
                          " != words length " + std::to_string(u.words.size()));
  }
  for (std::size_t i = 0; i < u.lexical.size(); ++i) {
    validate_token(u.lexical[i],
                   "utterance '" + u.id + "': lexical[" + std::to_string(i) +
                       "]");
  }
  if (u.acoustic) {
    if (u.acoustic->size() != u.words.size()) {
      throw ValidationError("utterance '" + u.id +
                            "': acoustic track length " +
                            std::to_string(u.acoustic->size()) +
                            " != words length " +
                            std::to_string(u.words.size()));
    }
    for (std::size_t i = 0; i < u.acoustic->size(); ++i) {
      validate_acoustic((*u.acoustic)[i], "utterance '" + u.id +
                                              "': acoustic[" +
                                              std::to_string(i) + "]");
    }
  }
  if (u.ref_words) {
    validate_words(*u.ref_words, "ref_words", u.id);
  }
  if (u.reference) {
    const std::size_t expect =
        u.ref_words ? u.ref_words->size() : u.words.size();
    if (u.reference->size() != expect) {
      throw ValidationError("utterance '" + u.id +
                            "': reference track length " +
                            std::to_string(u.reference->size()) +
                            " != expected length " + std::to_string(expect));
    }
    for (std::size_t i = 0; i < u.reference->size(); ++i) {
      const auto& t = (*u.reference)[i];
      const std::string what =
          "utterance '" + u.id + "': reference[" + std::to_string(i) + "]";
      validate_token(t, what);
      if (t.prob) {
        throw ValidationError(what + ": reference labels carry no prob");
      }
    }
  } else if (u.ref_words) {
    throw ValidationError("utterance '" + u.id +
                          "': ref_words present without a reference track");
  }
}

}  // namespace puntua
