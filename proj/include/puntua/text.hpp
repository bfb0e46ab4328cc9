#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "puntua/types.hpp"

namespace puntua {

// ---------------------------------------------------------------------------
// Casing. ASCII plus the Latin-1 supplement letters, which covers Spanish
// orthography (á é í ó ú ñ ü). Other code points pass through untouched.
// ---------------------------------------------------------------------------

namespace casing {

inline std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c >= 'A' && c <= 'Z') {
      out.push_back(static_cast<char>(c - 'A' + 'a'));
      continue;
    }
    // À..Þ (0xC3 0x80..0x9E) -> à..þ, skipping the multiplication sign.
    if (c == 0xC3 && i + 1 < s.size()) {
      const auto d = static_cast<unsigned char>(s[i + 1]);
      if (d >= 0x80 && d <= 0x9E && d != 0x97) {
        out.push_back(static_cast<char>(0xC3));
        out.push_back(static_cast<char>(d + 0x20));
        ++i;
        continue;
      }
    }
    out.push_back(static_cast<char>(c));
  }
  return out;
}

inline std::string uppercase_first(std::string_view s) {
  if (s.empty()) return {};
  std::string out;
  out.reserve(s.size());
  const auto c = static_cast<unsigned char>(s[0]);
  std::size_t rest = 1;
  if (c >= 'a' && c <= 'z') {
    out.push_back(static_cast<char>(c - 'a' + 'A'));
  } else if (c == 0xC3 && s.size() >= 2) {
    const auto d = static_cast<unsigned char>(s[1]);
    if (d >= 0xA0 && d <= 0xBE && d != 0xB7) {
      out.push_back(static_cast<char>(0xC3));
      out.push_back(static_cast<char>(d - 0x20));
      rest = 2;
    } else {
      out.push_back(static_cast<char>(c));
    }
  } else {
    out.push_back(static_cast<char>(c));
  }
  out.append(s.substr(rest));
  return out;
}

inline std::vector<std::string> to_lower(const std::vector<std::string>& ws) {
  std::vector<std::string> out;
  out.reserve(ws.size());
  for (const auto& w : ws) out.push_back(to_lower(w));
  return out;
}

}  // namespace casing

inline constexpr std::string_view kOpenQuestionUtf8 = "\xC2\xBF";  // ¿

inline char trail_char(Mark m) {
  switch (m) {
    case Mark::CloseQuestion:
      return '?';
    case Mark::Comma:
      return ',';
    case Mark::Period:
      return '.';
    default:
      return '\0';
  }
}

// ---------------------------------------------------------------------------
// Rendering: labeled tokens -> punctuated text
// ---------------------------------------------------------------------------

// Joins words with single spaces, prefixes ¿ and suffixes ? , . per label.
// The first word and every word after a sentence-final mark (. or ?) gets its
// first letter uppercased.
inline std::string attach_marks(const std::vector<std::string>& words,
                                const std::vector<TokenPrediction>& labels) {
  if (words.size() != labels.size()) {
    throw StructuralError("attach_marks: " + std::to_string(words.size()) +
                          " words vs " + std::to_string(labels.size()) +
                          " labels");
  }
  std::string out;
  bool capitalize = true;
  for (std::size_t i = 0; i < words.size(); ++i) {
    validate_token(labels[i], "attach_marks: labels[" + std::to_string(i) +
                                  "]");
    if (i > 0) out.push_back(' ');
    if (labels[i].lead == Mark::OpenQuestion) out.append(kOpenQuestionUtf8);
    out.append(capitalize ? casing::uppercase_first(words[i]) : words[i]);
    if (const char t = trail_char(labels[i].trail); t != '\0') {
      out.push_back(t);
    }
    capitalize = labels[i].trail == Mark::Period ||
                 labels[i].trail == Mark::CloseQuestion;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ingestion: punctuated text -> lowercased words + labels
// ---------------------------------------------------------------------------

struct StrippedUtterance {
  std::vector<std::string> words;           // lowercased
  std::vector<TokenPrediction> labels;      // prob absent
};

namespace detail {

inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

inline bool is_ascii_punct(unsigned char c) {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') ||
         (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

[[noreturn]] inline void throw_char_error(std::string_view what,
                                          std::string_view shown,
                                          std::size_t offset) {
  throw ValidationError(std::string(what) + " '" + std::string(shown) +
                        "' at offset " + std::to_string(offset));
}

}  // namespace detail

// Strict parser for text that carries only the four target marks. Each word
// may bear at most one leading ¿ and one trailing mark; anything else is
// rejected with the offending character and byte offset.
inline StrippedUtterance strip_marks(std::string_view text) {
  StrippedUtterance out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (detail::is_space(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < text.size() &&
           !detail::is_space(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    const std::string_view tok = text.substr(start, i - start);

    std::size_t p = 0;
    std::size_t lead_count = 0;
    while (tok.size() - p >= 2 &&
           static_cast<unsigned char>(tok[p]) == 0xC2 &&
           static_cast<unsigned char>(tok[p + 1]) == 0xBF) {
      ++lead_count;
      p += 2;
    }
    if (lead_count > 1) {
      detail::throw_char_error("multiple adjacent leading marks",
                               kOpenQuestionUtf8, start + 2);
    }

    std::size_t q = tok.size();
    std::size_t trail_count = 0;
    char last_trail = '\0';
    while (q > p) {
      const char c = tok[q - 1];
      if (c == '?' || c == ',' || c == '.') {
        if (trail_count == 0) last_trail = c;
        ++trail_count;
        --q;
      } else {
        break;
      }
    }
    if (trail_count > 1) {
      detail::throw_char_error("multiple adjacent trailing marks on one word",
                               std::string_view(&tok[q], 1), start + q);
    }

    const std::string_view core = tok.substr(p, q - p);
    if (core.empty()) {
      throw ValidationError("token at offset " + std::to_string(start) +
                            " has no word characters");
    }
    for (std::size_t k = 0; k < core.size(); ++k) {
      const auto c = static_cast<unsigned char>(core[k]);
      const std::size_t off = start + p + k;
      if (c == '?' || c == ',' || c == '.') {
        detail::throw_char_error("misplaced punctuation mark",
                                 std::string_view(&core[k], 1), off);
      }
      if (c < 0x80 && detail::is_ascii_punct(c)) {
        detail::throw_char_error("unsupported punctuation character",
                                 std::string_view(&core[k], 1), off);
      }
      if (c == 0xC2 && k + 1 < core.size()) {
        const auto d = static_cast<unsigned char>(core[k + 1]);
        if (d == 0xBF) {
          detail::throw_char_error("misplaced punctuation mark",
                                   kOpenQuestionUtf8, off);
        }
        if (d == 0xA1) {
          detail::throw_char_error("unsupported punctuation character",
                                   "\xC2\xA1", off);
        }
      }
    }

    TokenPrediction label;
    label.lead = lead_count ? Mark::OpenQuestion : Mark::None;
    switch (last_trail) {
      case '?':
        label.trail = Mark::CloseQuestion;
        break;
      case ',':
        label.trail = Mark::Comma;
        break;
      case '.':
        label.trail = Mark::Period;
        break;
      default:
        label.trail = Mark::None;
    }
    out.words.push_back(casing::to_lower(core));
    out.labels.push_back(label);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Permissive normalization used by WER and reliability checks: delete the
// four mark characters wherever they occur, lowercase, drop emptied tokens.
// ---------------------------------------------------------------------------

inline std::vector<std::string> strip_marks_lenient(
    const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& tok : tokens) {
    std::string kept;
    kept.reserve(tok.size());
    for (std::size_t i = 0; i < tok.size(); ++i) {
      const auto c = static_cast<unsigned char>(tok[i]);
      if (c == '?' || c == ',' || c == '.') continue;
      if (c == 0xC2 && i + 1 < tok.size() &&
          static_cast<unsigned char>(tok[i + 1]) == 0xBF) {
        ++i;
        continue;
      }
      kept.push_back(static_cast<char>(c));
    }
    if (!kept.empty()) out.push_back(casing::to_lower(kept));
  }
  return out;
}

inline std::vector<std::string> normalize_text_for_wer(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (detail::is_space(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < text.size() &&
           !detail::is_space(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    tokens.emplace_back(text.substr(start, i - start));
  }
  return strip_marks_lenient(tokens);
}

inline std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out.append(words[i]);
  }
  return out;
}

}  // namespace puntua
