#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "puntua/types.hpp"

namespace puntua {

// ---------------------------------------------------------------------------
// Chat prompts for the punctuation task. Few-shot prompting carries exactly
// three in-context examples which must jointly exercise all four marks.
// ---------------------------------------------------------------------------

enum class PromptMode : std::uint8_t { ZeroShot, FewShot };

struct ShotPair {
  std::string input;   // unpunctuated utterance
  std::string output;  // punctuated counterpart
};

struct PromptTemplate {
  PromptMode mode = PromptMode::ZeroShot;
  std::vector<ShotPair> shots;  // exactly 3 for FewShot, empty otherwise
};

inline constexpr std::string_view kPromptInstruction =
    "Without any explanation or modification, add punctuation to the "
    "following Spanish transcript from human conversations, use only "
    "punctuation marks from this list: comma(,), period(.), "
    "open_question(\xC2\xBF) and close_question(?). Return the punctuated "
    "utterance only.";

inline void validate_template(const PromptTemplate& tmpl) {
  if (tmpl.mode == PromptMode::ZeroShot) {
    if (!tmpl.shots.empty()) {
      throw ValidationError("zero-shot template carries no examples, got " +
                            std::to_string(tmpl.shots.size()));
    }
    return;
  }
  if (tmpl.shots.size() != 3) {
    throw ValidationError("few-shot template needs exactly 3 examples, got " +
                          std::to_string(tmpl.shots.size()));
  }
  std::string joined;
  for (const auto& s : tmpl.shots) joined += s.output;
  for (const std::string_view mark : {std::string_view("\xC2\xBF"),
                                      std::string_view("?"),
                                      std::string_view(","),
                                      std::string_view(".")}) {
    if (joined.find(mark) == std::string::npos) {
      throw ValidationError(
          "few-shot examples must jointly contain every target mark; '" +
          std::string(mark) + "' is missing");
    }
  }
}

inline std::string build_prompt(std::string_view text,
                                const PromptTemplate& tmpl) {
  if (text.empty()) {
    throw ValidationError("prompt text is empty");
  }
  validate_template(tmpl);
  std::string out(kPromptInstruction);
  if (tmpl.mode == PromptMode::FewShot) {
    out += " Here are some examples:\n";
    for (const auto& shot : tmpl.shots) {
      out += "### Input: " + shot.input + "\n";
      out += "### Output: " + shot.output + "\n\n";
    }
    out += "Now, add punctuation marks to:\n";
  } else {
    out += "\n\nAdd punctuation marks to:\n";
  }
  out += "### Input: ";
  out += text;
  out += "\n### Output:";
  return out;
}

// Shots file: a JSON array of three {"input", "output"} objects.
inline PromptTemplate load_shots(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open shots file: " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("shots file " + path.string() + ": " + e.what());
  }
  if (!doc.is_array()) {
    throw ParseError("shots file " + path.string() +
                     ": expected a JSON array of {input, output} pairs");
  }
  PromptTemplate tmpl;
  tmpl.mode = PromptMode::FewShot;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& e = doc[i];
    if (!e.is_object() || !e.contains("input") || !e.contains("output") ||
        !e["input"].is_string() || !e["output"].is_string()) {
      throw ParseError("shots file " + path.string() + ": entry " +
                       std::to_string(i) +
                       " must be {\"input\": ..., \"output\": ...}");
    }
    tmpl.shots.push_back({e["input"].get<std::string>(),
                          e["output"].get<std::string>()});
  }
  validate_template(tmpl);
  return tmpl;
}

}  // namespace puntua
