#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "puntua/metrics.hpp"
#include "puntua/types.hpp"

namespace puntua {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Prediction files: UTF-8 JSON lines, one utterance per line.
//   {"id": ..., "words": [...], "lexical": [{"lead","trail","prob"?}, ...],
//    "acoustic": [{"trail"}, ...]?, "reference": [{"lead","trail"}, ...]?,
//    "ref_words": [...]?}
// ---------------------------------------------------------------------------

struct LoadOptions {
  // predict-rules consumes files whose lexical track is still to be produced.
  bool lexical_required = true;
};

namespace detail {

[[noreturn]] inline void record_error(std::size_t line, const std::string& path,
                                      const std::string& msg) {
  throw ParseError("line " + std::to_string(line) + ": " + path + ": " + msg);
}

inline Mark parse_mark(const json& j, std::size_t line,
                       const std::string& path) {
  if (!j.is_string()) record_error(line, path, "expected a label string");
  const auto m = mark_from_string(j.get<std::string>());
  if (!m) {
    record_error(line, path,
                 "unknown label '" + j.get<std::string>() +
                     "' (expected O_Q, C_Q, COMMA, PERIOD or NONE)");
  }
  return *m;
}

inline std::vector<std::string> parse_words(const json& j, std::size_t line,
                                            const std::string& path) {
  if (!j.is_array()) record_error(line, path, "expected an array of strings");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) {
      record_error(line, path + "[" + std::to_string(i) + "]",
                   "expected a string");
    }
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

}  // namespace detail

inline Utterance utterance_from_record(const json& rec, std::size_t line,
                                       const LoadOptions& opt = {}) {
  if (!rec.is_object()) detail::record_error(line, "record", "expected an object");
  Utterance u;

  if (!rec.contains("id") || !rec["id"].is_string()) {
    detail::record_error(line, "id", "missing or not a string");
  }
  u.id = rec["id"].get<std::string>();

  if (!rec.contains("words")) detail::record_error(line, "words", "missing");
  u.words = detail::parse_words(rec["words"], line, "words");

  if (rec.contains("lexical")) {
    const json& lx = rec["lexical"];
    if (!lx.is_array()) detail::record_error(line, "lexical", "expected an array");
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const std::string path = "lexical[" + std::to_string(i) + "]";
      const json& e = lx[i];
      if (!e.is_object()) detail::record_error(line, path, "expected an object");
      TokenPrediction t;
      if (e.contains("lead")) t.lead = detail::parse_mark(e["lead"], line, path + ".lead");
      if (e.contains("trail")) t.trail = detail::parse_mark(e["trail"], line, path + ".trail");
      if (e.contains("prob") && !e["prob"].is_null()) {
        if (!e["prob"].is_number()) {
          detail::record_error(line, path + ".prob", "expected a number");
        }
        t.prob = e["prob"].get<double>();
      }
      u.lexical.push_back(t);
    }
  } else if (opt.lexical_required) {
    detail::record_error(line, "lexical", "missing");
  } else {
    u.lexical.assign(u.words.size(), TokenPrediction{});
  }

  if (rec.contains("acoustic") && !rec["acoustic"].is_null()) {
    const json& ac = rec["acoustic"];
    if (!ac.is_array()) detail::record_error(line, "acoustic", "expected an array");
    std::vector<AcousticPrediction> track;
    for (std::size_t i = 0; i < ac.size(); ++i) {
      const std::string path = "acoustic[" + std::to_string(i) + "]";
      if (!ac[i].is_object()) detail::record_error(line, path, "expected an object");
      AcousticPrediction a;
      if (ac[i].contains("trail")) {
        a.trail = detail::parse_mark(ac[i]["trail"], line, path + ".trail");
      }
      track.push_back(a);
    }
    u.acoustic = std::move(track);
  }

  if (rec.contains("ref_words") && !rec["ref_words"].is_null()) {
    u.ref_words = detail::parse_words(rec["ref_words"], line, "ref_words");
  }

  if (rec.contains("reference") && !rec["reference"].is_null()) {
    const json& rf = rec["reference"];
    if (!rf.is_array()) detail::record_error(line, "reference", "expected an array");
    std::vector<TokenPrediction> track;
    for (std::size_t i = 0; i < rf.size(); ++i) {
      const std::string path = "reference[" + std::to_string(i) + "]";
      const json& e = rf[i];
      if (!e.is_object()) detail::record_error(line, path, "expected an object");
      TokenPrediction t;
      if (e.contains("lead")) t.lead = detail::parse_mark(e["lead"], line, path + ".lead");
      if (e.contains("trail")) t.trail = detail::parse_mark(e["trail"], line, path + ".trail");
      if (e.contains("prob") && !e["prob"].is_null()) {
        detail::record_error(line, path + ".prob",
                             "reference labels carry no prob");
      }
      track.push_back(t);
    }
    u.reference = std::move(track);
  }

  try {
    validate_utterance(u);
  } catch (const ValidationError& e) {
    throw ValidationError("line " + std::to_string(line) + ": " + e.what());
  }
  return u;
}

inline std::vector<Utterance> load_predictions(std::istream& in,
                                               const LoadOptions& opt = {}) {
  std::vector<Utterance> out;
  std::string buf;
  std::size_t line_no = 0;
  while (std::getline(in, buf)) {
    ++line_no;
    if (buf.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(buf);
    } catch (const json::parse_error& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(utterance_from_record(rec, line_no, opt));
  }
  return out;
}

inline std::vector<Utterance> load_predictions(
    const std::filesystem::path& path, const LoadOptions& opt = {}) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open prediction file: " + path.string());
  }
  return load_predictions(in, opt);
}

inline ordered_json record_from_utterance(const Utterance& u) {
  ordered_json rec;
  rec["id"] = u.id;
  rec["words"] = u.words;
  ordered_json lex = ordered_json::array();
  for (const auto& t : u.lexical) {
    ordered_json e;
    e["lead"] = to_string(t.lead);
    e["trail"] = to_string(t.trail);
    if (t.prob) e["prob"] = *t.prob;
    lex.push_back(std::move(e));
  }
  rec["lexical"] = std::move(lex);
  if (u.acoustic) {
    ordered_json ac = ordered_json::array();
    for (const auto& a : *u.acoustic) {
      ac.push_back(ordered_json{{"trail", to_string(a.trail)}});
    }
    rec["acoustic"] = std::move(ac);
  }
  if (u.reference) {
    ordered_json rf = ordered_json::array();
    for (const auto& t : *u.reference) {
      rf.push_back(ordered_json{{"lead", to_string(t.lead)},
                                {"trail", to_string(t.trail)}});
    }
    rec["reference"] = std::move(rf);
  }
  if (u.ref_words) rec["ref_words"] = *u.ref_words;
  return rec;
}

inline void save_predictions(std::ostream& out,
                             const std::vector<Utterance>& utterances) {
  for (const auto& u : utterances) {
    out << record_from_utterance(u).dump() << "\n";
  }
}

inline void save_predictions(const std::filesystem::path& path,
                             const std::vector<Utterance>& utterances) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write prediction file: " + path.string());
  }
  save_predictions(out, utterances);
}

// ---------------------------------------------------------------------------
// Machine-readable report records
// ---------------------------------------------------------------------------

inline ordered_json record_from_report(const EvalReport& report) {
  ordered_json rec;
  rec["type"] = "eval";
  rec["mode"] = report.mode;
  rec["utterances"] = report.utterances;
  ordered_json marks;
  for (std::size_t i = 0; i < kScoredMarks.size(); ++i) {
    const auto& s = report.per_mark[i];
    marks[std::string(to_string(kScoredMarks[i]))] =
        ordered_json{{"precision", s.precision_pct}, {"recall", s.recall_pct},
                     {"f1", s.f1_pct},               {"tp", s.tp},
                     {"fp", s.fp},                   {"fn", s.fn}};
  }
  rec["per_mark"] = std::move(marks);
  rec["micro_f1"] = report.micro_f1_pct;
  rec["wer"] = report.wer;
  if (report.reliability_pct) rec["reliability"] = *report.reliability_pct;
  if (report.latency_mean_s) rec["latency_mean_s"] = *report.latency_mean_s;
  if (report.fallbacks > 0) rec["fallbacks"] = report.fallbacks;
  return rec;
}

}  // namespace puntua
