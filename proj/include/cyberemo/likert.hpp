#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "csv.hpp"
#include "error.hpp"
#include "observations.hpp"

namespace cyberemo {

enum class ThreadPolarity { pos, neg, neu };

// One report on three 7-point scales after reading a thread.
struct RawLikertRow {
  int likert_pos = 4;
  int likert_neg = 4;
  int likert_arousal = 4;
  ThreadPolarity thread_polarity = ThreadPolarity::neu;
  std::string participant_id;
  std::string study_id;
  long thread_index = 0;
  std::optional<double> exposure_minutes;
  std::optional<int> likert_participation;
};

struct RescaledReport {
  double valence = 0.0;
  double arousal = 0.0;
  double h = 0.0;
  std::optional<double> participation_intent;
};

inline bool likert_ok(int x) { return x >= 1 && x <= 7; }

// valence = (pos - neg) / 6, arousal = (arousal - 4) / 3, participation on
// [0, 1] as (x - 1) / 6.
inline RescaledReport rescale(const RawLikertRow& row) {
  if (!likert_ok(row.likert_pos) || !likert_ok(row.likert_neg) || !likert_ok(row.likert_arousal))
    throw ValidationError("Likert values must lie in 1..7");
  if (row.likert_participation && !likert_ok(*row.likert_participation))
    throw ValidationError("Likert values must lie in 1..7");
  RescaledReport out;
  out.valence = static_cast<double>(row.likert_pos - row.likert_neg) / 6.0;
  out.arousal = static_cast<double>(row.likert_arousal - 4) / 3.0;
  out.h = row.thread_polarity == ThreadPolarity::pos ? 1.0 : row.thread_polarity == ThreadPolarity::neg ? -1.0 : 0.0;
  if (row.likert_participation) out.participation_intent = static_cast<double>(*row.likert_participation - 1) / 6.0;
  return out;
}

struct IngestedReport {
  RawLikertRow raw;
  RescaledReport scaled;
  std::size_t line = 0;
};

struct IngestResult {
  std::vector<IngestedReport> reports;          // one per valid input row, input order
  std::vector<ObservationRecord> observations;  // consecutive report pairs per participant
  std::vector<std::string> errors;              // one per rejected row, "line N: ..."
};

// Parses raw Likert rows and pairs each report with the participant's
// previous one: the earlier report is the pre-state, the later report and
// its thread polarity give the post-state and h.
inline IngestResult ingest(std::istream& in) {
  const csv::Table table = csv::read_table(in);
  for (const char* col :
       {"participant_id", "study_id", "thread_index", "thread_polarity", "likert_pos", "likert_neg", "likert_arousal"})
    if (!table.has(col)) throw ValidationError(std::string("raw CSV lacks column '") + col + "'");

  IngestResult out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::size_t line = table.line_numbers[i];
    try {
      RawLikertRow row;
      row.participant_id = std::string(table.get(i, "participant_id"));
      row.study_id = std::string(table.get(i, "study_id"));
      auto integer = [&](const char* col) {
        auto v = csv::parse_int(table.get(i, col));
        if (!v) throw ValidationError(std::string("column '") + col + "' is not an integer");
        return *v;
      };
      row.thread_index = integer("thread_index");
      for (auto [col, dst] : {std::pair{"likert_pos", &row.likert_pos}, std::pair{"likert_neg", &row.likert_neg},
                              std::pair{"likert_arousal", &row.likert_arousal}}) {
        const long v = integer(col);
        if (v < 1 || v > 7) throw ValidationError(std::string("column '") + col + "' = " + std::to_string(v) + " outside 1..7");
        *dst = static_cast<int>(v);
      }
      if (table.has("likert_participation") && !table.get(i, "likert_participation").empty()) {
        const long v = integer("likert_participation");
        if (v < 1 || v > 7) throw ValidationError("column 'likert_participation' = " + std::to_string(v) + " outside 1..7");
        row.likert_participation = static_cast<int>(v);
      }
      const auto pol = table.get(i, "thread_polarity");
      if (pol == "pos") row.thread_polarity = ThreadPolarity::pos;
      else if (pol == "neg") row.thread_polarity = ThreadPolarity::neg;
      else if (pol == "neu") row.thread_polarity = ThreadPolarity::neu;
      else throw ValidationError("thread_polarity must be pos, neg or neu");
      if (table.has("exposure_minutes") && !table.get(i, "exposure_minutes").empty()) {
        auto m = csv::parse_double(table.get(i, "exposure_minutes"));
        if (!m || !(*m > 0.0)) throw ValidationError("exposure_minutes must be a positive number");
        row.exposure_minutes = *m;
      }
      out.reports.push_back({row, rescale(row), line});
    } catch (const ValidationError& e) {
      out.errors.push_back("line " + std::to_string(line) + ": " + e.what());
    }
  }

  std::map<std::pair<std::string, std::string>, const IngestedReport*> last;
  for (const auto& rep : out.reports) {
    const auto key = std::pair{rep.raw.study_id, rep.raw.participant_id};
    auto it = last.find(key);
    if (it != last.end()) {
      const auto& prev = *it->second;
      if (rep.raw.thread_index <= prev.raw.thread_index) {
        out.errors.push_back("line " + std::to_string(rep.line) + ": thread_index does not increase for participant " +
                             rep.raw.participant_id);
      } else {
        ObservationRecord r;
        r.participant_id = rep.raw.participant_id;
        r.study_id = rep.raw.study_id;
        r.h = rep.scaled.h;
        r.v_pre = prev.scaled.valence;
        r.a_pre = prev.scaled.arousal;
        r.v_post = rep.scaled.valence;
        r.a_post = rep.scaled.arousal;
        r.dt_minutes = rep.raw.exposure_minutes.value_or(1.0);
        r.participation_intent = rep.scaled.participation_intent;
        out.observations.push_back(std::move(r));
      }
    }
    last[key] = &rep;
  }
  return out;
}

inline void write_reports(std::ostream& os, const std::vector<IngestedReport>& reports) {
  using csv::format_double;
  os << "participant_id,study_id,thread_index,h,valence,arousal,participation_intent\n";
  for (const auto& r : reports) {
    os << r.raw.participant_id << ',' << r.raw.study_id << ',' << r.raw.thread_index << ',' << format_double(r.scaled.h)
       << ',' << format_double(r.scaled.valence) << ',' << format_double(r.scaled.arousal) << ',';
    if (r.scaled.participation_intent) os << format_double(*r.scaled.participation_intent);
    os << '\n';
  }
}

}  // namespace cyberemo
