#pragma once

#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "csv.hpp"
#include "error.hpp"
#include "expression.hpp"

namespace cyberemo {

// One pre/post emotional report around one thread exposure.
struct ObservationRecord {
  std::string participant_id;
  std::string study_id;
  double h = 0.0;
  double v_pre = 0.0;
  double a_pre = 0.0;
  double v_post = 0.0;
  double a_post = 0.0;
  double dt_minutes = 1.0;
  std::optional<double> participation_intent;
  std::optional<bool> post_pos;
  std::optional<bool> post_neg;
  std::optional<PostKind> post_kind;

  double valence_velocity() const { return (v_post - v_pre) / dt_minutes; }
  double arousal_velocity() const { return (a_post - a_pre) / dt_minutes; }
};

inline bool in_unit(double x) { return x >= -1.0 && x <= 1.0; }

// Empty string when the record is valid, otherwise the first violation.
inline std::string check_record(const ObservationRecord& r) {
  if (r.h != -1.0 && r.h != 0.0 && r.h != 1.0) return "h must be -1, 0 or +1";
  if (!in_unit(r.v_pre) || !in_unit(r.a_pre) || !in_unit(r.v_post) || !in_unit(r.a_post))
    return "valence/arousal values must lie in [-1, 1]";
  if (!(r.dt_minutes > 0.0) || !std::isfinite(r.dt_minutes)) return "dt_minutes must be > 0";
  if (!std::isfinite(r.valence_velocity()) || !std::isfinite(r.arousal_velocity())) return "velocities are not finite";
  if (r.participation_intent && !(*r.participation_intent >= 0.0 && *r.participation_intent <= 1.0))
    return "participation_intent must lie in [0, 1]";
  return {};
}

inline const char* to_string(PostKind k) { return k == PostKind::first_post ? "first_post" : "reply"; }

inline constexpr const char* kObservationHeader =
    "participant_id,study_id,h,v_pre,a_pre,v_post,a_post,dt_minutes,participation_intent,post_pos,post_neg,post_kind";

struct ObservationSet {
  std::vector<ObservationRecord> records;
  std::vector<std::string> warnings;
};

inline ObservationSet read_observations(std::istream& in) {
  const csv::Table table = csv::read_table(in);
  for (const char* col : {"h", "v_pre", "a_pre", "v_post", "a_post"})
    if (!table.has(col)) throw ValidationError(std::string("observations CSV lacks column '") + col + "'");

  ObservationSet out;
  std::size_t defaulted_dt = 0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto line = std::to_string(table.line_numbers[i]);
    auto num = [&](const char* col) {
      auto v = csv::parse_double(table.get(i, col));
      if (!v) throw ValidationError("line " + line + ": column '" + col + "' is not a number");
      return *v;
    };
    auto opt_bool = [&](const char* col) -> std::optional<bool> {
      auto s = table.get(i, col);
      if (s.empty()) return std::nullopt;
      if (s == "1" || s == "true") return true;
      if (s == "0" || s == "false") return false;
      throw ValidationError("line " + line + ": column '" + col + "' must be 0/1");
    };

    ObservationRecord r;
    r.participant_id = std::string(table.get(i, "participant_id"));
    r.study_id = std::string(table.get(i, "study_id"));
    r.h = num("h");
    r.v_pre = num("v_pre");
    r.a_pre = num("a_pre");
    r.v_post = num("v_post");
    r.a_post = num("a_post");
    if (auto s = table.get(i, "dt_minutes"); s.empty()) {
      r.dt_minutes = 1.0;
      ++defaulted_dt;
    } else {
      r.dt_minutes = num("dt_minutes");
    }
    if (!table.get(i, "participation_intent").empty()) r.participation_intent = num("participation_intent");
    r.post_pos = opt_bool("post_pos");
    r.post_neg = opt_bool("post_neg");
    if (auto s = table.get(i, "post_kind"); !s.empty()) {
      if (s == "first_post") r.post_kind = PostKind::first_post;
      else if (s == "reply") r.post_kind = PostKind::reply;
      else throw ValidationError("line " + line + ": post_kind must be first_post or reply");
    }
    if (auto err = check_record(r); !err.empty()) throw ValidationError("line " + line + ": " + err);
    out.records.push_back(std::move(r));
  }
  if (defaulted_dt > 0)
    out.warnings.push_back(std::to_string(defaulted_dt) +
                           " record(s) without dt_minutes; using one event unit (dt = 1)");
  return out;
}

inline void write_observations(std::ostream& os, const std::vector<ObservationRecord>& records) {
  using csv::format_double;
  os << kObservationHeader << '\n';
  for (const auto& r : records) {
    os << r.participant_id << ',' << r.study_id << ',' << format_double(r.h) << ',' << format_double(r.v_pre) << ','
       << format_double(r.a_pre) << ',' << format_double(r.v_post) << ',' << format_double(r.a_post) << ','
       << format_double(r.dt_minutes) << ',';
    if (r.participation_intent) os << format_double(*r.participation_intent);
    os << ',';
    if (r.post_pos) os << (*r.post_pos ? 1 : 0);
    os << ',';
    if (r.post_neg) os << (*r.post_neg ? 1 : 0);
    os << ',';
    if (r.post_kind) os << to_string(*r.post_kind);
    os << '\n';
  }
}

}  // namespace cyberemo
