#ifndef CDRKIT_INGEST_HPP
#define CDRKIT_INGEST_HPP

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdrkit/log.hpp"
#include "cdrkit/text.hpp"
#include "cdrkit/types.hpp"

namespace cdrkit {

/// Column names of the seven required CDR fields in the input header.
struct CdrSchema {
  std::string user_id = "user_id";
  std::string date = "date";  // YYYY-MM-DD
  std::string time = "time";  // HH:MM:SS
  std::string mcc = "mcc";
  std::string mnc = "mnc";
  std::string lac = "lac";
  std::string cell = "cell";
};

struct RejectedRow {
  std::size_t row_number = 0;  // 1-based data row (header not counted)
  std::string raw;
  std::string reason;
};

struct ParseResult {
  std::vector<CdrRecord> records;
  std::vector<RejectedRow> rejects;
};

namespace detail {

// Days since 1970-01-01 for a proleptic Gregorian civil date (Howard Hinnant's algorithm).
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline bool days_in_month_ok(std::int64_t y, std::int64_t m, std::int64_t d) {
  static const int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12 || d < 1) return false;
  int len = lengths[m - 1];
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  if (m == 2 && leap) len = 29;
  return d <= len;
}

inline std::optional<std::int64_t> parse_date_days(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto y = parse_int64(std::string_view(s).substr(0, 4));
  auto m = parse_int64(std::string_view(s).substr(5, 2));
  auto d = parse_int64(std::string_view(s).substr(8, 2));
  if (!y || !m || !d || !days_in_month_ok(*y, *m, *d)) return std::nullopt;
  return days_from_civil(*y, static_cast<unsigned>(*m), static_cast<unsigned>(*d));
}

inline std::optional<std::int64_t> parse_time_seconds(const std::string& s) {
  if (s.size() != 8 || s[2] != ':' || s[5] != ':') return std::nullopt;
  auto h = parse_int64(std::string_view(s).substr(0, 2));
  auto m = parse_int64(std::string_view(s).substr(3, 2));
  auto sec = parse_int64(std::string_view(s).substr(6, 2));
  if (!h || !m || !sec || *h > 23 || *m > 59 || *sec > 59) return std::nullopt;
  return *h * 3600 + *m * 60 + *sec;
}

}  // namespace detail

/// "UTC", "+HH:MM" or "-HH:MM" -> offset seconds east of UTC. Throws on junk.
inline std::int64_t parse_utc_offset(const std::string& tz) {
  if (tz.empty() || tz == "UTC" || tz == "utc") return 0;
  if (tz.size() != 6 || (tz[0] != '+' && tz[0] != '-') || tz[3] != ':')
    throw FormatError("bad timezone offset (want +HH:MM): " + tz);
  auto h = parse_int64(std::string_view(tz).substr(1, 2));
  auto m = parse_int64(std::string_view(tz).substr(4, 2));
  if (!h || !m || *h > 14 || *m > 59) throw FormatError("bad timezone offset: " + tz);
  const std::int64_t off = *h * 3600 + *m * 60;
  return tz[0] == '-' ? -off : off;
}

/// Parse a delimited CDR file. Header row is required and must name every
/// schema column. Empty fields mean "absent"; rows with the wrong column
/// count or unparseable non-empty fields land in the rejects report with
/// their 1-based data-row number. Date and time fuse into one UTC epoch;
/// `utc_offset_seconds` is the input's timezone east of UTC.
inline ParseResult parse_cdr(const std::string& path, const CdrSchema& schema = {},
                             char delim = ',', std::int64_t utc_offset_seconds = 0) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw FormatError("CDR file has no header row: " + path);

  const auto header = split_fields(lines[0], delim);
  auto col = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw FormatError("schema column '" + name + "' absent from header of " + path);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_user = col(schema.user_id), c_date = col(schema.date),
                    c_time = col(schema.time), c_mcc = col(schema.mcc), c_mnc = col(schema.mnc),
                    c_lac = col(schema.lac), c_cell = col(schema.cell);
  std::vector<bool> mapped(header.size(), false);
  for (std::size_t c : {c_user, c_date, c_time, c_mcc, c_mnc, c_lac, c_cell}) mapped[c] = true;

  ParseResult out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string& raw = lines[li];
    if (raw.empty()) continue;
    const std::size_t row = li;  // 1-based data row
    const auto fields = split_fields(raw, delim);
    if (fields.size() != header.size()) {
      out.rejects.push_back({row, raw, "column_count"});
      continue;
    }

    CdrRecord rec;
    rec.source_row = row;
    rec.user_id = fields[c_user];

    bool ok = true;
    auto numeric = [&](std::size_t c, const char* what) -> std::optional<std::int64_t> {
      if (fields[c].empty()) return std::nullopt;
      auto v = parse_int64(fields[c]);
      if (!v || *v < 0) {
        out.rejects.push_back({row, raw, std::string("bad_") + what});
        ok = false;
      }
      return ok ? v : std::nullopt;
    };
    rec.mcc = numeric(c_mcc, "mcc");
    if (ok) rec.mnc = numeric(c_mnc, "mnc");
    if (ok) rec.lac = numeric(c_lac, "lac");
    if (ok) rec.cell = numeric(c_cell, "cell");
    if (!ok) continue;

    const std::string& ds = fields[c_date];
    const std::string& ts = fields[c_time];
    if (!ds.empty() && !ts.empty()) {
      auto days = detail::parse_date_days(ds);
      auto secs = detail::parse_time_seconds(ts);
      if (!days) {
        out.rejects.push_back({row, raw, "bad_date"});
        continue;
      }
      if (!secs) {
        out.rejects.push_back({row, raw, "bad_time"});
        continue;
      }
      const std::int64_t epoch = *days * 86400 + *secs - utc_offset_seconds;
      if (epoch < 0) {  // records predate the epoch: not a plausible CDR timestamp
        out.rejects.push_back({row, raw, "bad_date"});
        continue;
      }
      rec.timestamp = epoch;
    } else if (!ds.empty() || !ts.empty()) {
      // one half of the timestamp present, the other empty: keep the record,
      // timestamp stays absent and drop_incomplete takes care of it
    }

    for (std::size_t c = 0; c < fields.size(); ++c)
      if (!mapped[c]) rec.extras.push_back(fields[c]);
    out.records.push_back(std::move(rec));
  }
  return out;
}

struct DedupeResult {
  std::vector<CdrRecord> records;
  std::size_t removed = 0;
};

/// Keep the first occurrence of every fully-identical record, in input order.
inline DedupeResult dedupe(const std::vector<CdrRecord>& records) {
  DedupeResult out;
  std::map<std::string, bool> seen;
  for (const auto& r : records) {
    std::string key = r.user_id;
    key.push_back('\x1f');
    auto push = [&key](const std::optional<std::int64_t>& v) {
      key += v ? std::to_string(*v) : std::string("~");
      key.push_back('\x1f');
    };
    push(r.timestamp);
    push(r.mcc);
    push(r.mnc);
    push(r.lac);
    push(r.cell);
    for (const auto& e : r.extras) {
      key += e;
      key.push_back('\x1f');
    }
    if (seen.emplace(std::move(key), true).second)
      out.records.push_back(r);
    else
      ++out.removed;
  }
  return out;
}

struct DropResult {
  std::vector<CdrRecord> records;
  std::size_t removed = 0;
};

/// Remove records missing any of user_id, timestamp, mcc, mnc, lac, cell.
inline DropResult drop_incomplete(const std::vector<CdrRecord>& records) {
  DropResult out;
  for (const auto& r : records) {
    if (r.complete())
      out.records.push_back(r);
    else
      ++out.removed;
  }
  return out;
}

/// Canonical subscriber ID: digits only; one leading international "00"
/// stripped; a leading "0" trunk prefix replaced by the country code.
/// Returns nothing when the raw ID carries no digits at all.
inline std::optional<std::string> canonical_user_id(const std::string& raw,
                                                    const std::string& country_code) {
  std::string digits;
  for (char ch : raw)
    if (std::isdigit(static_cast<unsigned char>(ch))) digits.push_back(ch);
  if (digits.empty()) return std::nullopt;
  if (digits.size() > 2 && digits[0] == '0' && digits[1] == '0') digits.erase(0, 2);
  if (digits[0] == '0') digits = country_code + digits.substr(1);
  return digits;
}

struct UnifyResult {
  std::vector<CdrRecord> records;
  std::vector<RejectedRow> rejects;
};

/// Rewrite every user_id to canonical form. IDs with no digits are rejected.
inline UnifyResult unify_user_ids(const std::vector<CdrRecord>& records,
                                  const std::string& country_code) {
  if (country_code.empty()) throw Error("unify_user_ids: empty country code");
  UnifyResult out;
  for (const auto& r : records) {
    auto canon = canonical_user_id(r.user_id, country_code);
    if (!canon) {
      out.rejects.push_back({r.source_row, r.user_id, "id_no_digits"});
      continue;
    }
    CdrRecord rec = r;
    rec.user_id = *canon;
    out.records.push_back(std::move(rec));
  }
  return out;
}

using CellTable = std::map<std::array<std::int64_t, 4>, CellSite>;

inline CellTable build_cell_table(const std::vector<CellSite>& sites) {
  CellTable table;
  for (const auto& s : sites) {
    if (!table.emplace(s.key(), s).second)
      throw FormatError("duplicate cell-site key " + make_location_label(s.lac, s.cell));
  }
  return table;
}

/// Map a complete record onto its serving tower. Returns nothing when the
/// (mcc, mnc, lac, cell) key has no table entry; callers count the omission.
inline std::optional<LocationEvent> resolve_location(const CdrRecord& rec, const CellTable& table) {
  if (!rec.complete()) return std::nullopt;
  auto it = table.find({*rec.mcc, *rec.mnc, *rec.lac, *rec.cell});
  if (it == table.end()) return std::nullopt;
  LocationEvent ev;
  ev.t = *rec.timestamp;
  ev.label = make_location_label(*rec.lac, *rec.cell);
  ev.lat = it->second.lat;
  ev.lon = it->second.lon;
  return ev;
}

struct ProfileResult {
  std::vector<UserProfile> profiles;  // sorted by user_id
  std::size_t unresolved = 0;
};

/// Split cleaned records into per-user, time-ordered event sequences.
inline ProfileResult profile_users(const std::vector<CdrRecord>& records, const CellTable& table) {
  ProfileResult out;
  std::map<std::string, std::vector<LocationEvent>> grouped;
  for (const auto& r : records) {
    auto ev = resolve_location(r, table);
    if (!ev) {
      ++out.unresolved;
      continue;
    }
    grouped[r.user_id].push_back(std::move(*ev));
  }
  for (auto& [user, events] : grouped) {
    std::stable_sort(events.begin(), events.end(),
                     [](const LocationEvent& a, const LocationEvent& b) { return a.t < b.t; });
    out.profiles.push_back({user, std::move(events)});
  }
  return out;
}

/// Parse the cell-site table: delimited text with columns mcc,mnc,lac,cell,lat,lon.
inline std::vector<CellSite> parse_cell_sites(const std::string& path, char delim = ',') {
  const auto lines = read_lines(path);
  if (lines.empty()) throw FormatError("cell-site file has no header row: " + path);
  const auto header = split_fields(lines[0], delim);
  auto col = [&](const char* name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw FormatError(std::string("cell-site column '") + name + "' absent: " + path);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_mcc = col("mcc"), c_mnc = col("mnc"), c_lac = col("lac"),
                    c_cell = col("cell"), c_lat = col("lat"), c_lon = col("lon");
  std::vector<CellSite> sites;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto f = split_fields(lines[li], delim);
    if (f.size() != header.size())
      throw FormatError("cell-site row " + std::to_string(li) + ": column count");
    auto want_int = [&](std::size_t c) {
      auto v = parse_int64(f[c]);
      if (!v) throw FormatError("cell-site row " + std::to_string(li) + ": bad integer " + f[c]);
      return *v;
    };
    auto want_double = [&](std::size_t c) {
      auto v = parse_double(f[c]);
      if (!v) throw FormatError("cell-site row " + std::to_string(li) + ": bad number " + f[c]);
      return *v;
    };
    CellSite s;
    s.mcc = want_int(c_mcc);
    s.mnc = want_int(c_mnc);
    s.lac = want_int(c_lac);
    s.cell = want_int(c_cell);
    s.lat = want_double(c_lat);
    s.lon = want_double(c_lon);
    if (s.lat < -90 || s.lat > 90 || s.lon < -180 || s.lon > 180)
      throw FormatError("cell-site row " + std::to_string(li) + ": coordinates out of range");
    sites.push_back(s);
  }
  return sites;
}

struct IngestSummary {
  std::size_t parsed = 0;
  std::size_t parse_rejects = 0;
  std::size_t duplicates_removed = 0;
  std::size_t incomplete_removed = 0;
  std::size_t unify_rejects = 0;
  std::size_t unresolved = 0;
  std::size_t events = 0;
  std::size_t users = 0;
};

struct IngestResult {
  std::vector<UserProfile> profiles;
  IngestSummary summary;
  std::vector<RejectedRow> rejects;  // parse + unify rejects, in that order
};

/// Full pipeline: parse -> dedupe -> drop incomplete -> unify IDs -> profile.
/// Every parsed record is accounted for: events + unresolved + duplicates +
/// incomplete + unify rejects add back up to the parsed count.
inline IngestResult ingest(const std::string& cdr_path, const std::string& cells_path,
                           const std::string& country_code = "98", char delim = ',',
                           std::int64_t utc_offset_seconds = 0, const CdrSchema& schema = {}) {
  IngestResult out;
  auto parsed = parse_cdr(cdr_path, schema, delim, utc_offset_seconds);
  out.rejects = parsed.rejects;
  out.summary.parsed = parsed.records.size();
  out.summary.parse_rejects = parsed.rejects.size();

  auto deduped = dedupe(parsed.records);
  out.summary.duplicates_removed = deduped.removed;
  auto complete = drop_incomplete(deduped.records);
  out.summary.incomplete_removed = complete.removed;
  auto unified = unify_user_ids(complete.records, country_code);
  out.summary.unify_rejects = unified.rejects.size();
  out.rejects.insert(out.rejects.end(), unified.rejects.begin(), unified.rejects.end());

  const auto table = build_cell_table(parse_cell_sites(cells_path, delim));
  auto profiled = profile_users(unified.records, table);
  out.summary.unresolved = profiled.unresolved;
  out.profiles = std::move(profiled.profiles);
  out.summary.users = out.profiles.size();
  for (const auto& p : out.profiles) out.summary.events += p.events.size();
  logging::info("ingest: " + std::to_string(out.summary.parsed) + " parsed -> " +
                std::to_string(out.summary.events) + " events across " +
                std::to_string(out.summary.users) + " user(s), " +
                std::to_string(out.summary.parse_rejects + out.summary.unify_rejects) +
                " rejected");
  return out;
}

}  // namespace cdrkit

#endif  // CDRKIT_INGEST_HPP
