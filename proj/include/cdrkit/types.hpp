#ifndef CDRKIT_TYPES_HPP
#define CDRKIT_TYPES_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace cdrkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input too short or empty for the requested operation.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or document.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A label outside the model's known-location vocabulary.
class VocabularyError : public Error {
 public:
  using Error::Error;
};

class ChecksumError : public Error {
 public:
  using Error::Error;
};

/// Training loss became non-finite or blew up.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// One raw network event row. Numeric fields are absent when the source
/// column was empty; columns not named by the schema are kept verbatim.
struct CdrRecord {
  std::string user_id;
  std::optional<std::int64_t> timestamp;  // epoch seconds, UTC
  std::optional<std::int64_t> mcc;
  std::optional<std::int64_t> mnc;
  std::optional<std::int64_t> lac;
  std::optional<std::int64_t> cell;
  std::vector<std::string> extras;
  std::size_t source_row = 0;  // 1-based data row in the source file, 0 if synthetic

  bool complete() const {
    return !user_id.empty() && timestamp && mcc && mnc && lac && cell;
  }

  /// Content identity; source_row does not participate.
  auto content_tie() const {
    return std::tie(user_id, timestamp, mcc, mnc, lac, cell, extras);
  }
};

inline bool content_equal(const CdrRecord& a, const CdrRecord& b) {
  return a.content_tie() == b.content_tie();
}

/// One base transceiver station with its geographic coordinates.
struct CellSite {
  std::int64_t mcc = 0;
  std::int64_t mnc = 0;
  std::int64_t lac = 0;
  std::int64_t cell = 0;
  double lat = 0.0;
  double lon = 0.0;

  std::array<std::int64_t, 4> key() const { return {mcc, mnc, lac, cell}; }
};

/// Location labels are "<lac>-<cell>"; the separator keeps 12|34 and 1|234 distinct.
inline std::string make_location_label(std::int64_t lac, std::int64_t cell) {
  return std::to_string(lac) + "-" + std::to_string(cell);
}

/// A resolved, timestamped visit.
struct LocationEvent {
  std::int64_t t = 0;  // epoch seconds UTC
  std::string label;
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const LocationEvent&, const LocationEvent&) = default;
};

/// One user's time-ordered visit history.
struct UserProfile {
  std::string user_id;
  std::vector<LocationEvent> events;  // sorted by t, ties keep input order
};

}  // namespace cdrkit

#endif  // CDRKIT_TYPES_HPP
