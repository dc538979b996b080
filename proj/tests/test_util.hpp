#ifndef CDRKIT_TESTS_TEST_UTIL_HPP
#define CDRKIT_TESTS_TEST_UTIL_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <cdrkit/rng.hpp>
#include <cdrkit/types.hpp>

namespace testutil {

/// Events with increasing timestamps; labels drawn from a small alphabet.
inline std::vector<cdrkit::LocationEvent> random_events(cdrkit::Rng& rng, std::size_t n,
                                                        int n_labels = 5,
                                                        std::int64_t max_gap = 120) {
  std::vector<cdrkit::LocationEvent> out;
  std::int64_t t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    t += 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(max_gap)));
    const int label = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_labels)));
    out.push_back({t, "L" + std::to_string(label), 35.0 + 0.01 * label, 51.0 + 0.02 * label});
  }
  return out;
}

inline cdrkit::LocationEvent ev(std::int64_t t, const std::string& label, double lat = 35.0,
                                double lon = 51.0) {
  return {t, label, lat, lon};
}

/// Scratch directory under the build tree, wiped per construction.
class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / ("cdrkit_test_" + name)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string path() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

}  // namespace testutil

#endif  // CDRKIT_TESTS_TEST_UTIL_HPP
