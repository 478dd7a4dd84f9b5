#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace qdm::report {

/// Ordered key: value report, rendered as structured text.
class Report {
 public:
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add_si(const std::string& key, double value, const std::string& unit);

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }
  std::string render() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Minimal SVG line plot of a curve (log axes optional); convenience only,
/// the CSV twin is the numeric contract.
void write_curve_svg(const std::vector<double>& x, const std::vector<double>& y,
                     const std::string& x_label, const std::string& y_label,
                     const std::filesystem::path& path, bool log_x = false,
                     bool log_y = false);

/// Writes `manifest.txt` in dir: name, FNV-1a hash and size of every
/// artifact, sorted by name.
void write_manifest(const std::vector<std::filesystem::path>& artifacts,
                    const std::filesystem::path& dir);

}  // namespace qdm::report
