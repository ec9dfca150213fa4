// Structure configs: a YAML mapping describing frame, box, measure and
// optional sample points. See README for the format.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "srlab/geometry.hpp"

namespace srlab {

/// Parse or validation failure; `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line);
  int line() const { return line_; }

 private:
  int line_;
};

struct StructureConfig {
  std::string name;
  int dim = 0;
  std::vector<double> periods;
  /// Period entries as written ("2", "2*pi"), for round-tripping.
  std::vector<std::string> period_text;
  std::vector<std::string> coordinates;
  std::vector<std::vector<std::string>> horizontal;
  /// Empty when the config gives none; structure() then completes the frame
  /// with coordinate fields.
  std::vector<std::vector<std::string>> complement;
  std::optional<std::string> density;
  std::vector<Point> samples;
  /// Source line of each top-level key (0 if absent).
  int horizontal_line = 0;
  int complement_line = 0;

  /// Validated structure. Throws ConfigError.
  SubRiemannianStructure structure() const;
  /// The density u, or 1.
  Expr density_expr() const;
  /// Config samples, or the per_axis^m lattice when none are given.
  std::vector<Point> sample_points(int per_axis) const;
  /// YAML text that load_config_string() reads back to the same config.
  std::string to_yaml() const;
};

StructureConfig load_config(const std::string& path);
StructureConfig load_config_string(const std::string& text);

}  // namespace srlab
