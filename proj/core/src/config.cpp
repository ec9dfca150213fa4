#include "srlab/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace srlab {

ConfigError::ConfigError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& message) { throw ConfigError(message, line_of(n)); }

std::string scalar(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, what + " must be a scalar");
  return n.Scalar();
}

double number(const YAML::Node& n, const std::string& what) {
  std::string s = scalar(n, what);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) fail(n, what + " is not a number: '" + s + "'");
  return v;
}

// A period may be a plain number or a constant expression in which `pi` stands for π.
double period_value(const YAML::Node& n) {
  std::string s = scalar(n, "period");
  static const std::regex pi_token(R"(\bpi\b)");
  std::string text = std::regex_replace(s, pi_token, "3.141592653589793");
  try {
    Expr e = parse(text, 1);
    if (e.max_variable() >= 0) fail(n, "period must be constant: '" + s + "'");
    double v = e.evaluate(std::vector<double>{0.0});
    if (!(v > 0.0) || !std::isfinite(v)) fail(n, "period must be positive: '" + s + "'");
    return v;
  } catch (const ParseError& e) {
    fail(n, "bad period '" + s + "': " + e.what());
  } catch (const EvaluationError& e) {
    fail(n, "bad period '" + s + "': " + e.what());
  }
}

std::vector<std::vector<std::string>> fields(const YAML::Node& n, int dim, const std::string& what) {
  if (!n.IsSequence()) fail(n, what + " must be a list of fields");
  std::vector<std::vector<std::string>> out;
  for (const auto& f : n) {
    if (!f.IsSequence()) fail(f, what + " field must be a list of " + std::to_string(dim) + " expressions");
    if (static_cast<int>(f.size()) != dim)
      fail(f, what + " field has " + std::to_string(f.size()) + " components, expected " + std::to_string(dim));
    std::vector<std::string> comps;
    for (const auto& c : f) {
      std::string s = scalar(c, "field component");
      try {
        (void)parse(s, dim);
      } catch (const ParseError& e) {
        fail(c, "bad expression '" + s + "': " + e.what());
      }
      comps.push_back(s);
    }
    out.push_back(std::move(comps));
  }
  return out;
}

StructureConfig from_node(const YAML::Node& root) {
  if (!root.IsMap()) throw ConfigError("config must be a mapping", line_of(root));
  static const std::set<std::string> known = {"name",       "dim",        "periods", "coordinates",
                                              "horizontal", "complement", "density", "samples"};
  for (const auto& kv : root) {
    std::string key = kv.first.as<std::string>();
    if (!known.contains(key)) fail(kv.first, "unknown key '" + key + "'");
  }
  auto require = [&](const char* key) {
    YAML::Node n = root[key];
    if (!n) throw ConfigError(std::string("missing key '") + key + "'", 0);
    return n;
  };

  StructureConfig c;
  c.name = scalar(require("name"), "name");
  YAML::Node dim = require("dim");
  double d = number(dim, "dim");
  if (d != std::floor(d) || d < 2 || d > 64) fail(dim, "dim must be an integer >= 2");
  c.dim = static_cast<int>(d);

  YAML::Node periods = require("periods");
  if (!periods.IsSequence() || static_cast<int>(periods.size()) != c.dim)
    fail(periods, "periods must list " + std::to_string(c.dim) + " entries");
  for (const auto& p : periods) {
    c.periods.push_back(period_value(p));
    c.period_text.push_back(p.Scalar());
  }

  if (YAML::Node coords = root["coordinates"]) {
    if (!coords.IsSequence() || static_cast<int>(coords.size()) != c.dim)
      fail(coords, "coordinates must list " + std::to_string(c.dim) + " names");
    for (const auto& x : coords) c.coordinates.push_back(scalar(x, "coordinate name"));
  }

  YAML::Node horizontal = require("horizontal");
  c.horizontal_line = line_of(horizontal);
  c.horizontal = fields(horizontal, c.dim, "horizontal");
  int k = static_cast<int>(c.horizontal.size());
  if (k < 1 || k >= c.dim) fail(horizontal, "need between 1 and " + std::to_string(c.dim - 1) + " horizontal fields");

  if (YAML::Node comp = root["complement"]) {
    c.complement_line = line_of(comp);
    c.complement = fields(comp, c.dim, "complement");
    if (static_cast<int>(c.complement.size()) != c.dim - k)
      fail(comp, "complement has " + std::to_string(c.complement.size()) + " fields, expected " +
                     std::to_string(c.dim - k));
  }

  if (YAML::Node samples = root["samples"]) {
    if (!samples.IsSequence()) fail(samples, "samples must be a list of points");
    for (const auto& p : samples) {
      if (!p.IsSequence() || static_cast<int>(p.size()) != c.dim)
        fail(p, "sample point must have " + std::to_string(c.dim) + " coordinates");
      Point q;
      for (const auto& x : p) q.push_back(number(x, "sample coordinate"));
      c.samples.push_back(std::move(q));
    }
  }

  if (YAML::Node density = root["density"]) {
    std::string s = scalar(density, "density");
    Expr u;
    try {
      u = parse(s, c.dim);
    } catch (const ParseError& e) {
      fail(density, "bad density '" + s + "': " + e.what());
    }
    for (const auto& p : c.sample_points(3)) {
      double v = 0.0;
      try {
        v = u.evaluate(p);
      } catch (const EvaluationError&) {
        v = std::nan("");
      }
      if (!(v > 0.0) || !std::isfinite(v)) fail(density, "density must be positive at every sample point");
    }
    c.density = s;
  }
  return c;
}

}  // namespace

StructureConfig load_config_string(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1);
  }
  try {
    return from_node(root);
  } catch (const YAML::Exception& e) {
    throw ConfigError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1);
  }
}

StructureConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path, 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config_string(ss.str());
}

std::vector<Point> StructureConfig::sample_points(int per_axis) const {
  return samples.empty() ? lattice(periods, per_axis) : samples;
}

Expr StructureConfig::density_expr() const { return density ? parse(*density, dim) : Expr(1); }

SubRiemannianStructure StructureConfig::structure() const {
  SubRiemannianStructure s;
  s.name = name;
  s.dim = dim;
  s.periods = periods;
  for (const auto& f : horizontal) s.horizontal.push_back(VectorField::parse(f, dim));
  auto pts = sample_points(3);
  if (complement.empty()) {
    // Greedy completion by coordinate fields, full rank at every sample.
    for (int j = 0; j < dim && s.rank() + static_cast<int>(s.complement.size()) < dim; ++j) {
      auto trial = s.frame();
      trial.push_back(VectorField::coordinate(dim, j));
      bool independent = true;
      for (const auto& p : pts) {
        if (numerical_rank(frame_matrix(trial, p)) < static_cast<int>(trial.size())) {
          independent = false;
          break;
        }
      }
      if (independent) s.complement.push_back(VectorField::coordinate(dim, j));
    }
    if (s.rank() + static_cast<int>(s.complement.size()) < dim)
      throw ConfigError("no coordinate complement fits the horizontal fields; give one explicitly", horizontal_line);
  } else {
    for (const auto& f : complement) s.complement.push_back(VectorField::parse(f, dim));
  }
  try {
    s.validate(&pts);
  } catch (const StructureError& e) {
    throw ConfigError(e.what(), complement.empty() ? horizontal_line : complement_line);
  }
  return s;
}

std::string StructureConfig::to_yaml() const {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << name;
  out << YAML::Key << "dim" << YAML::Value << dim;
  out << YAML::Key << "periods" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& p : period_text) out << p;
  out << YAML::EndSeq;
  if (!coordinates.empty()) {
    out << YAML::Key << "coordinates" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& x : coordinates) out << x;
    out << YAML::EndSeq;
  }
  auto emit_fields = [&](const char* key, const std::vector<std::vector<std::string>>& fs) {
    out << YAML::Key << key << YAML::Value << YAML::BeginSeq;
    for (const auto& f : fs) {
      out << YAML::Flow << YAML::BeginSeq;
      for (const auto& c : f) out << YAML::DoubleQuoted << c;
      out << YAML::EndSeq;
    }
    out << YAML::EndSeq;
  };
  emit_fields("horizontal", horizontal);
  if (!complement.empty()) emit_fields("complement", complement);
  if (density) out << YAML::Key << "density" << YAML::Value << YAML::DoubleQuoted << *density;
  if (!samples.empty()) {
    out << YAML::Key << "samples" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : samples) {
      out << YAML::Flow << YAML::BeginSeq;
      for (double x : p) {
        char buf[32];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
        out << std::string(buf, end);
      }
      out << YAML::EndSeq;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace srlab
