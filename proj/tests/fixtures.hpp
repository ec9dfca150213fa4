#pragma once

#include <cmath>
#include <numbers>
#include <srlab/geometry.hpp>
#include <string>
#include <vector>

namespace srlab::fx {

using FieldText = std::vector<std::string>;

inline SubRiemannianStructure make(std::string name, int dim, std::vector<double> periods,
                                   const std::vector<FieldText>& horizontal,
                                   const std::vector<FieldText>& complement) {
  SubRiemannianStructure s;
  s.name = std::move(name);
  s.dim = dim;
  s.periods = std::move(periods);
  for (const auto& f : horizontal) s.horizontal.push_back(VectorField::parse(f, dim));
  for (const auto& f : complement) s.complement.push_back(VectorField::parse(f, dim));
  return s;
}

inline SubRiemannianStructure heisenberg() {
  return make("heisenberg", 3, {2, 2, 2}, {{"1", "0", "-x1/2"}, {"0", "1", "x0/2"}}, {{"0", "0", "1"}});
}

/// Heisenberg with the tilted reference complement T = d/dx2 + x0 X_1.
inline SubRiemannianStructure tilted_heisenberg() {
  return make("tilted-heisenberg", 3, {2, 2, 2}, {{"1", "0", "-x1/2"}, {"0", "1", "x0/2"}},
              {{"x0", "0", "1 - x0*x1/2"}});
}

inline SubRiemannianStructure contact3torus() {
  double L = 2 * std::numbers::pi;
  return make("contact3torus", 3, {L, L, L}, {{"sin(x2)", "-cos(x2)", "0"}, {"0", "0", "1"}},
              {{"cos(x2)", "sin(x2)", "0"}});
}

inline SubRiemannianStructure carnot_step2() {
  return make("carnot-step2", 6, {2, 2, 2, 2, 2, 2},
              {{"1", "0", "0", "-x1/2", "-x2/2", "0"},
               {"0", "1", "0", "x0/2", "0", "-x2/2"},
               {"0", "0", "1", "0", "x0/2", "x1/2"}},
              {{"0", "0", "0", "1", "0", "0"}, {"0", "0", "0", "0", "1", "0"}, {"0", "0", "0", "0", "0", "1"}});
}

inline SubRiemannianStructure engel() {
  return make("engel", 4, {2, 2, 2, 2}, {{"1", "0", "0", "0"}, {"0", "1", "x0", "x2"}},
              {{"0", "0", "1", "0"}, {"0", "0", "0", "1"}});
}

inline SubRiemannianStructure martinet() {
  return make("martinet", 3, {2, 2, 2}, {{"1", "0", "0"}, {"0", "1", "x0^2"}}, {{"0", "0", "1"}});
}

inline SubRiemannianStructure trivial() {
  return make("trivial", 2, {1, 1}, {{"1", "0"}}, {{"0", "1"}});
}

inline SubRiemannianStructure integrable() {
  return make("integrable", 3, {1, 1, 1}, {{"1", "0", "0"}, {"0", "1", "0"}}, {{"0", "0", "1"}});
}

/// X = 2 d/dx in R^2 with complement d/dy.
inline SubRiemannianStructure scaled() {
  return make("scaled", 2, {1, 1}, {{"2", "0"}}, {{"0", "1"}});
}

inline double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace srlab::fx
