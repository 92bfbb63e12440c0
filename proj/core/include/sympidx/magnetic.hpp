#pragma once

#include <string>
#include <vector>

#include "sympidx/ham_flow.hpp"
#include "sympidx/orbit_record.hpp"

namespace sympidx {

struct FourierTerm {
  int kx = 0, ky = 0;
  double amp = 0.0, phase = 0.0;
};

// Real truncated Fourier series on T^2 = R^2 / 2piZ^2:
// f(q) = sum amp * cos(kx qx + ky qy + phase).
struct FourierSeries2 {
  std::vector<FourierTerm> terms;

  double eval(const Eigen::Vector2d& q) const;
  Eigen::Vector2d grad(const Eigen::Vector2d& q) const;
  Eigen::Matrix2d hess(const Eigen::Vector2d& q) const;
  bool empty() const { return terms.empty(); }
};

struct MagneticSystem {
  enum class Metric { flat, conformal };
  Metric metric = Metric::flat;
  FourierSeries2 conformal_u;  // metric e^{2u} (dx^2 + dy^2)

  bool field_constant = true;
  double field_b = 1.0;          // when field_constant
  FourierSeries2 field_fourier;  // b(q) when not constant

  double b_at(const Eigen::Vector2d& q) const;
  double b_mean() const;  // constant / zero-mode part of the field
  double u_at(const Eigen::Vector2d& q) const;
};

// Sampled positivity of b(q) and basic sanity; throws InvalidParams.
void validate_system(const MagneticSystem& sys);

// Kinetic Hamiltonian K = e^{-2u(q)} |p|^2 / 2 on T*T^2 with the
// Lorentz coupling of the twisted structure, classical sign convention.
HamSystem equations_of_motion(const MagneticSystem& sys);

struct MagneticOracle {
  double B = 1.0;  // constant field
  double r = 0.1;  // energy level K = r^2
};

// Closed-form magnetic circle for the flat metric with constant field:
// speed r*sqrt(2), radius v/B, period 2pi/B.
OrbitRecord oracle_orbit(const MagneticOracle& oracle);

// Random phase points on the level K = r^2.
std::vector<Vec> sample_level(const MagneticSystem& sys, double r, int count,
                              uint64_t seed);

// Euclidean-chart arc length of the trajectory's position curve.
double arc_length(const Trajectory& traj);

MagneticSystem magnetic_from_json(const std::string& text);
std::string magnetic_to_json(const MagneticSystem& sys);

}  // namespace sympidx
