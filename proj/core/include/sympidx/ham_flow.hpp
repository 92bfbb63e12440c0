#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sympidx/path_index.hpp"

namespace sympidx {

enum class SignConvention {
  section2,  // z' = +J grad H (positive-definite quadratic winds positively)
  section4   // z' = -J grad H (classical equations; winding negated)
};

enum class PhaseTopology { plane, torus_base };

// A Hamiltonian system on R^{2n}, optionally with a magnetic coupling
// term on T*T^2 (dim 4, torus_base): the classical vector field is then
// q' = dH/dp, p' = -dH/dq + b(q) Jhat q' with Jhat = [[0,1],[-1,0]].
struct HamSystem {
  int dim = 2;
  PhaseTopology topology = PhaseTopology::plane;
  std::function<double(const Vec&)> H;
  std::function<Vec(const Vec&)> gradH;   // null -> central differences
  std::function<Mat(const Vec&)> hessH;   // null -> differences of gradH
  std::function<double(const Vec&)> magnetic_b;       // null -> no coupling
  std::function<Vec(const Vec&)> magnetic_b_grad;     // optional closed form
  std::function<Mat(const Vec&)> field_jacobian_cl;   // optional D of the
                                                      // classical field
};

double energy_of(const HamSystem& sys, const Vec& z);
Vec grad_of(const HamSystem& sys, const Vec& z);
Mat hess_of(const HamSystem& sys, const Vec& z);

// The vector field under the chosen convention; section4 is classical.
Vec vector_field(const HamSystem& sys, const Vec& z, SignConvention conv);
Mat field_jacobian(const HamSystem& sys, const Vec& z, SignConvention conv);

// Relative consistency of gradH with directional differences of H at
// random probe points; used by tests and config validation.
double grad_consistency(const HamSystem& sys, const Vec& z0, uint64_t seed,
                        int probes = 8);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  double energy_drift = 0.0;
};

Trajectory flow(const HamSystem& sys, const Vec& z0, double T, int steps,
                SignConvention conv);

// Linearized flow along a trajectory, expressed in frames that are
// symplectic for the standard structure (magnetic systems are conjugated
// through the momentum-shift trivialization of the twisted form).
SympPath variational_flow(const HamSystem& sys, const Trajectory& traj,
                          SignConvention conv, int substeps = 1);

struct MonotoneReparam {
  std::function<double(double)> f;
  std::function<double(double)> fprime;
};

// Delta of the variational flow for K over the orbit period vs for
// H = f(K) over the rescaled period; the two should agree.
std::pair<double, double> delta_under_reparametrization(
    const HamSystem& K, const MonotoneReparam& f, const Trajectory& orbit,
    SignConvention conv);

// CSV columns t, z_1..z_2n, H(z).
std::string trajectory_to_csv(const HamSystem& sys, const Trajectory& traj);

}  // namespace sympidx
