#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sympidx/ham_flow.hpp"
#include "sympidx/magnetic.hpp"
#include "sympidx/orbit_record.hpp"

namespace sympidx {

struct ShootOptions {
  int max_iter = 25;
  int steps_per_period = 4096;  // integrator steps per seed period
  double tol = 1e-10;
  SignConvention conv = SignConvention::section4;
  bool compute_delta = false;  // fill delta_per_period on success
};

// Newton shooting on the extended map (z, T) -> (phi_T(z) - z, section),
// with a Poincare section through the seed orthogonal to the flow and a
// truncated-SVD pseudo-inverse to handle degenerate orbit families.
OrbitRecord shoot_periodic(const HamSystem& sys, const Vec& seed_z,
                           double seed_T, const ShootOptions& opts = {});

// Winding invariant of the variational flow over j = 1..k periods, in
// the global trivialization of the chart.
std::vector<double> orbit_delta(const HamSystem& sys, const OrbitRecord& orbit,
                                int iterates, int steps_per_period = 4096,
                                SignConvention conv = SignConvention::section4);

struct GrowthFit {
  double slope = 0.0;      // a in |delta| >= a*T - c
  double intercept = 0.0;  // c, inflated so every sample obeys the bound
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> samples;  // (T, |delta|)
};

GrowthFit growth_fit(const std::vector<std::pair<double, double>>& samples);

struct SweepRow {
  double r = 0.0;
  double period = 0.0;
  double residual = 0.0;
  bool contractible = false;
  bool converged = false;
  std::vector<double> deltas;
};

std::vector<SweepRow> period_bound_sweep(const MagneticSystem& sys,
                                         const std::vector<double>& r_list,
                                         uint64_t seed, int iterates = 4,
                                         const ShootOptions& opts = {});

// CSV columns r, T, residual, contractible, delta_1..delta_k.
std::string sweep_to_csv(const std::vector<SweepRow>& rows, int iterates);

// Raw coordinate monodromy of the linearized flow over a trajectory
// (no trivialization; used by the shooter's Newton matrix).
Mat raw_monodromy(const HamSystem& sys, const Trajectory& traj,
                  SignConvention conv);

}  // namespace sympidx
