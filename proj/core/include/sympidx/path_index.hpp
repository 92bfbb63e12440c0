#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sympidx/linalg.hpp"

namespace sympidx {

// A sampled continuous path of symplectic matrices. The step guard
// ||F_{i+1} F_i^{-1} - I||_inf < 0.5 keeps the winding unwrap sound.
struct SympPath {
  std::vector<double> times;
  std::vector<Mat> frames;
  std::string meta;

  int dim() const { return frames.empty() ? 0 : (int)frames[0].rows(); }
  double t0() const { return times.front(); }
  double t1() const { return times.back(); }
  size_t size() const { return times.size(); }
};

SympPath make_path(std::vector<double> times, std::vector<Mat> frames,
                   std::string meta = "");
void validate_path(const SympPath& path);
double step_guard(const SympPath& path);

struct DeltaReport {
  double delta = 0.0;
  std::vector<double> winding_trace;  // unwrapped angle at each sample
  std::string method;                 // "polar" or "homogenized(k)"
  double tail_estimate = 0.0;         // |D(k) - D(k/2)| for homogenization
};

// Winding of arg det_C of the polar unitary factor, divided by pi.
DeltaReport delta_tilde(const SympPath& path);

// Homogenized invariant: delta_tilde of the k-fold iterate path
// t -> F(T)^j F(t), divided by k. Path must start at the identity.
DeltaReport delta_homogenized(const SympPath& monodromy_path, int k);

struct QuadHamiltonian {
  int dim = 2;  // 2n
  std::function<Mat(double)> S;
  std::string convention = "section2";  // section2: F' = J S F
};

// Helper: a QuadHamiltonian interpolating sampled symmetric matrices.
QuadHamiltonian sampled_quad(int dim, std::vector<double> times,
                             std::vector<Mat> mats,
                             std::string convention = "section2");

// Implicit-midpoint (Cayley) integration of F' = +-J S(t) F, F(t0) = I.
SympPath linear_flow(const QuadHamiltonian& H, double t_begin, double t_end,
                     int steps);

// Crossing/signature formula for a nondegenerate path from the identity.
int conley_zehnder(const SympPath& path);

// |delta(psi*phi) - delta(psi) - delta(phi)| for the pointwise product.
double quasimorphism_defect(const SympPath& phi, const SympPath& psi);

struct SturmReport {
  double delta_h1 = 0.0;
  double delta_h0 = 0.0;
  double margin = 0.0;  // delta_h1 - delta_h0
};
SturmReport sturm_compare(const QuadHamiltonian& H0, const QuadHamiltonian& H1,
                          double T, int steps = 4096);

// Path surgery helpers.
SympPath resample(const SympPath& path, const std::vector<double>& new_times);
SympPath reverse_path(const SympPath& path);
SympPath subpath(const SympPath& path, size_t i_begin, size_t i_end);
SympPath pointwise_product(const SympPath& phi, const SympPath& psi);
SympPath conjugate_path(const Mat& B, const SympPath& path);

// JSON array of {t, frame: row-major 2n x 2n}.
std::string path_to_json(const SympPath& path);
SympPath path_from_json(const std::string& text);

}  // namespace sympidx
