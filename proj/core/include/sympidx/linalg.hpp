#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>

#include "sympidx/errors.hpp"

namespace sympidx {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

inline constexpr double kSymplecticTol = 1e-9;

// J in the (x_1..x_n, y_1..y_n) ordering: block form [[0,-I],[I,0]].
Mat standard_J(int n);

// max-norm of A^T J A - J.
double symplectic_defect(const Mat& A);
bool is_symplectic(const Mat& A, double tol = kSymplecticTol);

// One Newton step of re-projection onto Sp: A <- A(I + (1/2) J E),
// E = A^T J A - J. Applied iteratively until the defect stabilizes.
Mat renormalize_symplectic(const Mat& A);

class SympMatrix {
 public:
  explicit SympMatrix(Mat entries, bool renormalize = false);
  int dim() const { return static_cast<int>(entries_.rows()); }
  const Mat& entries() const { return entries_; }

 private:
  Mat entries_;
};

class UnitaryFactor {
 public:
  explicit UnitaryFactor(Mat entries);
  int dim() const { return static_cast<int>(entries_.rows()); }
  const Mat& entries() const { return entries_; }
  // The n x n complex matrix under z_j = x_j + i y_j.
  CMat complex_view() const;

 private:
  Mat entries_;
};

class UnitComplex {
 public:
  UnitComplex() : re_(1.0), im_(0.0) {}
  UnitComplex(double re, double im);
  double re() const { return re_; }
  double im() const { return im_; }
  Complex value() const { return {re_, im_}; }
  double arg() const { return std::arg(value()); }

 private:
  double re_, im_;
};

UnitaryFactor polar_unitary(const SympMatrix& A);
UnitComplex det_complex(const UnitaryFactor& U);

// Circle map computed through the polar decomposition: det_C of the
// unitary factor of A.
UnitComplex rho_tilde(const SympMatrix& A);

// Circle map computed from the spectrum: product over unit-circle
// eigenvalue pairs of the member with positive Krein sign
// (sign of i*omega(v, conj v)), times (-1)^{m/2} where m is the total
// algebraic multiplicity of real negative eigenvalues. Requires a
// semisimple matrix with well-separated eigenvalue clusters.
UnitComplex rho_eigen(const SympMatrix& A);

struct PowerCheck {
  double rho_defect;        // |rho(A^k) - rho(A)^k| via rho_eigen
  double rho_tilde_defect;  // same defect via rho_tilde
};
PowerCheck rho_power_check(const SympMatrix& A, int k);

// Helpers used across modules and tests.
Mat rotation2(double theta);
Mat block_diag(const Mat& A, const Mat& B);
Mat matrix_power_symplectic(const Mat& A, int k);

// Random elements: products of exponentials exp(J S) with symmetric S.
Mat random_symplectic(int n, std::mt19937_64& rng, double scale = 0.6);
// Random orthogonal J-commuting matrix (embedding of a random unitary).
Mat random_unitary_symplectic(int n, std::mt19937_64& rng);
// Random hyperbolic element: conjugated diag(mu_i, 1/mu_i) with
// |mu_i| > 1, optionally with negative pairs mixed in.
Mat random_hyperbolic_symplectic(int n, std::mt19937_64& rng,
                                 bool allow_negative = true);

}  // namespace sympidx
