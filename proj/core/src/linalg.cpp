#include "sympidx/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace sympidx {

Mat standard_J(int n) {
  if (n < 1) throw InvalidParams("standard_J: n must be >= 1");
  Mat J = Mat::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = -Mat::Identity(n, n);
  J.bottomLeftCorner(n, n) = Mat::Identity(n, n);
  return J;
}

double symplectic_defect(const Mat& A) {
  const int d = static_cast<int>(A.rows());
  if (d != A.cols() || d < 2 || d % 2 != 0) return 1e300;
  Mat J = standard_J(d / 2);
  return (A.transpose() * J * A - J).cwiseAbs().maxCoeff();
}

bool is_symplectic(const Mat& A, double tol) {
  return symplectic_defect(A) < tol;
}

Mat renormalize_symplectic(const Mat& A) {
  const int d = static_cast<int>(A.rows());
  Mat J = standard_J(d / 2);
  Mat B = A;
  double defect = (B.transpose() * J * B - J).cwiseAbs().maxCoeff();
  for (int iter = 0; iter < 8 && defect > 1e-15; ++iter) {
    Mat E = B.transpose() * J * B - J;
    B = B * (Mat::Identity(d, d) + 0.5 * J * E);
    double next = (B.transpose() * J * B - J).cwiseAbs().maxCoeff();
    if (next >= defect) break;
    defect = next;
  }
  return B;
}

SympMatrix::SympMatrix(Mat entries, bool renormalize) {
  const int d = static_cast<int>(entries.rows());
  if (d != entries.cols() || d < 2 || d % 2 != 0)
    throw NonSymplectic("SympMatrix: dimension must be even and >= 2");
  if (renormalize) entries = renormalize_symplectic(std::move(entries));
  if (symplectic_defect(entries) >= kSymplecticTol)
    throw NonSymplectic("SympMatrix: A^T J A - J exceeds tolerance");
  entries_ = std::move(entries);
}

UnitaryFactor::UnitaryFactor(Mat entries) {
  const int d = static_cast<int>(entries.rows());
  if (d != entries.cols() || d < 2 || d % 2 != 0)
    throw NotUnitary("UnitaryFactor: dimension must be even and >= 2");
  Mat J = standard_J(d / 2);
  double orth = (entries.transpose() * entries - Mat::Identity(d, d))
                    .cwiseAbs()
                    .maxCoeff();
  double comm = (entries * J - J * entries).cwiseAbs().maxCoeff();
  if (orth >= kSymplecticTol || comm >= kSymplecticTol)
    throw NotUnitary("UnitaryFactor: not orthogonal or not J-commuting");
  entries_ = std::move(entries);
}

CMat UnitaryFactor::complex_view() const {
  // U = [[A, B], [-B, A]] for J-commuting U; complex matrix is A - iB,
  // i.e. X + iY with X = top-left, Y = bottom-left block.
  const int n = dim() / 2;
  CMat C(n, n);
  C.real() = entries_.topLeftCorner(n, n);
  C.imag() = entries_.bottomLeftCorner(n, n);
  return C;
}

UnitComplex::UnitComplex(double re, double im) : re_(re), im_(im) {
  if (std::abs(re * re + im * im - 1.0) >= 1e-9)
    throw InvalidParams("UnitComplex: modulus must be 1");
}

UnitaryFactor polar_unitary(const SympMatrix& A) {
  // Orthogonal polar factor via the SVD: for A = U S V^T the factor is
  // U V^T = (A A^T)^{-1/2} A. Working from the SVD of A itself (instead
  // of an eigendecomposition of A A^T) keeps the factor accurate even
  // when A is badly conditioned, e.g. high powers of hyperbolic frames.
  Eigen::JacobiSVD<Mat> svd(A.entries(),
                            Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat U = svd.matrixU() * svd.matrixV().transpose();
  return UnitaryFactor(U);
}

UnitComplex det_complex(const UnitaryFactor& U) {
  Complex det = U.complex_view().determinant();
  double mod = std::abs(det);
  if (std::abs(mod - 1.0) >= 1e-8)
    throw NotUnitary("det_complex: determinant modulus deviates from 1");
  det /= mod;
  return UnitComplex(det.real(), det.imag());
}

UnitComplex rho_tilde(const SympMatrix& A) {
  return det_complex(polar_unitary(A));
}

UnitComplex rho_eigen(const SympMatrix& A) {
  const int d = A.dim();
  Mat J = standard_J(d / 2);
  Eigen::EigenSolver<Mat> es(A.entries());
  if (es.info() != Eigen::Success)
    throw NearDegenerate("rho_eigen: eigensolver failed");
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();

  const double circle_tol = 1e-8;
  const double cluster_tol = 1e-6;

  Complex prod(1.0, 0.0);
  int neg_real_mult = 0;
  for (int i = 0; i < d; ++i) {
    Complex lam = vals(i);
    double dist_circle = std::abs(std::abs(lam) - 1.0);
    if (dist_circle >= circle_tol && dist_circle < cluster_tol)
      throw NearDegenerate("rho_eigen: eigenvalue too close to unit circle");
    bool on_circle = dist_circle < circle_tol;
    bool real_like = std::abs(lam.imag()) < circle_tol;
    if (!on_circle && std::abs(lam.imag()) >= circle_tol &&
        std::abs(lam.imag()) < cluster_tol)
      throw NearDegenerate("rho_eigen: eigenvalue too close to real axis");
    if (real_like) {
      if (lam.real() < 0.0) ++neg_real_mult;
      continue;  // real eigenvalues contribute only the sign factor
    }
    if (!on_circle) continue;  // complex quadruple off the circle: factor 1
    if (lam.imag() < 0.0) continue;  // handle each conjugate pair once
    // Krein sign of the pair from the eigenvector of lam.
    Eigen::VectorXcd v = vecs.col(i);
    Complex form = (v.transpose() * J * v.conjugate())(0, 0);
    double krein = (Complex(0.0, 1.0) * form).real();
    if (std::abs(krein) < 1e-8 * v.squaredNorm())
      throw NearDegenerate("rho_eigen: vanishing Krein form");
    prod *= (krein > 0.0) ? lam : std::conj(lam);
  }
  if (neg_real_mult % 2 != 0)
    throw NearDegenerate("rho_eigen: odd multiplicity at negative reals");
  if ((neg_real_mult / 2) % 2 != 0) prod = -prod;
  double mod = std::abs(prod);
  if (mod < 0.5) throw NearDegenerate("rho_eigen: degenerate product");
  prod /= mod;
  return UnitComplex(prod.real(), prod.imag());
}

Mat matrix_power_symplectic(const Mat& A, int k) {
  const int d = static_cast<int>(A.rows());
  Mat base = k >= 0 ? A : Mat(A.inverse());
  int reps = std::abs(k);
  Mat out = Mat::Identity(d, d);
  for (int i = 0; i < reps; ++i) out = renormalize_symplectic(out * base);
  return out;
}

PowerCheck rho_power_check(const SympMatrix& A, int k) {
  if (std::abs(k) > 20)
    throw InvalidParams("rho_power_check: |k| must be <= 20");
  Mat Ak = matrix_power_symplectic(A.entries(), k);
  SympMatrix Apow(Ak, true);
  Complex rho_k = rho_eigen(Apow).value();
  Complex rho_1 = rho_eigen(A).value();
  Complex rt_k = rho_tilde(Apow).value();
  Complex rt_1 = rho_tilde(A).value();
  PowerCheck out;
  out.rho_defect = std::abs(rho_k - std::pow(rho_1, k));
  out.rho_tilde_defect = std::abs(rt_k - std::pow(rt_1, k));
  return out;
}

Mat rotation2(double theta) {
  Mat R(2, 2);
  R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return R;
}

Mat block_diag(const Mat& A, const Mat& B) {
  // Direct sum in the (x..., y...) coordinate ordering: interleave the
  // position and momentum blocks so that J-compatibility is preserved.
  const int na = static_cast<int>(A.rows()) / 2;
  const int nb = static_cast<int>(B.rows()) / 2;
  const int n = na + nb;
  Mat out = Mat::Zero(2 * n, 2 * n);
  // index maps: A acts on (x_1..x_na, y_1..y_na) -> global (0..na-1, n..n+na-1)
  auto put = [&](const Mat& M, int nm, int offset) {
    for (int i = 0; i < 2 * nm; ++i) {
      for (int j = 0; j < 2 * nm; ++j) {
        int gi = (i < nm) ? offset + i : n + offset + (i - nm);
        int gj = (j < nm) ? offset + j : n + offset + (j - nm);
        out(gi, gj) = M(i, j);
      }
    }
  };
  put(A, na, 0);
  put(B, nb, na);
  return out;
}

Mat random_symplectic(int n, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> uni(-scale, scale);
  const int d = 2 * n;
  Mat J = standard_J(n);
  Mat out = Mat::Identity(d, d);
  for (int rep = 0; rep < 2; ++rep) {
    Mat S(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) S(i, j) = S(j, i) = uni(rng);
    Mat G = J * S;
    out = out * G.exp();
  }
  return renormalize_symplectic(out);
}

Mat random_unitary_symplectic(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMat Z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Z(i, j) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<CMat> qr(Z);
  CMat Q = qr.householderQ();
  Mat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = Q.real();
  out.topRightCorner(n, n) = -Q.imag();
  out.bottomLeftCorner(n, n) = Q.imag();
  out.bottomRightCorner(n, n) = Q.real();
  return out;
}

Mat random_hyperbolic_symplectic(int n, std::mt19937_64& rng,
                                 bool allow_negative) {
  std::uniform_real_distribution<double> mag(1.3, 3.0);
  std::uniform_int_distribution<int> coin(0, 1);
  const int d = 2 * n;
  Mat D = Mat::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    double mu = mag(rng);
    if (allow_negative && coin(rng)) mu = -mu;
    D(i, i) = mu;
    D(n + i, n + i) = 1.0 / mu;
  }
  Mat B = random_symplectic(n, rng, 0.4);
  return renormalize_symplectic(B.inverse() * D * B);
}

}  // namespace sympidx
