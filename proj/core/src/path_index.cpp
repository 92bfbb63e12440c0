#include "sympidx/path_index.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <optional>

#include <json.hpp>

namespace sympidx {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

// Continuous unwrap of a sequence of raw angles; enforces the
// quarter-turn jump guard the sampling invariant promises.
struct Unwinder {
  bool first = true;
  double last_raw = 0.0;
  double total = 0.0;

  double push(double raw) {
    if (first) {
      first = false;
      last_raw = raw;
      total = raw;
      return total;
    }
    double d = wrap_angle(raw - last_raw);
    if (std::abs(d) >= kPi / 2.0)
      throw SamplingTooCoarse("winding unwrap: jump >= pi/2 between samples");
    total += d;
    last_raw = raw;
    return total;
  }
};

double rho_tilde_arg(const Mat& frame) {
  return rho_tilde(SympMatrix(frame, true)).arg();
}

Mat rotation_exp(int dim, double theta) {
  // exp(theta*J) = cos(theta) I + sin(theta) J.
  Mat J = standard_J(dim / 2);
  return std::cos(theta) * Mat::Identity(dim, dim) + std::sin(theta) * J;
}

}  // namespace

double step_guard(const SympPath& path) {
  double worst = 0.0;
  const int d = path.dim();
  for (size_t i = 0; i + 1 < path.frames.size(); ++i) {
    Mat step = path.frames[i + 1] * path.frames[i].inverse() -
               Mat::Identity(d, d);
    worst = std::max(worst, step.cwiseAbs().maxCoeff());
  }
  return worst;
}

void validate_path(const SympPath& path) {
  if (path.times.size() != path.frames.size())
    throw InvalidParams("SympPath: times/frames length mismatch");
  if (path.times.size() < 2)
    throw InvalidParams("SympPath: need at least two samples");
  for (size_t i = 0; i + 1 < path.times.size(); ++i)
    if (!(path.times[i] < path.times[i + 1]))
      throw InvalidParams("SympPath: times must be strictly increasing");
  const int d = path.dim();
  for (const Mat& f : path.frames) {
    if (f.rows() != d || f.cols() != d)
      throw DimMismatch("SympPath: inconsistent frame dimensions");
    if (!is_symplectic(f))
      throw NonSymplectic("SympPath: frame violates symplecticity");
  }
  if (step_guard(path) >= 0.5)
    throw SamplingTooCoarse("SympPath: step guard >= 0.5");
}

SympPath make_path(std::vector<double> times, std::vector<Mat> frames,
                   std::string meta) {
  for (Mat& f : frames)
    if (!is_symplectic(f)) f = renormalize_symplectic(f);
  SympPath path{std::move(times), std::move(frames), std::move(meta)};
  validate_path(path);
  return path;
}

DeltaReport delta_tilde(const SympPath& path) {
  validate_path(path);
  DeltaReport report;
  report.method = "polar";
  report.winding_trace.reserve(path.size());
  Unwinder w;
  for (const Mat& f : path.frames)
    report.winding_trace.push_back(w.push(rho_tilde_arg(f)));
  report.delta =
      (report.winding_trace.back() - report.winding_trace.front()) / kPi;
  return report;
}

DeltaReport delta_homogenized(const SympPath& monodromy_path, int k) {
  validate_path(monodromy_path);
  if (k < 1 || k > 64)
    throw InvalidParams("delta_homogenized: k must be in [1,64]");
  const int d = monodromy_path.dim();
  if ((monodromy_path.frames.front() - Mat::Identity(d, d))
          .cwiseAbs()
          .maxCoeff() > 1e-8)
    throw InvalidParams("delta_homogenized: path must start at identity");

  Mat M = renormalize_symplectic(monodromy_path.frames.back());
  Unwinder w;
  DeltaReport report;
  report.method = "homogenized(" + std::to_string(k) + ")";
  double theta0 = 0.0, theta_half = 0.0;
  const int half = k / 2;
  Mat C = Mat::Identity(d, d);
  for (int j = 0; j < k; ++j) {
    for (size_t i = (j == 0 ? 0 : 1); i < monodromy_path.size(); ++i) {
      double theta = w.push(rho_tilde_arg(C * monodromy_path.frames[i]));
      report.winding_trace.push_back(theta);
      if (j == 0 && i == 0) theta0 = theta;
    }
    if (j + 1 == half) theta_half = w.total;
    C = renormalize_symplectic(C * M);
  }
  report.delta = (w.total - theta0) / (kPi * k);
  if (half >= 1) {
    double d_half = (theta_half - theta0) / (kPi * half);
    report.tail_estimate = std::abs(report.delta - d_half);
  }
  return report;
}

QuadHamiltonian sampled_quad(int dim, std::vector<double> times,
                             std::vector<Mat> mats, std::string convention) {
  if (times.size() != mats.size() || times.size() < 2)
    throw InvalidParams("sampled_quad: need matching times/mats, >= 2");
  auto ts = std::make_shared<std::vector<double>>(std::move(times));
  auto ms = std::make_shared<std::vector<Mat>>(std::move(mats));
  QuadHamiltonian H;
  H.dim = dim;
  H.convention = std::move(convention);
  H.S = [ts, ms](double t) -> Mat {
    if (t <= ts->front()) return ms->front();
    if (t >= ts->back()) return ms->back();
    auto it = std::upper_bound(ts->begin(), ts->end(), t);
    size_t i = static_cast<size_t>(it - ts->begin()) - 1;
    double s = (t - (*ts)[i]) / ((*ts)[i + 1] - (*ts)[i]);
    return (1.0 - s) * (*ms)[i] + s * (*ms)[i + 1];
  };
  return H;
}

SympPath linear_flow(const QuadHamiltonian& H, double t_begin, double t_end,
                     int steps) {
  if (!(t_end > t_begin)) throw InvalidParams("linear_flow: empty span");
  if (steps < 1) throw InvalidParams("linear_flow: steps must be positive");
  const int d = H.dim;
  const double sign = (H.convention == "section4") ? -1.0 : 1.0;
  Mat J = standard_J(d / 2);
  Mat I = Mat::Identity(d, d);

  for (int n = steps; n <= (1 << 16); n *= 2) {
    double h = (t_end - t_begin) / n;
    std::vector<double> times(n + 1);
    std::vector<Mat> frames(n + 1);
    times[0] = t_begin;
    frames[0] = I;
    bool guard_ok = true;
    for (int i = 0; i < n; ++i) {
      double tm = t_begin + (i + 0.5) * h;
      Mat S = H.S(tm);
      if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw InvalidParams("linear_flow: S(t) not symmetric");
      S = 0.5 * (S + S.transpose());
      Mat K = (sign * 0.5 * h) * (J * S);
      Mat step = (I - K).partialPivLu().solve(I + K);
      if ((step - I).cwiseAbs().maxCoeff() >= 0.5) {
        guard_ok = false;
        break;
      }
      frames[i + 1] = step * frames[i];
      if ((i & 31) == 31) frames[i + 1] = renormalize_symplectic(frames[i + 1]);
      times[i + 1] = t_begin + (i + 1) * h;
    }
    if (!guard_ok) continue;
    frames[n] = renormalize_symplectic(frames[n]);
    SympPath path{std::move(times), std::move(frames), "linear_flow"};
    if (step_guard(path) < 0.5) return path;
  }
  throw StepGuardViolated("linear_flow: step guard unsatisfied at 2^16 steps");
}

namespace {

struct TangentialCrossing {};

// Piecewise-geodesic interpolation of a sampled symplectic path:
// F(t) = F_i exp(s L_i) with L_i = log(F_i^{-1} F_{i+1}).
class PathInterp {
 public:
  explicit PathInterp(const SympPath& p) : path_(p), logs_(p.size() - 1) {}

  const Mat& log_at(size_t i) const {
    if (!logs_[i]) {
      Mat step = path_.frames[i].inverse() * path_.frames[i + 1];
      logs_[i] = Mat(step.log());
    }
    return *logs_[i];
  }

  size_t interval(double t) const {
    const auto& ts = path_.times;
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    size_t i = (it == ts.begin()) ? 0 : static_cast<size_t>(it - ts.begin()) - 1;
    return std::min(i, ts.size() - 2);
  }

  Mat frame_at(double t) const {
    size_t i = interval(t);
    double h = path_.times[i + 1] - path_.times[i];
    double s = (t - path_.times[i]) / h;
    if (s < 1e-14) return path_.frames[i];
    if (s > 1.0 - 1e-14) return path_.frames[i + 1];
    return path_.frames[i] * Mat(s * log_at(i)).exp();
  }

  // Average generator over interval i, assuming F' = J S F.
  Mat generator(size_t i) const {
    double h = path_.times[i + 1] - path_.times[i];
    Mat J = standard_J(path_.dim() / 2);
    Mat S = -J * log_at(i) / h;
    return 0.5 * (S + S.transpose());
  }

 private:
  const SympPath& path_;
  mutable std::vector<std::optional<Mat>> logs_;
};

double sigma_min(const Mat& M) {
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues().minCoeff();
}

// Signature (#pos - #neg eigenvalues) of a symmetric form; throws
// TangentialCrossing when any eigenvalue is numerically zero.
int signature_or_throw(const Mat& F) {
  Eigen::SelfAdjointEigenSolver<Mat> es(F);
  double scale = 1.0 + es.eigenvalues().cwiseAbs().maxCoeff();
  int sig = 0;
  for (int i = 0; i < F.rows(); ++i) {
    double lam = es.eigenvalues()(i);
    if (std::abs(lam) < 1e-8 * scale) throw TangentialCrossing{};
    sig += lam > 0.0 ? 1 : -1;
  }
  return sig;
}

int cz_attempt(const SympPath& base, double eps) {
  const int d = base.dim();
  const double span = base.t1() - base.t0();
  Mat I = Mat::Identity(d, d);

  SympPath path = base;
  if (eps != 0.0) {
    for (size_t i = 0; i < path.size(); ++i) {
      double rel = (path.times[i] - path.t0()) / span;
      path.frames[i] = rotation_exp(d, eps * rel) * path.frames[i];
    }
  }
  PathInterp interp(path);

  if (std::abs((I - path.frames.back()).determinant()) <= 1e-8)
    throw DegenerateEndpoint("conley_zehnder: det(I - F(T)) too small");

  const size_t N = path.size();
  std::vector<double> smin(N);
  for (size_t i = 0; i < N; ++i) smin[i] = sigma_min(I - path.frames[i]);

  // Interior crossings: refine every sampled local minimum of the
  // smallest singular value of I - F(t) that dips below 0.5.
  std::vector<double> crossings;
  const double t_res = 1e-10 * span;
  for (size_t i = 1; i + 1 < N; ++i) {
    if (smin[i] >= 0.5) continue;
    if (smin[i] > smin[i - 1] || smin[i] > smin[i + 1]) continue;
    double lo = path.times[i - 1], hi = path.times[i + 1];
    // Golden-section minimization of sigma_min.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = sigma_min(I - interp.frame_at(x1));
    double f2 = sigma_min(I - interp.frame_at(x2));
    while (hi - lo > t_res) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = sigma_min(I - interp.frame_at(x1));
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = sigma_min(I - interp.frame_at(x2));
      }
    }
    double t_star = 0.5 * (lo + hi);
    double s_star = sigma_min(I - interp.frame_at(t_star));
    if (s_star < 1e-7) {
      if (t_star - path.t0() > 1e-6 * span &&
          path.t1() - t_star > 1e-6 * span)
        crossings.push_back(t_star);
    } else if (s_star < 1e-6) {
      throw UnresolvedCrossing(
          "conley_zehnder: ambiguous near-crossing of det(I - F(t))");
    }
  }
  std::sort(crossings.begin(), crossings.end());
  for (size_t i = 0; i + 1 < crossings.size(); ++i)
    if (crossings[i + 1] - crossings[i] < 1e-9 * span)
      throw UnresolvedCrossing(
          "conley_zehnder: crossings unresolved at resolution 1e-10");

  // Contribution at t = 0: half the signature of the generator on the
  // full space (the kernel of I - F(0) is everything).
  double total = 0.5 * signature_or_throw(interp.generator(0));

  for (double t_star : crossings) {
    Mat F_star = interp.frame_at(t_star);
    Eigen::JacobiSVD<Mat> svd(I - F_star, Eigen::ComputeFullV);
    double kernel_tol = std::max(1e-6, 10.0 * svd.singularValues().minCoeff());
    int kdim = 0;
    for (int j = 0; j < d; ++j)
      if (svd.singularValues()(j) < kernel_tol) ++kdim;
    if (kdim == 0) continue;
    Mat B = svd.matrixV().rightCols(kdim);
    Mat S_star = interp.generator(interp.interval(t_star));
    Mat form = B.transpose() * S_star * B;
    total += signature_or_throw(0.5 * (form + form.transpose()));
  }

  double rounded = std::round(total);
  if (std::abs(total - rounded) > 1e-6)
    throw UnresolvedCrossing("conley_zehnder: non-integer crossing sum");
  return static_cast<int>(rounded);
}

}  // namespace

int conley_zehnder(const SympPath& path) {
  validate_path(path);
  const int d = path.dim();
  if ((path.frames.front() - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-8)
    throw InvalidParams("conley_zehnder: path must start at identity");
  double eps = 0.0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    try {
      return cz_attempt(path, eps);
    } catch (const TangentialCrossing&) {
      eps = (eps == 0.0) ? 1e-7 : eps * 10.0;
    }
  }
  throw UnresolvedCrossing(
      "conley_zehnder: tangential crossing persists under perturbation");
}

namespace {

std::vector<double> merged_times(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  double span = out.back() - out.front();
  std::vector<double> dedup;
  for (double t : out)
    if (dedup.empty() || t - dedup.back() > 1e-12 * span) dedup.push_back(t);
  return dedup;
}

}  // namespace

double quasimorphism_defect(const SympPath& phi, const SympPath& psi) {
  if (phi.dim() != psi.dim())
    throw DimMismatch("quasimorphism_defect: dimension mismatch");
  validate_path(phi);
  validate_path(psi);

  // Align psi's parameter interval with phi's; the invariant is
  // reparametrization-independent so this is harmless.
  SympPath psi_al = psi;
  double scale = (phi.t1() - phi.t0()) / (psi.t1() - psi.t0());
  for (double& t : psi_al.times) t = phi.t0() + (t - psi.t0()) * scale;

  std::vector<double> grid = merged_times(phi.times, psi_al.times);
  for (int refine = 0; refine < 5; ++refine) {
    SympPath a = resample(phi, grid);
    SympPath b = resample(psi_al, grid);
    std::vector<Mat> prod(grid.size());
    for (size_t i = 0; i < grid.size(); ++i)
      prod[i] = renormalize_symplectic(b.frames[i] * a.frames[i]);
    SympPath product{grid, std::move(prod), "product"};
    if (step_guard(product) < 0.5) {
      double dp = delta_tilde(product).delta;
      double d1 = delta_tilde(phi).delta;
      double d2 = delta_tilde(psi).delta;
      return std::abs(dp - d1 - d2);
    }
    std::vector<double> finer;
    finer.reserve(grid.size() * 2);
    for (size_t i = 0; i + 1 < grid.size(); ++i) {
      finer.push_back(grid[i]);
      finer.push_back(0.5 * (grid[i] + grid[i + 1]));
    }
    finer.push_back(grid.back());
    grid = std::move(finer);
  }
  throw SamplingTooCoarse("quasimorphism_defect: product path too coarse");
}

SturmReport sturm_compare(const QuadHamiltonian& H0, const QuadHamiltonian& H1,
                          double T, int steps) {
  if (H0.dim != H1.dim) throw DimMismatch("sturm_compare: dimension mismatch");
  if (H0.convention != H1.convention)
    throw NotComparable("sturm_compare: mixed sign conventions");
  for (int i = 0; i < steps; ++i) {
    double t = (i + 0.5) * T / steps;
    Mat D = H1.S(t) - H0.S(t);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (D + D.transpose()));
    if (es.eigenvalues().minCoeff() < -1e-10)
      throw NotComparable("sturm_compare: H1 - H0 not positive semidefinite");
  }
  SturmReport report;
  report.delta_h0 = delta_tilde(linear_flow(H0, 0.0, T, steps)).delta;
  report.delta_h1 = delta_tilde(linear_flow(H1, 0.0, T, steps)).delta;
  report.margin = report.delta_h1 - report.delta_h0;
  return report;
}

SympPath resample(const SympPath& path, const std::vector<double>& new_times) {
  validate_path(path);
  if (new_times.size() < 2)
    throw InvalidParams("resample: need at least two times");
  double span = path.t1() - path.t0();
  PathInterp interp(path);
  std::vector<Mat> frames;
  frames.reserve(new_times.size());
  for (double t : new_times) {
    if (t < path.t0() - 1e-9 * span || t > path.t1() + 1e-9 * span)
      throw InvalidParams("resample: time outside path span");
    frames.push_back(renormalize_symplectic(
        interp.frame_at(std::clamp(t, path.t0(), path.t1()))));
  }
  return make_path(new_times, std::move(frames), path.meta);
}

SympPath reverse_path(const SympPath& path) {
  validate_path(path);
  SympPath out;
  out.meta = path.meta;
  const size_t N = path.size();
  out.times.resize(N);
  out.frames.resize(N);
  for (size_t i = 0; i < N; ++i) {
    out.times[i] = path.t0() + (path.t1() - path.times[N - 1 - i]);
    out.frames[i] = path.frames[N - 1 - i];
  }
  return out;
}

SympPath subpath(const SympPath& path, size_t i_begin, size_t i_end) {
  if (i_end <= i_begin || i_end >= path.size() + 1)
    throw InvalidParams("subpath: bad index range");
  SympPath out;
  out.meta = path.meta;
  out.times.assign(path.times.begin() + i_begin, path.times.begin() + i_end);
  out.frames.assign(path.frames.begin() + i_begin,
                    path.frames.begin() + i_end);
  return out;
}

SympPath pointwise_product(const SympPath& phi, const SympPath& psi) {
  if (phi.dim() != psi.dim() || phi.size() != psi.size())
    throw DimMismatch("pointwise_product: incompatible paths");
  std::vector<Mat> frames(phi.size());
  for (size_t i = 0; i < phi.size(); ++i)
    frames[i] = renormalize_symplectic(psi.frames[i] * phi.frames[i]);
  return make_path(phi.times, std::move(frames), "product");
}

SympPath conjugate_path(const Mat& B, const SympPath& path) {
  Mat Binv = B.inverse();
  std::vector<Mat> frames(path.size());
  for (size_t i = 0; i < path.size(); ++i)
    frames[i] = renormalize_symplectic(Binv * path.frames[i] * B);
  return make_path(path.times, std::move(frames), path.meta);
}

std::string path_to_json(const SympPath& path) {
  nlohmann::json arr = nlohmann::json::array();
  const int d = path.dim();
  for (size_t i = 0; i < path.size(); ++i) {
    nlohmann::json entry;
    entry["t"] = path.times[i];
    std::vector<double> flat;
    flat.reserve(d * d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) flat.push_back(path.frames[i](r, c));
    entry["frame"] = flat;
    arr.push_back(std::move(entry));
  }
  return arr.dump(2);
}

SympPath path_from_json(const std::string& text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("path_from_json: ") + e.what());
  }
  if (!arr.is_array() || arr.size() < 2)
    throw ParseError("path_from_json: expected array of >= 2 samples");
  std::vector<double> times;
  std::vector<Mat> frames;
  for (const auto& entry : arr) {
    if (!entry.contains("t") || !entry.contains("frame"))
      throw ParseError("path_from_json: entry missing t or frame");
    times.push_back(entry["t"].get<double>());
    std::vector<double> flat = entry["frame"].get<std::vector<double>>();
    int d = static_cast<int>(std::lround(std::sqrt(double(flat.size()))));
    if (d * d != static_cast<int>(flat.size()) || d < 2 || d % 2 != 0)
      throw ParseError("path_from_json: frame is not a 2n x 2n matrix");
    Mat f(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) f(r, c) = flat[r * d + c];
    frames.push_back(std::move(f));
  }
  return make_path(std::move(times), std::move(frames), "json");
}

}  // namespace sympidx
