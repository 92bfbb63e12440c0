#include <doctest.h>

#include <cmath>
#include <iostream>

#include "sympidx/ham_flow.hpp"

using namespace sympidx;

namespace {
constexpr double kPi = 3.14159265358979323846;

HamSystem harmonic(int dim = 2) {
  HamSystem sys;
  sys.dim = dim;
  sys.H = [](const Vec& z) { return 0.5 * z.squaredNorm(); };
  sys.gradH = [](const Vec& z) { return z; };
  sys.hessH = [dim](const Vec&) { return Mat::Identity(dim, dim); };
  return sys;
}

HamSystem pendulum() {
  HamSystem sys;
  sys.dim = 2;
  sys.H = [](const Vec& z) { return 0.5 * z(1) * z(1) + std::cos(z(0)); };
  sys.gradH = [](const Vec& z) {
    Vec g(2);
    g << -std::sin(z(0)), z(1);
    return g;
  };
  sys.hessH = [](const Vec& z) {
    Mat h(2, 2);
    h << -std::cos(z(0)), 0.0, 0.0, 1.0;
    return h;
  };
  return sys;
}
}  // namespace

TEST_CASE("circular motion returns") {
  HamSystem sys = harmonic();
  Vec z0(2);
  z0 << 1.0, 0.0;
  Trajectory traj = flow(sys, z0, 2.0 * kPi, 8192, SignConvention::section2);
  double ret = (traj.states.back() - z0).norm();
  std::cout << "[qoi] harmonic return distance after one period = " << ret
            << "\n";
  CHECK(ret < 1e-6);
  CHECK(traj.energy_drift < 1e-10);
}

TEST_CASE("constant Hamiltonian freezes the flow") {
  HamSystem sys;
  sys.dim = 2;
  sys.H = [](const Vec&) { return 3.0; };
  sys.gradH = [](const Vec& z) { return Vec(Vec::Zero(z.size())); };
  Vec z0(2);
  z0 << 0.3, -0.7;
  Trajectory traj = flow(sys, z0, 5.0, 64, SignConvention::section4);
  for (const Vec& z : traj.states) CHECK((z - z0).norm() == 0.0);
}

TEST_CASE("pendulum energy drift") {
  Trajectory traj =
      flow(pendulum(), [] {
        Vec z(2);
        z << kPi + 0.4, 0.3;  // libration well around q = pi
        return z;
      }(), 100.0, 10000, SignConvention::section4);
  std::cout << "[qoi] pendulum energy drift over T=100, h=1e-2: "
            << traj.energy_drift << "\n";
  CHECK(traj.energy_drift < 1e-6);
}

TEST_CASE("time reversal symmetry") {
  HamSystem sys = pendulum();
  Vec z0(2);
  z0 << 1.1, -0.2;
  Trajectory fwd = flow(sys, z0, 3.0, 2048, SignConvention::section4);
  Trajectory bwd =
      flow(sys, fwd.states.back(), 3.0, 2048, SignConvention::section2);
  // section2 is the negated field here only for sign-flipped H; integrate
  // backwards properly instead: reverse via negative momentum trick is not
  // generic, so just re-run with the opposite convention of the same field.
  // For the implicit midpoint the adjoint property gives exact reversal.
  CHECK((bwd.states.back() - z0).norm() < 1e-8);
}

TEST_CASE("variational flow matches the linear flow on linear systems") {
  HamSystem sys = harmonic(4);
  Vec z0(4);
  z0 << 0.5, -0.3, 0.2, 0.9;
  Trajectory traj = flow(sys, z0, 2.0, 1024, SignConvention::section2);
  SympPath vf = variational_flow(sys, traj, SignConvention::section2);

  QuadHamiltonian q;
  q.dim = 4;
  q.S = [](double) { return Mat::Identity(4, 4); };
  SympPath lf = linear_flow(q, 0.0, 2.0, 1024);
  CHECK((vf.frames.back() - lf.frames.back()).cwiseAbs().maxCoeff() < 1e-8);

  // symplecticity of the stored frames
  double worst = 0.0;
  for (const Mat& F : vf.frames)
    worst = std::max(worst, symplectic_defect(F));
  CHECK(worst < 1e-7);
}

TEST_CASE("pendulum center winds linearly") {
  HamSystem sys = pendulum();
  Vec z0(2);
  z0 << kPi, 0.0;  // stable equilibrium of H = p^2/2 + cos q
  Trajectory traj = flow(sys, z0, 8.0, 2048, SignConvention::section2);
  SympPath vf = variational_flow(sys, traj, SignConvention::section2);
  double d_full = delta_tilde(vf).delta;
  SympPath half = subpath(vf, 0, vf.size() / 2 + 1);
  double d_half = delta_tilde(half).delta;
  CHECK(d_full > 0.0);
  CHECK(std::abs(d_full - 2.0 * d_half) < 1e-2);
}

TEST_CASE("monodromy determinant") {
  HamSystem sys = pendulum();
  Vec z0(2);
  z0 << 0.8, 0.1;
  Trajectory traj = flow(sys, z0, 4.0, 1024, SignConvention::section4);
  SympPath vf = variational_flow(sys, traj, SignConvention::section4);
  CHECK(std::abs(vf.frames.back().determinant() - 1.0) < 1e-8);
}

TEST_CASE("sign conventions mirror each other on linear flows") {
  HamSystem sys = harmonic(2);
  Vec z0(2);
  z0 << 1.0, 0.0;
  Trajectory t2 = flow(sys, z0, 3.0, 1024, SignConvention::section2);
  SympPath v2 = variational_flow(sys, t2, SignConvention::section2);
  Trajectory t4 = flow(sys, z0, 3.0, 1024, SignConvention::section4);
  SympPath v4 = variational_flow(sys, t4, SignConvention::section4);
  double d2 = delta_tilde(v2).delta;
  double d4 = delta_tilde(v4).delta;
  CHECK(d2 > 0.0);
  CHECK(d4 < 0.0);
  CHECK(std::abs(d2 + d4) < 1e-9);
}

TEST_CASE("winding is stable under monotone energy reparametrization") {
  HamSystem sys = harmonic(2);
  Vec z0(2);
  z0 << 1.0, 0.0;  // K = 1/2 circle
  Trajectory orbit = flow(sys, z0, 2.0 * kPi, 8192, SignConvention::section2);

  MonotoneReparam ident{[](double x) { return x; },
                        [](double) { return 1.0; }};
  auto [dk0, dh0] =
      delta_under_reparametrization(sys, ident, orbit,
                                    SignConvention::section2);
  CHECK(std::abs(dk0 - dh0) < 1e-9);

  MonotoneReparam twice{[](double x) { return 2.0 * x; },
                        [](double) { return 2.0; }};
  auto [dk1, dh1] =
      delta_under_reparametrization(sys, twice, orbit,
                                    SignConvention::section2);
  CHECK(std::abs(dk1 - dh1) < 1e-6);

  MonotoneReparam quad{[](double x) { return x + x * x; },
                       [](double x) { return 1.0 + 2.0 * x; }};
  auto [dk2, dh2] =
      delta_under_reparametrization(sys, quad, orbit,
                                    SignConvention::section2);
  std::cout << "[qoi] winding under f(x)=x+x^2: " << dk2 << " vs " << dh2
            << "\n";
  CHECK(std::abs(dk2 - dh2) < 1e-4);

  // non-periodic input rejected
  Trajectory open_arc = flow(sys, z0, 1.0, 512, SignConvention::section2);
  CHECK_THROWS_AS(
      delta_under_reparametrization(sys, ident, open_arc,
                                    SignConvention::section2),
      NonPeriodicInput);
}

TEST_CASE("trajectory CSV") {
  HamSystem sys = harmonic(2);
  Vec z0(2);
  z0 << 1.0, 0.0;
  Trajectory traj = flow(sys, z0, 0.1, 16, SignConvention::section2);
  std::string csv = trajectory_to_csv(sys, traj);
  CHECK(csv.rfind("t,z_1,z_2,H", 0) == 0);
  CHECK(csv.find("\r\n") != std::string::npos);
}

TEST_CASE("step preconditions") {
  HamSystem sys = harmonic(2);
  Vec z0(2);
  z0 << 1.0, 0.0;
  CHECK_THROWS_AS(flow(sys, z0, 1.0, 8, SignConvention::section2),
                  StepTooLarge);
}
