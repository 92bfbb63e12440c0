#include "sympidx/magnetic.hpp"

#include <cmath>
#include <random>

#include <json.hpp>

namespace sympidx {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

Eigen::Matrix2d jhat2() {
  Eigen::Matrix2d J2;
  J2 << 0.0, 1.0, -1.0, 0.0;
  return J2;
}

}  // namespace

double FourierSeries2::eval(const Eigen::Vector2d& q) const {
  double v = 0.0;
  for (const auto& t : terms)
    v += t.amp * std::cos(t.kx * q.x() + t.ky * q.y() + t.phase);
  return v;
}

Eigen::Vector2d FourierSeries2::grad(const Eigen::Vector2d& q) const {
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (const auto& t : terms) {
    double s = -t.amp * std::sin(t.kx * q.x() + t.ky * q.y() + t.phase);
    g.x() += s * t.kx;
    g.y() += s * t.ky;
  }
  return g;
}

Eigen::Matrix2d FourierSeries2::hess(const Eigen::Vector2d& q) const {
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  for (const auto& t : terms) {
    double c = -t.amp * std::cos(t.kx * q.x() + t.ky * q.y() + t.phase);
    h(0, 0) += c * t.kx * t.kx;
    h(0, 1) += c * t.kx * t.ky;
    h(1, 0) += c * t.kx * t.ky;
    h(1, 1) += c * t.ky * t.ky;
  }
  return h;
}

double MagneticSystem::b_at(const Eigen::Vector2d& q) const {
  return field_constant ? field_b : field_fourier.eval(q);
}

double MagneticSystem::b_mean() const {
  if (field_constant) return field_b;
  double v = 0.0;
  for (const auto& t : field_fourier.terms)
    if (t.kx == 0 && t.ky == 0) v += t.amp * std::cos(t.phase);
  return v;
}

double MagneticSystem::u_at(const Eigen::Vector2d& q) const {
  return metric == Metric::flat ? 0.0 : conformal_u.eval(q);
}

void validate_system(const MagneticSystem& sys) {
  if (sys.metric == MagneticSystem::Metric::conformal) {
    double total_amp = 0.0;
    for (const auto& t : sys.conformal_u.terms) {
      if (std::abs(t.kx) > 5 || std::abs(t.ky) > 5)
        throw InvalidParams("magnetic: metric Fourier modes capped at 5");
      total_amp += std::abs(t.amp);
    }
    if (total_amp > 0.2)
      throw InvalidParams("magnetic: metric amplitude capped at 0.2");
  }
  const int grid = 32;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      Eigen::Vector2d q(kTwoPi * i / grid, kTwoPi * j / grid);
      if (!(sys.b_at(q) > 0.0))
        throw InvalidParams("magnetic: field must be positive everywhere");
    }
  }
}

HamSystem equations_of_motion(const MagneticSystem& sys) {
  HamSystem out;
  out.dim = 4;
  out.topology = PhaseTopology::torus_base;

  const bool flat = sys.metric == MagneticSystem::Metric::flat;
  const FourierSeries2 u = sys.conformal_u;

  if (flat) {
    out.H = [](const Vec& z) { return 0.5 * z.tail<2>().squaredNorm(); };
    out.gradH = [](const Vec& z) -> Vec {
      Vec g = Vec::Zero(4);
      g.tail<2>() = z.tail<2>();
      return g;
    };
    out.hessH = [](const Vec&) -> Mat {
      Mat S = Mat::Zero(4, 4);
      S(2, 2) = S(3, 3) = 1.0;
      return S;
    };
  } else {
    out.H = [u](const Vec& z) {
      return 0.5 * std::exp(-2.0 * u.eval(z.head<2>())) *
             z.tail<2>().squaredNorm();
    };
    out.gradH = [u](const Vec& z) -> Vec {
      Eigen::Vector2d q = z.head<2>(), p = z.tail<2>();
      double e = std::exp(-2.0 * u.eval(q));
      double K = 0.5 * e * p.squaredNorm();
      Vec g(4);
      g.head<2>() = -2.0 * K * u.grad(q);
      g.tail<2>() = e * p;
      return g;
    };
    out.hessH = [u](const Vec& z) -> Mat {
      Eigen::Vector2d q = z.head<2>(), p = z.tail<2>();
      double e = std::exp(-2.0 * u.eval(q));
      double K = 0.5 * e * p.squaredNorm();
      Eigen::Vector2d du = u.grad(q);
      Mat S(4, 4);
      S.topLeftCorner(2, 2) = 4.0 * K * du * du.transpose() -
                              2.0 * K * u.hess(q);
      Eigen::Matrix2d qp = -2.0 * du * (e * p).transpose();
      S.topRightCorner(2, 2) = qp;
      S.bottomLeftCorner(2, 2) = qp.transpose();
      S.bottomRightCorner(2, 2) = e * Eigen::Matrix2d::Identity();
      return S;
    };
  }

  const bool zero_field = sys.field_constant && sys.field_b == 0.0;
  if (!zero_field) {
    if (sys.field_constant) {
      double b = sys.field_b;
      out.magnetic_b = [b](const Vec&) { return b; };
      out.magnetic_b_grad = [](const Vec&) { return Vec::Zero(2); };
    } else {
      FourierSeries2 bf = sys.field_fourier;
      out.magnetic_b = [bf](const Vec& q) {
        return bf.eval(Eigen::Vector2d(q(0), q(1)));
      };
      out.magnetic_b_grad = [bf](const Vec& q) -> Vec {
        return bf.grad(Eigen::Vector2d(q(0), q(1)));
      };
    }
    if (flat) {
      // Closed-form Jacobian of the classical field (p, b(q) Jhat p).
      bool constant = sys.field_constant;
      double b0 = sys.field_b;
      FourierSeries2 bf = sys.field_fourier;
      out.field_jacobian_cl = [constant, b0, bf](const Vec& z) -> Mat {
        Eigen::Vector2d q = z.head<2>(), p = z.tail<2>();
        double b = constant ? b0 : bf.eval(q);
        Mat A = Mat::Zero(4, 4);
        A.topRightCorner(2, 2) = Eigen::Matrix2d::Identity();
        A.bottomRightCorner(2, 2) = b * jhat2();
        if (!constant)
          A.bottomLeftCorner(2, 2) = (jhat2() * p) * bf.grad(q).transpose();
        return A;
      };
    }
  }
  return out;
}

OrbitRecord oracle_orbit(const MagneticOracle& oracle) {
  if (!(oracle.B > 0.0) || !(oracle.r > 0.0))
    throw InvalidParams("oracle_orbit: B and r must be positive");
  OrbitRecord rec;
  rec.z0 = Vec::Zero(4);
  rec.z0(2) = oracle.r * std::sqrt(2.0);  // p = (v, 0)
  rec.period = kTwoPi / oracle.B;
  rec.energy = oracle.r * oracle.r;
  rec.residual = 0.0;
  rec.contractible = true;
  rec.delta_per_period = 0.0;  // not evaluated in closed form
  rec.winding_ref = "flat-circle-oracle";
  return rec;
}

std::vector<Vec> sample_level(const MagneticSystem& sys, double r, int count,
                              uint64_t seed) {
  if (!(r > 0.0)) throw InvalidParams("sample_level: r must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uq(0.0, kTwoPi);
  std::vector<Vec> out;
  out.reserve(std::max(0, count));
  for (int i = 0; i < count; ++i) {
    Eigen::Vector2d q(uq(rng), uq(rng));
    double angle = uq(rng);
    double pnorm = r * std::sqrt(2.0) * std::exp(sys.u_at(q));
    Vec z(4);
    z << q.x(), q.y(), pnorm * std::cos(angle), pnorm * std::sin(angle);
    out.push_back(std::move(z));
  }
  return out;
}

double arc_length(const Trajectory& traj) {
  double len = 0.0;
  for (size_t i = 0; i + 1 < traj.states.size(); ++i)
    len += (traj.states[i + 1].head<2>() - traj.states[i].head<2>()).norm();
  return len;
}

namespace {

FourierSeries2 fourier_from_json(const nlohmann::json& arr) {
  FourierSeries2 out;
  for (const auto& row : arr) {
    if (!row.is_array() || row.size() != 4)
      throw ParseError("magnetic config: fourier rows are [kx,ky,amp,phase]");
    FourierTerm t;
    t.kx = row[0].get<int>();
    t.ky = row[1].get<int>();
    t.amp = row[2].get<double>();
    t.phase = row[3].get<double>();
    out.terms.push_back(t);
  }
  return out;
}

nlohmann::json fourier_to_json(const FourierSeries2& f) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : f.terms)
    arr.push_back({t.kx, t.ky, t.amp, t.phase});
  return arr;
}

}  // namespace

MagneticSystem magnetic_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("magnetic config: ") + e.what());
  }
  MagneticSystem sys;
  if (!j.contains("metric") || !j.contains("field"))
    throw ParseError("magnetic config: need metric and field sections");
  const auto& metric = j["metric"];
  std::string mtype = metric.value("type", "flat");
  if (mtype == "flat") {
    sys.metric = MagneticSystem::Metric::flat;
  } else if (mtype == "conformal") {
    sys.metric = MagneticSystem::Metric::conformal;
    if (metric.contains("fourier"))
      sys.conformal_u = fourier_from_json(metric["fourier"]);
  } else {
    throw ParseError("magnetic config: metric type must be flat|conformal");
  }
  const auto& field = j["field"];
  std::string ftype = field.value("type", "constant");
  if (ftype == "constant") {
    sys.field_constant = true;
    sys.field_b = field.value("value", 1.0);
  } else if (ftype == "fourier") {
    sys.field_constant = false;
    sys.field_fourier = fourier_from_json(field["fourier"]);
  } else {
    throw ParseError("magnetic config: field type must be constant|fourier");
  }
  return sys;
}

std::string magnetic_to_json(const MagneticSystem& sys) {
  nlohmann::json j;
  if (sys.metric == MagneticSystem::Metric::flat) {
    j["metric"] = {{"type", "flat"}};
  } else {
    j["metric"] = {{"type", "conformal"},
                   {"fourier", fourier_to_json(sys.conformal_u)}};
  }
  if (sys.field_constant) {
    j["field"] = {{"type", "constant"}, {"value", sys.field_b}};
  } else {
    j["field"] = {{"type", "fourier"},
                  {"fourier", fourier_to_json(sys.field_fourier)}};
  }
  return j.dump(2);
}

}  // namespace sympidx
