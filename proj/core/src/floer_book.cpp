#include "sympidx/floer_book.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "sympidx/format.hpp"

namespace sympidx {
namespace floer {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPi2 = kPi * kPi;

void validate_params(const GeometryParams& p) {
  if (p.m < 1 || p.q < 1)
    throw InvalidParams("floer: m and q must be positive integers");
  if (!(p.r > 0.0) || !(p.eps0 > 0.0))
    throw InvalidParams("floer: r and eps0 must be positive");
  // The shell half-width may equal the canonical choice r^2/10 exactly.
  if (!(p.eps0 <= p.r * p.r / 10.0 * (1.0 + 1e-12)))
    throw InvalidParams("floer: need eps0 <= r^2/10");
  if (!(p.lam_min > 0.0) || !(p.lam_min <= p.lam_max))
    throw InvalidParams("floer: need 0 < lam_min <= lam_max");
}

int x_index_lo(const GeometryParams& p, int l) {
  return (2 * l - 1) * p.q - p.m + 1;
}
int x_index_hi(const GeometryParams& p, int l) {
  return (2 * l + 1) * p.q + p.m;
}
int y_index_lo(const GeometryParams& p, int l) {
  return (2 * l - 1) * p.q - p.m;
}
int y_index_hi(const GeometryParams& p, int l) {
  return (2 * l + 1) * p.q + p.m - 1;
}

}  // namespace

LevelScheme derive_levels(const GeometryParams& p) {
  validate_params(p);
  LevelScheme s;
  s.params = p;
  const double r2 = p.r * p.r;
  s.rho3m = (r2 - 2.0 * p.eps0) / (4.0 * kPi * p.lam_max);
  s.rho1m = s.rho3m / 3.0;
  s.rho2m = 2.0 * s.rho3m / 3.0;
  s.rho1p = (r2 + 2.0 * p.eps0) / (4.0 * kPi * p.lam_min);
  s.rho2p = s.rho1p + s.rho1m;
  s.rho3p = s.rho1p + 2.0 * s.rho1m;
  s.C = 8.0 * kPi2 * s.rho3p;
  s.a = s.C + 2.0 * kPi2 * s.rho1m;
  s.b = s.C + 6.0 * kPi2 * s.rho3p;
  s.slope = (s.C / s.rho1m) * (1.0 + 1e-9 * std::sqrt(2.0));
  s.k = static_cast<int>(std::floor(s.slope));
  s.n0 = 1 + p.q - p.m;
  s.eta = 1e-3 * s.C;
  if (s.k < 1) throw InvalidParams("floer: derived k < 1");

  s.levels.reserve(4 * s.k);
  for (int l = 1; l <= s.k; ++l) {
    for (int sign : {+1, -1}) {
      Level x;
      x.kind = 'x';
      x.sign = sign;
      x.l = l;
      x.rho = sign > 0 ? s.rho1p : s.rho1m;
      x.action = s.C + 4.0 * kPi2 * l * x.rho;
      x.index_lo = x_index_lo(p, l);
      x.index_hi = x_index_hi(p, l);
      s.levels.push_back(x);
      Level y;
      y.kind = 'y';
      y.sign = sign;
      y.l = l;
      y.rho = sign > 0 ? s.rho2p : s.rho2m;
      y.action = 4.0 * kPi2 * l * y.rho;
      y.index_lo = y_index_lo(p, l);
      y.index_hi = y_index_hi(p, l);
      s.levels.push_back(y);
    }
  }
  return s;
}

WindowReport check_window(const LevelScheme& s, double lambda0) {
  WindowReport w;
  const double eta = s.eta;
  double margin = std::numeric_limits<double>::infinity();
  auto track = [&](double m) {
    margin = std::min(margin, m);
    return m > 0.0;
  };

  w.window_order = track(s.a - s.C - eta) && track(s.b - s.a - eta) &&
                   track(2.0 * s.C - s.b - eta);

  const double ax1p = s.C + 4.0 * kPi2 * s.rho1p;
  const double ax1m = s.C + 4.0 * kPi2 * s.rho1m;
  w.x1_inside = track(ax1p - s.a - eta) && track(s.b - ax1p - eta) &&
                track(ax1m - s.a - eta) && track(s.b - ax1m - eta);

  const double ay1p = 4.0 * kPi2 * s.rho2p;
  const double ay2p = 8.0 * kPi2 * s.rho2p;
  const double ay1m = 4.0 * kPi2 * s.rho2m;
  const double ay2m = 8.0 * kPi2 * s.rho2m;
  w.y12_below = track(ay2p - ay1p - eta) && track(s.a - ay2p - eta) &&
                track(ay2m - ay1m - eta) && track(s.a - ay2m - eta);

  w.high_levels_above = true;
  for (const Level& lv : s.levels) {
    if (lv.kind == 'x' && lv.l >= 2 && lv.index_lo <= s.n0 + 1)
      w.high_levels_above = false;
    if (lv.kind == 'y' && lv.l >= 3 && lv.index_lo <= s.n0 + 1)
      w.high_levels_above = false;
  }

  w.lambda0_clears = 2.0 * s.C < lambda0;

  // The x1 interval starts exactly at n0 but sits inside the window
  // (verdict 2); beyond it, only y1/y2 may reach down to n0-1 or n0.
  w.only_y12_near_n0 = true;
  for (const Level& lv : s.levels) {
    bool contains = (lv.index_lo <= s.n0 && lv.index_hi >= s.n0 - 1);
    if (!contains) continue;
    if (lv.kind == 'x' && lv.l == 1) continue;
    if (!(lv.kind == 'y' && lv.l <= 2)) w.only_y12_near_n0 = false;
  }

  w.min_margin = margin;
  return w;
}

std::vector<RecapEntry> recap_lattice(double action, int index_lo,
                                      int index_hi, const CappingShift& shift,
                                      int j_min, int j_max) {
  if (j_min > j_max) throw InvalidParams("recap_lattice: empty j range");
  std::vector<RecapEntry> out;
  if (std::isinf(shift.lambda0)) {
    // No nontrivial sphere areas: only the trivial recapping exists.
    if (j_min <= 0 && 0 <= j_max)
      out.push_back({0, action, index_lo, index_hi});
    return out;
  }
  long index_step = 0;
  if (shift.proportional) {
    double s2 = 2.0 * shift.lambda * shift.lambda0;
    double rounded = std::round(s2);
    if (std::abs(s2 - rounded) > 1e-9 ||
        static_cast<long>(rounded) % 2 != 0)
      throw InconsistentChern(
          "recap_lattice: 2*lambda*lambda0 must be an even integer");
    index_step = static_cast<long>(rounded);
  }
  for (int j = j_min; j <= j_max; ++j) {
    RecapEntry e;
    e.j = j;
    e.action = action + j * shift.lambda0;
    e.index_lo = index_lo + static_cast<int>(j * index_step);
    e.index_hi = index_hi + static_cast<int>(j * index_step);
    out.push_back(e);
  }
  return out;
}

HomotopyReport homotopy_trace(const GeometryParams& p, int samples) {
  if (samples < 10)
    throw InvalidParams("homotopy_trace: need at least 10 samples");
  LevelScheme s = derive_levels(p);
  HomotopyReport rep;

  // Levels whose index interval meets {n0-1, n0, n0+1} are the only
  // ones that can affect the window argument; track their actions as
  // the profile slides from the + configuration to the - one.
  std::vector<int> tracked_y;
  for (int l = 1; l <= s.k; ++l) {
    if (y_index_lo(p, l) <= s.n0 + 1 && y_index_hi(p, l) >= s.n0 - 1)
      tracked_y.push_back(l);
    else if (y_index_lo(p, l) > s.n0 + 1)
      break;
  }

  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    double t = double(i) / (samples - 1);
    double rho_x = (1.0 - t) * s.rho1p + t * s.rho1m;
    double rho_y = (1.0 - t) * s.rho2p + t * s.rho2m;
    double ax1 = s.C + 4.0 * kPi2 * rho_x;  // must stay inside (a,b)
    margin = std::min(margin, std::min(ax1 - s.a, s.b - ax1) - s.eta);
    for (int l : tracked_y) {
      double ay = 4.0 * kPi2 * l * rho_y;  // must stay below a
      margin = std::min(margin, s.a - ay - s.eta);
    }
  }
  rep.min_margin = margin;
  rep.ok = margin > 0.0;

  double ax1_start = s.C + 4.0 * kPi2 * s.rho1p;
  double ax1_end = s.C + 4.0 * kPi2 * s.rho1m;
  double tol = 1e-9 * (1.0 + s.C);
  rep.endpoints_consistent = true;
  for (const Level& lv : s.levels) {
    if (lv.kind != 'x' || lv.l != 1) continue;
    double expect = lv.sign > 0 ? ax1_start : ax1_end;
    if (std::abs(lv.action - expect) > tol) rep.endpoints_consistent = false;
  }
  return rep;
}

std::string scheme_to_json(const LevelScheme& s, const WindowReport& w) {
  nlohmann::json j;
  j["params"] = {{"m", s.params.m},         {"q", s.params.q},
                 {"r", s.params.r},         {"eps0", s.params.eps0},
                 {"lam_min", s.params.lam_min},
                 {"lam_max", s.params.lam_max}};
  j["rho"] = {{"rho1m", s.rho1m}, {"rho2m", s.rho2m}, {"rho3m", s.rho3m},
              {"rho1p", s.rho1p}, {"rho2p", s.rho2p}, {"rho3p", s.rho3p}};
  j["C"] = s.C;
  j["a"] = s.a;
  j["b"] = s.b;
  j["slope"] = s.slope;
  j["k"] = s.k;
  j["n0"] = s.n0;
  j["eta"] = s.eta;
  j["verdicts"] = {{"window_order", w.window_order},
                   {"x1_inside", w.x1_inside},
                   {"y12_below", w.y12_below},
                   {"high_levels_above", w.high_levels_above},
                   {"lambda0_clears", w.lambda0_clears},
                   {"only_y12_near_n0", w.only_y12_near_n0},
                   {"min_margin", w.min_margin}};
  return j.dump(2);
}

std::string levels_to_csv(const LevelScheme& s) {
  std::ostringstream out;
  out << "kind,sign,l,rho,action,index_lo,index_hi\r\n";
  for (const Level& lv : s.levels) {
    out << lv.kind << "," << (lv.sign > 0 ? "+" : "-") << "," << lv.l << ","
        << fmt17(lv.rho) << "," << fmt17(lv.action) << "," << lv.index_lo
        << "," << lv.index_hi << "\r\n";
  }
  return out.str();
}

}  // namespace floer
}  // namespace sympidx
