#pragma once

#include <limits>
#include <string>
#include <vector>

#include "sympidx/errors.hpp"

namespace sympidx {
namespace floer {

struct GeometryParams {
  int m = 1;           // dim of the critical submanifold = 2m
  int q = 1;           // codim = 2q
  double r = 1.0;      // shell radius parameter; energies scale as r^2
  double eps0 = 0.05;  // shell half-width; must satisfy eps0 < r^2/10
  double lam_min = 1.0, lam_max = 1.0;  // extreme fiber Hessian eigenvalues
};

struct Level {
  char kind = 'x';   // 'x' (convex region) or 'y' (concave region)
  int sign = +1;     // +1 or -1 profile
  int l = 1;         // 1..k
  double rho = 0.0;
  double action = 0.0;
  int index_lo = 0, index_hi = 0;
};

struct LevelScheme {
  GeometryParams params;
  double rho1m = 0, rho2m = 0, rho3m = 0;
  double rho1p = 0, rho2p = 0, rho3p = 0;
  double C = 0;          // C = 8 pi^2 rho3p
  double a = 0, b = 0;   // action window, C < a < b < 2C
  double slope = 0;      // C / rho1m, nudged irrational
  int k = 0;             // floor(slope)
  int n0 = 0;            // 1 + q - m
  double eta = 0;        // leading-order slack, 1e-3 * C
  std::vector<Level> levels;
};

struct CappingShift {
  double lambda0 = std::numeric_limits<double>::infinity();
  bool proportional = false;  // case (ii): c1 pairing = lambda * area pairing
  double lambda = 0.0;
};

LevelScheme derive_levels(const GeometryParams& p);

struct WindowReport {
  bool window_order = false;        // (1) C < a < b < 2C
  bool x1_inside = false;           // (2) A(x1+-) in (a,b)
  bool y12_below = false;           // (3) A(y1+-) < A(y2+-) < a
  bool high_levels_above = false;   // (4) index_lo above n0+1 for l >= 2 (x),
                                    //     l >= 3 (y)
  bool lambda0_clears = false;      // (5) 2C < lambda0
  bool only_y12_near_n0 = false;    // (6) besides x1, only y1/y2 intervals
                                    //     contain n0-1 or n0
  double min_margin = 0.0;          // worst slack-adjusted margin of (1)-(3)
};

WindowReport check_window(const LevelScheme& s, double lambda0);

struct RecapEntry {
  int j = 0;
  double action = 0.0;
  int index_lo = 0, index_hi = 0;
};

std::vector<RecapEntry> recap_lattice(double action, int index_lo,
                                      int index_hi, const CappingShift& shift,
                                      int j_min, int j_max);

struct HomotopyReport {
  double min_margin = 0.0;  // clearance of tracked actions from {a, b}
  bool ok = false;
  bool endpoints_consistent = false;
};

HomotopyReport homotopy_trace(const GeometryParams& p, int samples);

std::string scheme_to_json(const LevelScheme& s, const WindowReport& w);
std::string levels_to_csv(const LevelScheme& s);

}  // namespace floer
}  // namespace sympidx
