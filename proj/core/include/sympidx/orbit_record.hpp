#pragma once

#include <string>

#include "sympidx/linalg.hpp"

namespace sympidx {

struct OrbitRecord {
  Vec z0;
  double period = 0.0;
  double energy = 0.0;       // r^2 for kinetic systems
  double residual = 0.0;     // closure defect in the lifted metric
  bool contractible = true;  // zero winding on both torus cycles
  double delta_per_period = 0.0;
  std::string winding_ref;   // label for the trivialization used
};

}  // namespace sympidx
