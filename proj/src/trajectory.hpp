#pragma once

#include <vector>

#include "algebra.hpp"

namespace heom2q {

struct Sample {
  double tau = 0.0;
  CMatrix rho;
};

using Trajectory = std::vector<Sample>;

}  // namespace heom2q
