#pragma once

#include <cstdint>
#include <Eigen/Dense>

namespace mpctune {

// Centered Latin hypercube on [0,1]^d: one point per stratum midpoint per
// dimension, paired across dimensions by seeded permutation. n=1 degenerates
// to the box center. Deterministic for a given (n, d, seed).
Eigen::MatrixXd latin_hypercube(int n, int d, uint64_t seed);

}  // namespace mpctune
