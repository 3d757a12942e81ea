#include "lhs.hpp"

#include <numeric>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace mpctune {

Eigen::MatrixXd latin_hypercube(int n, int d, uint64_t seed) {
  if (n < 1 || d < 1) throw InputError("latin_hypercube: n and d must be >= 1");
  Eigen::MatrixXd x(n, d);
  std::vector<int> perm(n);
  for (int j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(derive_seed(seed, static_cast<uint64_t>(j)));
    rng.shuffle(perm);
    for (int i = 0; i < n; ++i) {
      x(i, j) = (perm[i] + 0.5) / n;
    }
  }
  return x;
}

}  // namespace mpctune
