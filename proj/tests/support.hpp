#pragma once

#include <random>
#include <vector>

#include "relcalc/algebra.hpp"

namespace relcalc::fixtures {

// Random element over a small generator pool, with bounded degree.
inline GradedElement random_element(std::mt19937& rng, const std::vector<Gen>& pool, int terms = 4,
                                    int max_factors = 3) {
  std::uniform_int_distribution<int> coeff(-5, 5), nf(0, max_factors);
  std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
  GradedElement x;
  for (int t = 0; t < terms; ++t) {
    GradedElement m(frac(coeff(rng), 1 + long(rng() % 3)));
    for (int f = nf(rng); f > 0; --f) m = m * gen(pool[pick(rng)]);
    x += m;
  }
  return x;
}

inline std::vector<Gen> base_pool(unsigned g) {
  std::vector<Gen> pool{gen_a(1), gen_a(2), gen_f(2)};
  for (unsigned s = 1; s <= 2 * g; ++s) {
    pool.push_back(gen_b(1, s));
    pool.push_back(gen_b(2, s));
  }
  return pool;
}

}  // namespace relcalc::fixtures
