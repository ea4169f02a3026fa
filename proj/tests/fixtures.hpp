#pragma once

// Named cocycles shared by the unit and acceptance tests.

#include <ergopt/cocycle.hpp>
#include <random>

namespace fixtures {

using ergopt::Cocycle;
using ergopt::Matrix;

inline Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Matrix diag2(double a, double b) { return mat2(a, 0, 0, b); }

/// {[[1,1],[0,1]], [[1,0],[1,1]]}: joint spectral radius is the golden ratio.
inline Cocycle fibonacci_pair() { return Cocycle::one_step({mat2(1, 1, 0, 1), mat2(1, 0, 1, 1)}); }

inline Cocycle diag_pair() { return Cocycle::one_step({diag2(2, 0.5), diag2(3, 1.0 / 3)}); }

/// {[[1,1],[0,1]], [[2,0],[2,2]]}.
inline Cocycle shear_pair() { return Cocycle::one_step({mat2(1, 1, 0, 1), mat2(2, 0, 2, 2)}); }

/// Two 2x2 matrices with entries uniform in [0.5, 1.5], redrawn while
/// |det| < 1e-3.
inline Cocycle random_pair(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::vector<Matrix> ms;
  while (ms.size() < 2) {
    const Matrix m = mat2(u(rng), u(rng), u(rng), u(rng));
    if (std::abs(m.determinant()) >= 1e-3) ms.push_back(m);
  }
  return Cocycle::one_step(ms);
}

/// Random admissible words of the given length.
inline std::vector<ergopt::Word> sample_words(const Cocycle& F, int length, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ergopt::Word> out;
  for (int i = 0; i < count; ++i) out.push_back(ergopt::random_admissible_word(F.base(), length, rng));
  return out;
}

}  // namespace fixtures
