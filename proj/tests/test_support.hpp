#pragma once

// Random generators shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <random>

#include "gensol/symcone.hpp"

namespace gensol::testing {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo = 0, double hi = 1) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double normal() { return normal_(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  std::mt19937_64& engine() { return eng_; }

  SymMat sym(int dim, double scale = 1.0) {
    SymMat m(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) m.set(i, j, scale * normal());
    return m;
  }

  Vec unit_vector(int dim) {
    Vec u{0, 0, 0};
    double n = 0;
    while (n < 1e-8) {
      n = 0;
      for (int i = 0; i < dim; ++i) {
        u[i] = normal();
        n += u[i] * u[i];
      }
      n = std::sqrt(n);
    }
    for (int i = 0; i < dim; ++i) u[i] /= n;
    return u;
  }

  /// Random PSD matrix sum of `rank` nonnegative rank-one terms.
  SymMat psd(int dim, int rank = 3, double scale = 1.0) {
    SymMat m(dim);
    for (int r = 0; r < rank; ++r) m += (scale * uniform()) * SymMat::outer(unit_vector(dim), dim);
    return m;
  }

  SymMat nsd(int dim, int rank = 3) { return -1.0 * psd(dim, rank); }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0, 1};
};

inline Mat to_mat(const SymMat& s) {
  Mat m(s.dim());
  for (int i = 0; i < s.dim(); ++i)
    for (int j = 0; j < s.dim(); ++j) m(i, j) = s(i, j);
  return m;
}

/// Brute-force sup of A:B over B in the unit ball of `kind`: random sampling
/// followed by shrinking random perturbations of the incumbent. Half of the
/// proposals are rank one (+-u u^T), half full. Uses only the primal norm to
/// normalize candidates, never the closed-form dual.
inline double brute_dual_sup(const SymMat& a, MatNormKind kind, int samples, Sampler& rng) {
  const int d = a.dim();
  auto normalize = [&](SymMat b) {
    const double n = mat_norm(b, kind);
    return n > 0 ? (1.0 / n) * b : b;
  };
  auto proposal = [&](int k, double scale) {
    if (k % 2 == 0) return rng.sym(d, scale);
    return (rng.uniform() < 0.5 ? -scale : scale) * SymMat::outer(rng.unit_vector(d), d);
  };
  SymMat best = normalize(rng.sym(d));
  double best_val = frob(a, best);
  const int explore = samples / 5;
  for (int k = 1; k < samples; ++k) {
    SymMat cand;
    if (k < explore) {
      cand = normalize(proposal(k, 1.0));
    } else {
      const double frac = double(k - explore) / std::max(1, samples - explore);
      const double sigma = 0.5 * std::pow(1e-4, frac);
      cand = normalize(best + proposal(k, sigma));
    }
    const double v = frob(a, cand);
    if (v > best_val) {
      best_val = v;
      best = cand;
    }
  }
  return best_val;
}

}  // namespace gensol::testing
