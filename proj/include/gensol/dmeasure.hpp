#pragma once

// Discrete Radon measures on the closed domain: a per-cell density plus
// finitely many atoms. Scalar measures store 1x1 weights.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gensol/domain.hpp"
#include "gensol/symcone.hpp"

namespace gensol {

enum class WeightKind { Scalar, Matrix };

struct Atom {
  Vec x{0, 0, 0};
  SymMat w;
};

class DiscMeasure {
 public:
  DiscMeasure() = default;
  /// Zero measure. Matrix weights have the grid's dimension.
  DiscMeasure(const Grid& g, WeightKind kind);

  static DiscMeasure scalar_density(const Grid& g, const std::vector<double>& density);
  static DiscMeasure matrix_density(const Grid& g, const std::vector<SymMat>& density);

  const Grid& grid() const { return grid_; }
  WeightKind kind() const { return kind_; }
  int weight_dim() const { return kind_ == WeightKind::Scalar ? 1 : grid_.dim; }

  const std::vector<SymMat>& ac() const { return ac_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  /// Scalar density of cell i (Scalar kind only).
  double density(int cell) const { return ac_[cell](0, 0); }

  void set_density(int cell, const SymMat& w);
  void set_density(int cell, double w) { set_density(cell, scalar_weight(w)); }
  void add_atom(const Vec& x, const SymMat& w);
  void add_atom(const Vec& x, double w) { add_atom(x, scalar_weight(w)); }
  void clear_atoms() { atoms_.clear(); }
  void clear_density();

  bool is_zero() const;
  /// Throws InputError on a broken invariant.
  void validate() const;

  DiscMeasure& operator+=(const DiscMeasure& o);
  DiscMeasure& operator*=(double s);
  friend DiscMeasure operator+(DiscMeasure a, const DiscMeasure& b) { return a += b; }
  friend DiscMeasure operator*(double s, DiscMeasure a) { return a *= s; }

  static SymMat scalar_weight(double w) {
    SymMat m(1);
    m.set(0, 0, w);
    return m;
  }

 private:
  Grid grid_;
  WeightKind kind_ = WeightKind::Scalar;
  std::vector<SymMat> ac_;
  std::vector<Atom> atoms_;
};

/// |mu|(closed domain) with |.| for scalar measures.
double total_variation(const DiscMeasure& mu);
/// Variation with respect to a matrix norm. Throws for scalar measures.
double total_variation(const DiscMeasure& mu, MatNormKind kind);

/// Signed total mass (Scalar) or the integral of the trace (Matrix).
double total_trace(const DiscMeasure& mu);

using MatField = std::function<SymMat(const Vec&)>;
using ScalarField = std::function<double(const Vec&)>;

/// Midpoint rule on cells plus exact evaluation at atoms.
double pair(const DiscMeasure& mu, const MatField& phi);
double pair(const DiscMeasure& mu, const ScalarField& phi);
/// Same, with the field already sampled at cell centres.
double pair(const DiscMeasure& mu, const std::vector<SymMat>& at_cells, const MatField& at_atoms);
double pair(const DiscMeasure& mu, std::span<const double> at_cells, const ScalarField& at_atoms);

/// Every weight lies in the cone up to eigenvalue tolerance 1e-10. For scalar
/// measures PSD means nonnegative.
bool cone_membership(const DiscMeasure& mu, MatCone cone);

struct DualityOutcome {
  bool holds = true;
  /// Largest pairing seen over the sampled polar-valued fields.
  double max_pairing = 0;
  Vec witness_center{0, 0, 0};
};

/// Pairs mu with n_samples random fields bump(x) * Z, Z in the polar cone and
/// bump a Gaussian with radius log-uniform in [h/4, diam/4]. Holds iff every pairing is
/// <= 1e-9. Half of the bump centres sit on atoms or heavy cells; half of those use
/// the normalised polar projection of the local weight as Z. Before sampling, every
/// atom and nonzero cell is paired once with its own polar direction at radius h/4.
DualityOutcome cone_duality_test(const DiscMeasure& mu, MatCone cone, int n_samples, std::uint64_t seed);

struct RnSplit {
  DiscMeasure ac;
  DiscMeasure singular;
};
RnSplit rn_split(const DiscMeasure& mu);

/// Adds (2 zeta - int tr r) / (|Omega| d) * I to the density so that the trace
/// mass becomes 2 zeta. Throws if zeta < int tr r / 2 - 1e-12.
DiscMeasure trace_adjust(const DiscMeasure& r, double zeta);

}  // namespace gensol
