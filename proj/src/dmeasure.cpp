#include "gensol/dmeasure.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace gensol {

DiscMeasure::DiscMeasure(const Grid& g, WeightKind kind)
    : grid_(g), kind_(kind), ac_(g.cell_count(), SymMat(kind == WeightKind::Scalar ? 1 : g.dim)) {}

DiscMeasure DiscMeasure::scalar_density(const Grid& g, const std::vector<double>& density) {
  if (density.size() != static_cast<std::size_t>(g.cell_count())) throw InputError("density length != cell count");
  DiscMeasure m(g, WeightKind::Scalar);
  for (int i = 0; i < g.cell_count(); ++i) m.set_density(i, density[i]);
  return m;
}

DiscMeasure DiscMeasure::matrix_density(const Grid& g, const std::vector<SymMat>& density) {
  if (density.size() != static_cast<std::size_t>(g.cell_count())) throw InputError("density length != cell count");
  DiscMeasure m(g, WeightKind::Matrix);
  for (int i = 0; i < g.cell_count(); ++i) m.set_density(i, density[i]);
  return m;
}

void DiscMeasure::set_density(int cell, const SymMat& w) {
  if (w.dim() != weight_dim()) throw InputError("weight dimension mismatch");
  ac_.at(cell) = w;
}

void DiscMeasure::add_atom(const Vec& x, const SymMat& w) {
  if (w.dim() != weight_dim()) throw InputError("atom weight dimension mismatch");
  if (!grid_.contains(x)) throw InputError("atom outside the closed domain");
  if (!w.finite()) throw InputError("non-finite atom weight");
  atoms_.push_back({x, w});
}

void DiscMeasure::clear_density() {
  for (auto& w : ac_) w = SymMat(weight_dim());
}

bool DiscMeasure::is_zero() const {
  const SymMat z(weight_dim());
  for (const auto& w : ac_)
    if (!(w == z)) return false;
  for (const auto& a : atoms_)
    if (!(a.w == z)) return false;
  return true;
}

void DiscMeasure::validate() const {
  grid_.validate();
  if (ac_.size() != static_cast<std::size_t>(grid_.cell_count())) throw InputError("density length != cell count");
  for (const auto& w : ac_) {
    if (w.dim() != weight_dim()) throw InputError("weight dimension mismatch");
    if (!w.finite()) throw InputError("non-finite density weight");
  }
  for (const auto& a : atoms_) {
    if (a.w.dim() != weight_dim()) throw InputError("atom weight dimension mismatch");
    if (!a.w.finite()) throw InputError("non-finite atom weight");
    if (!grid_.contains(a.x)) throw InputError("atom outside the closed domain");
  }
}

DiscMeasure& DiscMeasure::operator+=(const DiscMeasure& o) {
  if (!(grid_ == o.grid_) || kind_ != o.kind_) throw InputError("adding measures on different grids or kinds");
  for (std::size_t i = 0; i < ac_.size(); ++i) ac_[i] += o.ac_[i];
  atoms_.insert(atoms_.end(), o.atoms_.begin(), o.atoms_.end());
  return *this;
}

DiscMeasure& DiscMeasure::operator*=(double s) {
  for (auto& w : ac_) w *= s;
  for (auto& a : atoms_) a.w *= s;
  return *this;
}

double total_variation(const DiscMeasure& mu) {
  if (mu.kind() != WeightKind::Scalar) throw InputError("matrix measure needs a norm kind");
  double s = 0;
  for (const auto& w : mu.ac()) s += std::abs(w(0, 0));
  s *= mu.grid().cell_volume();
  for (const auto& a : mu.atoms()) s += std::abs(a.w(0, 0));
  return s;
}

double total_variation(const DiscMeasure& mu, MatNormKind kind) {
  if (mu.kind() != WeightKind::Matrix) throw InputError("norm kind given for a scalar measure");
  double s = 0;
  for (const auto& w : mu.ac()) s += mat_norm(w, kind);
  s *= mu.grid().cell_volume();
  for (const auto& a : mu.atoms()) s += mat_norm(a.w, kind);
  return s;
}

double total_trace(const DiscMeasure& mu) {
  double s = 0;
  for (const auto& w : mu.ac()) s += w.trace();
  s *= mu.grid().cell_volume();
  for (const auto& a : mu.atoms()) s += a.w.trace();
  return s;
}

double pair(const DiscMeasure& mu, const std::vector<SymMat>& at_cells, const MatField& at_atoms) {
  if (mu.kind() != WeightKind::Matrix) throw InputError("matrix field paired with a scalar measure");
  if (at_cells.size() != mu.ac().size()) throw InputError("field length != cell count");
  double s = 0;
  for (std::size_t i = 0; i < at_cells.size(); ++i) s += frob(at_cells[i], mu.ac()[i]);
  s *= mu.grid().cell_volume();
  for (const auto& a : mu.atoms()) s += frob(at_atoms(a.x), a.w);
  return s;
}

double pair(const DiscMeasure& mu, std::span<const double> at_cells, const ScalarField& at_atoms) {
  if (mu.kind() != WeightKind::Scalar) throw InputError("scalar field paired with a matrix measure");
  if (at_cells.size() != mu.ac().size()) throw InputError("field length != cell count");
  double s = 0;
  for (std::size_t i = 0; i < at_cells.size(); ++i) s += at_cells[i] * mu.density(static_cast<int>(i));
  s *= mu.grid().cell_volume();
  for (const auto& a : mu.atoms()) s += at_atoms(a.x) * a.w(0, 0);
  return s;
}

double pair(const DiscMeasure& mu, const MatField& phi) {
  std::vector<SymMat> cells;
  cells.reserve(mu.ac().size());
  for (int i = 0; i < mu.grid().cell_count(); ++i) cells.push_back(phi(mu.grid().center(i)));
  return pair(mu, cells, phi);
}

double pair(const DiscMeasure& mu, const ScalarField& phi) {
  std::vector<double> cells(mu.ac().size());
  for (int i = 0; i < mu.grid().cell_count(); ++i) cells[i] = phi(mu.grid().center(i));
  return pair(mu, cells, phi);
}

bool cone_membership(const DiscMeasure& mu, MatCone cone) {
  for (const auto& w : mu.ac())
    if (!cone_contains(w, cone)) return false;
  for (const auto& a : mu.atoms())
    if (!cone_contains(a.w, cone)) return false;
  return true;
}

namespace {

// Squared distance, using the nearest periodic image on a torus.
double dist2(const Grid& g, const Vec& a, const Vec& b) {
  double s = 0;
  for (int k = 0; k < g.dim; ++k) {
    double d = std::abs(a[k] - b[k]);
    if (g.topology == Topology::Torus) d = std::min(d, g.extent[k] - d);
    s += d * d;
  }
  return s;
}

SymMat random_sym(int dim, std::mt19937_64& eng) {
  std::normal_distribution<double> n(0, 1);
  SymMat m(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) m.set(i, j, n(eng));
  return m;
}

// Random element of the polar cone: low-rank NSD/PSD for the eigen cones,
// otherwise the projection of a random matrix.
SymMat random_polar(const PolarCone& polar, int dim, std::mt19937_64& eng) {
  const auto as = polar.as_cone();
  if (as == MatCone::PSD || as == MatCone::NSD) {
    std::normal_distribution<double> n(0, 1);
    std::uniform_real_distribution<double> u(0, 1);
    const int rank = u(eng) < 0.5 ? 1 : dim;
    SymMat m(dim);
    for (int r = 0; r < rank; ++r) {
      Vec v{0, 0, 0};
      double len = 0;
      for (int i = 0; i < dim; ++i) {
        v[i] = n(eng);
        len += v[i] * v[i];
      }
      if (len == 0) continue;
      for (int i = 0; i < dim; ++i) v[i] /= std::sqrt(len);
      m += u(eng) * SymMat::outer(v, dim);
    }
    return *as == MatCone::PSD ? m : -1.0 * m;
  }
  return polar.project(random_sym(dim, eng));
}

}  // namespace

namespace {
// Polar projection of w, or zero when it is at roundoff level relative to w.
SymMat polar_part(const PolarCone& polar, const SymMat& w) {
  const SymMat p = polar.project(w);
  return frob(p, p) > 1e-20 * frob(w, w) ? p : SymMat(w.dim());
}
}  // namespace

DualityOutcome cone_duality_test(const DiscMeasure& mu, MatCone cone, int n_samples, std::uint64_t seed) {
  const Grid& g = mu.grid();
  const PolarCone polar = polar_cone(cone);
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(0, 1);

  // Candidate localisation points: atoms and cells with nonzero weight.
  // Each carries the polar part of its own weight, a direction the measure is likely to pair with.
  std::vector<Vec> hot;
  std::vector<SymMat> hot_dir;
  for (const auto& a : mu.atoms()) {
    hot.push_back(a.x);
    hot_dir.push_back(polar_part(polar, a.w));
  }
  for (int i = 0; i < g.cell_count(); ++i)
    if (!(mu.ac()[i] == SymMat(mu.weight_dim()))) {
      hot.push_back(g.center(i));
      hot_dir.push_back(polar_part(polar, mu.ac()[i]));
    }

  DualityOutcome out;
  out.max_pairing = -std::numeric_limits<double>::infinity();
  const double rmin = g.h() / 4, rmax = std::max(g.h(), g.diameter() / 4);
  auto try_field = [&](const Vec& c, double r, const SymMat& z) {
    const MatField field = [&](const Vec& x) { return std::exp(-dist2(g, x, c) / (r * r)) * z; };
    const double p = pair(mu, field);
    if (p > out.max_pairing) {
      out.max_pairing = p;
      out.witness_center = c;
    }
  };
  // Sweep: each hot point against its own polar direction, tightly localised.
  if (n_samples > 0)
    for (std::size_t k = 0; k < hot.size(); ++k) {
      const double nz = std::sqrt(frob(hot_dir[k], hot_dir[k]));
      if (nz == 0) continue;
      const SymMat zk = (1 / nz) * hot_dir[k];
      if (polar.contains(zk, 1e-12)) try_field(hot[k], rmin, zk);
    }
  for (int s = 0; s < n_samples; ++s) {
    Vec c{0, 0, 0};
    SymMat z = random_polar(polar, mu.weight_dim(), eng);
    if (!hot.empty() && u(eng) < 0.5) {
      const std::size_t k = std::min(hot.size() - 1, static_cast<std::size_t>(u(eng) * hot.size()));
      c = hot[k];
      const double nz = std::sqrt(frob(hot_dir[k], hot_dir[k]));
      if (nz > 0 && u(eng) < 0.5) {
        const SymMat zk = (1 / nz) * hot_dir[k];
        if (polar.contains(zk, 1e-12)) z = zk;
      }
    } else {
      for (int k = 0; k < g.dim; ++k) c[k] = u(eng) * g.extent[k];
    }
    const double r = rmin * std::pow(rmax / rmin, u(eng));
    try_field(c, r, z);
  }
  if (n_samples <= 0) out.max_pairing = 0;
  out.holds = out.max_pairing <= 1e-9;
  return out;
}

RnSplit rn_split(const DiscMeasure& mu) {
  RnSplit s{mu, mu};
  s.ac.clear_atoms();
  s.singular.clear_density();
  return s;
}

DiscMeasure trace_adjust(const DiscMeasure& r, double zeta) {
  if (r.kind() != WeightKind::Matrix) throw InputError("trace adjustment needs a matrix measure");
  const double tr = total_trace(r);
  const double bracket = 2 * zeta - tr;
  if (bracket < -2e-12) throw InputError("trace adjustment would break positivity: zeta below half the trace mass");
  const Grid& g = r.grid();
  const SymMat add = (std::max(bracket, 0.0) / (g.volume() * g.dim)) * SymMat::identity(g.dim);
  DiscMeasure out = r;
  for (int i = 0; i < g.cell_count(); ++i) out.set_density(i, r.ac()[i] + add);
  return out;
}

}  // namespace gensol
