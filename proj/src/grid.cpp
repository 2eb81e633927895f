#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "gensol/domain.hpp"

namespace gensol {

std::string to_string(Topology t) { return t == Topology::Box ? "box" : "torus"; }

Topology topology_from_string(const std::string& s) {
  if (s == "box") return Topology::Box;
  if (s == "torus") return Topology::Torus;
  throw InputError("unknown topology '" + s + "'");
}

Grid::Grid(int d, Topology t, Vec ext, std::array<int, 3> n)
    : dim(d), topology(t), extent(ext), cells(n) {
  for (int a = d; a < 3; ++a) {
    extent[a] = 1;
    cells[a] = 1;
  }
  validate();
}

Grid Grid::unit(int dim, Topology topology, int n) {
  return Grid(dim, topology, {1, 1, 1}, {n, n, n});
}

void Grid::validate() const {
  if (dim < 1 || dim > 3) throw InputError("grid dimension must be 1, 2 or 3");
  for (int a = 0; a < dim; ++a) {
    if (!(extent[a] > 0) || !std::isfinite(extent[a])) throw InputError("grid extents must be positive");
    if (cells[a] < 1) throw InputError("grid cell counts must be positive");
  }
}

int Grid::cell_count() const {
  int n = 1;
  for (int a = 0; a < dim; ++a) n *= cells[a];
  return n;
}

double Grid::h() const {
  double h = 0;
  for (int a = 0; a < dim; ++a) h = std::max(h, spacing(a));
  return h;
}

double Grid::cell_volume() const {
  double v = 1;
  for (int a = 0; a < dim; ++a) v *= spacing(a);
  return v;
}

double Grid::volume() const {
  double v = 1;
  for (int a = 0; a < dim; ++a) v *= extent[a];
  return v;
}

double Grid::diameter() const {
  double s = 0;
  for (int a = 0; a < dim; ++a) s += extent[a] * extent[a];
  return std::sqrt(s);
}

std::array<int, 3> Grid::multi_index(int cell) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    idx[a] = cell % cells[a];
    cell /= cells[a];
  }
  return idx;
}

int Grid::flat_index(const std::array<int, 3>& idx) const {
  int flat = 0;
  for (int a = dim - 1; a >= 0; --a) flat = flat * cells[a] + idx[a];
  return flat;
}

Vec Grid::center(int cell) const {
  const auto idx = multi_index(cell);
  Vec x{0, 0, 0};
  for (int a = 0; a < dim; ++a) x[a] = (idx[a] + 0.5) * spacing(a);
  return x;
}

bool Grid::contains(const Vec& x) const {
  for (int a = 0; a < dim; ++a) {
    const double eps = 1e-12 * extent[a];
    if (!std::isfinite(x[a]) || x[a] < -eps || x[a] > extent[a] + eps) return false;
  }
  return true;
}

int Grid::locate(const Vec& x) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim; ++a)
    idx[a] = std::clamp(static_cast<int>(std::floor(x[a] / spacing(a))), 0, cells[a] - 1);
  return flat_index(idx);
}

bool Grid::is_boundary_cell(int cell) const {
  if (topology == Topology::Torus) return false;
  const auto idx = multi_index(cell);
  for (int a = 0; a < dim; ++a)
    if (idx[a] == 0 || idx[a] == cells[a] - 1) return true;
  return false;
}

std::vector<Vec> Grid::vertices() const {
  std::array<int, 3> n{1, 1, 1};
  int total = 1;
  for (int a = 0; a < dim; ++a) {
    n[a] = cells[a] + 1;
    total *= n[a];
  }
  std::vector<Vec> out;
  out.reserve(total);
  for (int k = 0; k < total; ++k) {
    int r = k;
    Vec x{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      x[a] = (r % n[a]) * spacing(a);
      r /= n[a];
    }
    out.push_back(x);
  }
  return out;
}

void TimeGrid::validate() const {
  if (!(T > 0) || !std::isfinite(T)) throw InputError("final time must be positive");
  if (steps < 2) throw InputError("time grid needs at least two steps");
}

double quad(const Grid& g, std::span<const double> f) {
  if (static_cast<int>(f.size()) != g.cell_count()) throw InputError("field length does not match grid");
  double s = 0;
  for (double v : f) s += v;
  return s * g.cell_volume();
}

namespace {

// Value of f at the neighbour of `cell` shifted by `off` along axis a, with
// wrap-around on a torus; returns false when the neighbour is outside a box.
bool neighbour(const Grid& g, int cell, int axis, int off, int& out) {
  auto idx = g.multi_index(cell);
  int j = idx[axis] + off;
  const int n = g.cells[axis];
  if (g.topology == Topology::Torus) {
    j = ((j % n) + n) % n;
  } else if (j < 0 || j >= n) {
    return false;
  }
  idx[axis] = j;
  out = g.flat_index(idx);
  return true;
}

}  // namespace

std::vector<Vec> gradient(const Grid& g, std::span<const double> f) {
  if (static_cast<int>(f.size()) != g.cell_count()) throw InputError("field length does not match grid");
  for (int a = 0; a < g.dim; ++a)
    if (g.cells[a] < 3) throw InputError("gradient needs at least three cells per axis");
  std::vector<Vec> out(f.size(), Vec{0, 0, 0});
  for (int c = 0; c < g.cell_count(); ++c) {
    for (int a = 0; a < g.dim; ++a) {
      const double h = g.spacing(a);
      int m = 0, p = 0;
      const bool has_m = neighbour(g, c, a, -1, m);
      const bool has_p = neighbour(g, c, a, +1, p);
      if (has_m && has_p) {
        out[c][a] = (f[p] - f[m]) / (2 * h);
      } else if (has_p) {
        int p2 = 0;
        neighbour(g, c, a, +2, p2);
        out[c][a] = (-3 * f[c] + 4 * f[p] - f[p2]) / (2 * h);
      } else {
        int m2 = 0;
        neighbour(g, c, a, -2, m2);
        out[c][a] = (3 * f[c] - 4 * f[m] + f[m2]) / (2 * h);
      }
    }
  }
  return out;
}

std::vector<double> laplacian(const Grid& g, std::span<const double> f) {
  if (static_cast<int>(f.size()) != g.cell_count()) throw InputError("field length does not match grid");
  std::vector<double> out(f.size(), 0.0);
  for (int c = 0; c < g.cell_count(); ++c) {
    for (int a = 0; a < g.dim; ++a) {
      const double h2 = g.spacing(a) * g.spacing(a);
      int m = c, p = c;
      if (!neighbour(g, c, a, -1, m)) m = c;  // reflecting ghost cell
      if (!neighbour(g, c, a, +1, p)) p = c;
      out[c] += (f[p] - 2 * f[c] + f[m]) / h2;
    }
  }
  return out;
}

namespace {

using Complex = std::complex<double>;

// out[.., k, ..] = sum_i M[k][i] data[.., i, ..] along one axis.
void apply_axis(const Grid& g, std::vector<Complex>& data, int axis,
                const std::vector<std::vector<Complex>>& m) {
  const int n = g.cells[axis];
  std::vector<Complex> line(n), res(n);
  for (int c = 0; c < g.cell_count(); ++c) {
    auto idx = g.multi_index(c);
    if (idx[axis] != 0) continue;
    for (int i = 0; i < n; ++i) {
      idx[axis] = i;
      line[i] = data[g.flat_index(idx)];
    }
    for (int k = 0; k < n; ++k) {
      Complex s = 0;
      for (int i = 0; i < n; ++i) s += m[k][i] * line[i];
      res[k] = s;
    }
    for (int k = 0; k < n; ++k) {
      idx[axis] = k;
      data[g.flat_index(idx)] = res[k];
    }
  }
}

struct AxisTransform {
  std::vector<std::vector<Complex>> forward, inverse;
  std::vector<double> symbol;  // eigenvalue of -d^2/dx^2 per mode
};

AxisTransform axis_transform(const Grid& g, int axis, PoissonDiscretization disc) {
  const int n = g.cells[axis];
  const double L = g.extent[axis], h = g.spacing(axis);
  const double pi = std::numbers::pi;
  AxisTransform t;
  t.forward.assign(n, std::vector<Complex>(n));
  t.inverse.assign(n, std::vector<Complex>(n));
  t.symbol.resize(n);
  if (g.topology == Topology::Box) {
    // DCT-II on cell centres: eigenvectors of the reflecting-ghost Laplacian.
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        const double c = std::cos(pi * k * (i + 0.5) / n);
        t.forward[k][i] = c;
        t.inverse[i][k] = (k == 0 ? 1.0 : 2.0) * c / n;
      }
      const double s = std::sin(pi * k / (2.0 * n));
      t.symbol[k] = disc == PoissonDiscretization::Stencil ? 4 * s * s / (h * h)
                                                           : (pi * k / L) * (pi * k / L);
    }
  } else {
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        const double ang = 2 * pi * k * i / n;
        t.forward[k][i] = Complex(std::cos(ang), -std::sin(ang));
        t.inverse[i][k] = Complex(std::cos(ang), std::sin(ang)) / static_cast<double>(n);
      }
      const int kw = k <= n / 2 ? k : k - n;
      const double s = std::sin(pi * k / n);
      t.symbol[k] = disc == PoissonDiscretization::Stencil ? 4 * s * s / (h * h)
                                                           : (2 * pi * kw / L) * (2 * pi * kw / L);
    }
  }
  return t;
}

}  // namespace

std::vector<double> neumann_poisson_solve(const Grid& g, std::span<const double> rho) {
  return neumann_poisson_solve(g, rho,
                               g.topology == Topology::Box ? PoissonDiscretization::Stencil
                                                           : PoissonDiscretization::Spectral);
}

std::vector<double> neumann_poisson_solve(const Grid& g, std::span<const double> rho,
                                          PoissonDiscretization disc) {
  const int nc = g.cell_count();
  if (static_cast<int>(rho.size()) != nc) throw InputError("field length does not match grid");
  const double mean = quad(g, rho) / g.volume();
  std::vector<Complex> data(nc);
  for (int c = 0; c < nc; ++c) data[c] = rho[c] - mean;

  std::vector<AxisTransform> tr;
  for (int a = 0; a < g.dim; ++a) tr.push_back(axis_transform(g, a, disc));
  for (int a = 0; a < g.dim; ++a) apply_axis(g, data, a, tr[a].forward);
  for (int c = 0; c < nc; ++c) {
    const auto idx = g.multi_index(c);
    double sym = 0;
    for (int a = 0; a < g.dim; ++a) sym += tr[a].symbol[idx[a]];
    data[c] = sym > 0 ? data[c] / sym : Complex(0);
  }
  for (int a = 0; a < g.dim; ++a) apply_axis(g, data, a, tr[a].inverse);

  std::vector<double> v(nc);
  for (int c = 0; c < nc; ++c) v[c] = data[c].real();
  const double vmean = quad(g, v) / g.volume();
  for (double& x : v) x -= vmean;
  return v;
}

}  // namespace gensol
