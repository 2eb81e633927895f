#pragma once

// Uniform grids on boxes and tori, midpoint quadrature, discrete derivatives,
// closed-form test functions and the Neumann-Laplacian inverse.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gensol/symcone.hpp"
#include "gensol/system_spec.hpp"

namespace gensol {

enum class Topology { Box, Torus };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

/// Axis-aligned box [0, L_1] x ... x [0, L_d] (or the flat torus of the same
/// size) with n_a cells along axis a. Cells are indexed with axis 0 fastest.
struct Grid {
  int dim = 2;
  Topology topology = Topology::Torus;
  Vec extent{1, 1, 1};
  std::array<int, 3> cells{1, 1, 1};

  Grid() = default;
  Grid(int dim, Topology topology, Vec extent, std::array<int, 3> cells);
  /// Unit box or torus with n cells per axis.
  static Grid unit(int dim, Topology topology, int n);

  void validate() const;
  int cell_count() const;
  double spacing(int axis) const { return extent[axis] / cells[axis]; }
  /// Largest cell width.
  double h() const;
  double cell_volume() const;
  double volume() const;
  double diameter() const;
  std::array<int, 3> multi_index(int cell) const;
  int flat_index(const std::array<int, 3>& idx) const;
  Vec center(int cell) const;
  /// Point lies in the closed domain (within 1e-12 relative).
  bool contains(const Vec& x) const;
  /// Cell containing x (boundary points go to the adjacent cell).
  int locate(const Vec& x) const;
  /// True for cells touching the boundary (always false on a torus).
  bool is_boundary_cell(int cell) const;
  /// All grid vertices, including those on the boundary.
  std::vector<Vec> vertices() const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Uniform sample times 0 = t_0 < ... < t_N = T.
struct TimeGrid {
  double T = 1.0;
  int steps = 2;

  void validate() const;
  int count() const { return steps + 1; }
  double dt() const { return T / steps; }
  double at(int i) const { return T * i / steps; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Midpoint rule sum_i f_i vol.
double quad(const Grid& g, std::span<const double> f);

/// Second-order gradient: centered differences (periodic on a torus), one-sided
/// three-point stencils at box boundaries. Needs at least three cells per axis.
std::vector<Vec> gradient(const Grid& g, std::span<const double> f);

/// Five-point (2d+1-point) Laplacian with reflecting ghost cells on a box,
/// periodic wrap on a torus.
std::vector<double> laplacian(const Grid& g, std::span<const double> f);

enum class PoissonDiscretization {
  Stencil,   // inverts the discrete Laplacian exactly (discrete eigenvalues)
  Spectral,  // continuous symbol on the cosine/Fourier modes
};

/// V with -Delta V = rho - mean(rho), zero mean, Neumann (box) or periodic
/// (torus) conditions. Default discretization: Stencil on a box, Spectral on
/// a torus.
std::vector<double> neumann_poisson_solve(const Grid& g, std::span<const double> rho);
std::vector<double> neumann_poisson_solve(const Grid& g, std::span<const double> rho,
                                          PoissonDiscretization disc);

// ---------------------------------------------------------------------------
// Closed-form test functions

/// One-dimensional factor with analytic derivatives of any order.
struct Factor1D {
  enum class Kind { Const, Trig, BubbleCos };
  Kind kind = Kind::Const;
  double k = 0;      // angular wave number
  double phase = 0;  // Trig only
  double L = 1;      // interval length (BubbleCos only)

  /// d^order/dx^order of the factor. Trig is cos(kx + phase), BubbleCos is
  /// (x/L)(1 - x/L) cos(kx), which vanishes exactly at both ends.
  double eval(double x, int order) const;
};

/// amp * prod_a f_a^{(order_a)}(x_a), contributing to vector component `component`.
struct ProductTerm {
  int component = 0;
  double amp = 0;
  std::array<Factor1D, 3> f{};
  std::array<int, 3> order{};

  double eval(const Vec& x, int dim, const std::array<int, 3>& extra = {}) const;
};

/// c0 + c1 cos(omega t).
struct TimeFactor {
  double c0 = 1, c1 = 0, omega = 0;
  double value(double t) const;
  double deriv(double t) const;
  bool constant() const { return c1 == 0 || omega == 0; }
};

/// A time factor times a sum of product terms.
struct Piece {
  TimeFactor time;
  std::vector<ProductTerm> terms;
};

/// Space-time test pair (psi, phi) in closed form.
class TestFunction {
 public:
  TestFunction() = default;
  TestFunction(std::string id, int dim) : id_(std::move(id)), dim_(dim) {}

  const std::string& id() const { return id_; }
  int dim() const { return dim_; }
  std::vector<Piece>& psi_pieces() { return psi_; }
  std::vector<Piece>& phi_pieces() { return phi_; }
  const std::vector<Piece>& psi_pieces() const { return psi_; }
  const std::vector<Piece>& phi_pieces() const { return phi_; }

  double psi(const Vec& x, double t) const;
  double psi_t(const Vec& x, double t) const;
  Vec grad_psi(const Vec& x, double t) const;

  Vec phi(const Vec& x, double t) const;
  Vec phi_t(const Vec& x, double t) const;
  /// (i, j) entry is d phi_i / d x_j.
  Mat grad_phi(const Vec& x, double t) const;
  double div_phi(const Vec& x, double t) const;
  Vec grad_div_phi(const Vec& x, double t) const;

  bool is_zero() const;
  bool time_dependent() const;

  TestFunction scaled(double a) const;
  /// Pointwise sum a*f + b*g.
  static TestFunction combine(double a, const TestFunction& f, double b, const TestFunction& g);
  /// One time-independent function per phi piece (psi dropped); used where
  /// defects are determined slab by slab.
  std::vector<TestFunction> spatial_phi_parts() const;

 private:
  std::string id_;
  int dim_ = 2;
  std::vector<Piece> psi_;
  std::vector<Piece> phi_;
};

/// Deterministic battery of admissible test functions for the system on the
/// grid's domain. Member 0 is the zero function; members alternate between
/// time-independent and time-dependent ones.
std::vector<TestFunction> battery(const SystemSpec& system, const Grid& g, int size,
                                  std::uint64_t seed);

/// Scalar test functions (psi only, time independent) for weak divergence checks.
std::vector<TestFunction> scalar_battery(const Grid& g, int size, std::uint64_t seed);

/// Maximal admissibility violation over `points` random points in the domain:
/// |div phi| for divergence-free batteries and |phi . n| on sampled boundary points.
double admissibility_violation(const SystemSpec& system, const Grid& g, const TestFunction& f,
                               int points, std::uint64_t seed);

}  // namespace gensol
