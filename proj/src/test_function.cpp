#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gensol/domain.hpp"

namespace gensol {

namespace {

// d^n/dx^n cos(kx + phase).
double trig_deriv(double k, double phase, double x, int n) {
  const double arg = k * x + phase;
  const double kn = std::pow(k, n);
  switch (n % 4) {
    case 0: return kn * std::cos(arg);
    case 1: return -kn * std::sin(arg);
    case 2: return -kn * std::cos(arg);
    default: return kn * std::sin(arg);
  }
}

double binom(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double Factor1D::eval(double x, int order) const {
  switch (kind) {
    case Kind::Const: return order == 0 ? 1.0 : 0.0;
    case Kind::Trig: return trig_deriv(k, phase, x, order);
    case Kind::BubbleCos: {
      const double s = x / L;
      const double p[3] = {s * (1 - s), (1 - 2 * s) / L, -2 / (L * L)};
      double v = 0;
      for (int j = 0; j <= std::min(order, 2); ++j)
        v += binom(order, j) * p[j] * trig_deriv(k, 0.0, x, order - j);
      return v;
    }
  }
  return 0;
}

double ProductTerm::eval(const Vec& x, int dim, const std::array<int, 3>& extra) const {
  double v = amp;
  for (int a = 0; a < dim; ++a) v *= f[a].eval(x[a], order[a] + extra[a]);
  return v;
}

double TimeFactor::value(double t) const { return c0 + c1 * std::cos(omega * t); }
double TimeFactor::deriv(double t) const { return -c1 * omega * std::sin(omega * t); }

namespace {

std::array<int, 3> unit_order(int a) {
  std::array<int, 3> e{0, 0, 0};
  e[a] = 1;
  return e;
}

std::array<int, 3> pair_order(int a, int b) {
  std::array<int, 3> e{0, 0, 0};
  e[a] += 1;
  e[b] += 1;
  return e;
}

}  // namespace

double TestFunction::psi(const Vec& x, double t) const {
  double s = 0;
  for (const auto& p : psi_) {
    double v = 0;
    for (const auto& term : p.terms) v += term.eval(x, dim_);
    s += p.time.value(t) * v;
  }
  return s;
}

double TestFunction::psi_t(const Vec& x, double t) const {
  double s = 0;
  for (const auto& p : psi_) {
    if (p.time.constant()) continue;
    double v = 0;
    for (const auto& term : p.terms) v += term.eval(x, dim_);
    s += p.time.deriv(t) * v;
  }
  return s;
}

Vec TestFunction::grad_psi(const Vec& x, double t) const {
  Vec g{0, 0, 0};
  for (const auto& p : psi_) {
    const double tv = p.time.value(t);
    for (const auto& term : p.terms)
      for (int a = 0; a < dim_; ++a) g[a] += tv * term.eval(x, dim_, unit_order(a));
  }
  return g;
}

Vec TestFunction::phi(const Vec& x, double t) const {
  Vec v{0, 0, 0};
  for (const auto& p : phi_) {
    const double tv = p.time.value(t);
    for (const auto& term : p.terms) v[term.component] += tv * term.eval(x, dim_);
  }
  return v;
}

Vec TestFunction::phi_t(const Vec& x, double t) const {
  Vec v{0, 0, 0};
  for (const auto& p : phi_) {
    if (p.time.constant()) continue;
    const double td = p.time.deriv(t);
    for (const auto& term : p.terms) v[term.component] += td * term.eval(x, dim_);
  }
  return v;
}

Mat TestFunction::grad_phi(const Vec& x, double t) const {
  Mat m(dim_);
  for (const auto& p : phi_) {
    const double tv = p.time.value(t);
    for (const auto& term : p.terms)
      for (int j = 0; j < dim_; ++j) m(term.component, j) += tv * term.eval(x, dim_, unit_order(j));
  }
  return m;
}

double TestFunction::div_phi(const Vec& x, double t) const {
  double s = 0;
  for (const auto& p : phi_) {
    const double tv = p.time.value(t);
    for (const auto& term : p.terms) s += tv * term.eval(x, dim_, unit_order(term.component));
  }
  return s;
}

Vec TestFunction::grad_div_phi(const Vec& x, double t) const {
  Vec g{0, 0, 0};
  for (const auto& p : phi_) {
    const double tv = p.time.value(t);
    for (const auto& term : p.terms)
      for (int k = 0; k < dim_; ++k) g[k] += tv * term.eval(x, dim_, pair_order(term.component, k));
  }
  return g;
}

bool TestFunction::is_zero() const {
  auto zero = [](const std::vector<Piece>& ps) {
    return std::all_of(ps.begin(), ps.end(), [](const Piece& p) {
      return std::all_of(p.terms.begin(), p.terms.end(), [](const ProductTerm& t) { return t.amp == 0; });
    });
  };
  return zero(psi_) && zero(phi_);
}

bool TestFunction::time_dependent() const {
  auto dep = [](const std::vector<Piece>& ps) {
    return std::any_of(ps.begin(), ps.end(), [](const Piece& p) { return !p.time.constant(); });
  };
  return dep(psi_) || dep(phi_);
}

TestFunction TestFunction::scaled(double a) const {
  TestFunction out = *this;
  for (auto* ps : {&out.psi_, &out.phi_})
    for (auto& p : *ps)
      for (auto& t : p.terms) t.amp *= a;
  return out;
}

TestFunction TestFunction::combine(double a, const TestFunction& f, double b, const TestFunction& g) {
  if (f.dim_ != g.dim_) throw InputError("test function dimension mismatch");
  TestFunction out(f.id_ + "+" + g.id_, f.dim_);
  const TestFunction fa = f.scaled(a), gb = g.scaled(b);
  out.psi_ = fa.psi_;
  out.psi_.insert(out.psi_.end(), gb.psi_.begin(), gb.psi_.end());
  out.phi_ = fa.phi_;
  out.phi_.insert(out.phi_.end(), gb.phi_.begin(), gb.phi_.end());
  return out;
}

std::vector<TestFunction> TestFunction::spatial_phi_parts() const {
  std::vector<TestFunction> out;
  for (std::size_t k = 0; k < phi_.size(); ++k) {
    TestFunction f(id_ + "/phi" + std::to_string(k), dim_);
    Piece p = phi_[k];
    p.time = TimeFactor{};
    f.phi_.push_back(std::move(p));
    out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Batteries

namespace {

constexpr double kPi = std::numbers::pi;

// Small integer mode tuples ordered by total frequency, then lexicographically.
std::vector<std::array<int, 3>> mode_list(int dim, bool include_zero) {
  std::vector<std::array<int, 3>> modes;
  const int top = 3;
  for (int i = 0; i <= top; ++i)
    for (int j = 0; j <= (dim > 1 ? top : 0); ++j)
      for (int k = 0; k <= (dim > 2 ? top : 0); ++k) {
        if (!include_zero && i + j + k == 0) continue;
        modes.push_back({i, j, k});
      }
  std::stable_sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) {
    return a[0] + a[1] + a[2] < b[0] + b[1] + b[2];
  });
  return modes;
}

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  double amp() { return (uniform(0, 1) < 0.5 ? -1.0 : 1.0) * uniform(0.5, 1.0); }
};

Factor1D trig(double L, int n, double phase, bool torus) {
  if (n == 0) return Factor1D{};
  const double k = (torus ? 2 * kPi : kPi) * n / L;
  return Factor1D{Factor1D::Kind::Trig, k, phase, L};
}

Factor1D bubble(double L, int n) { return Factor1D{Factor1D::Kind::BubbleCos, kPi * n / L, 0.0, L}; }

TimeFactor time_factor(int member, Rng& rng) {
  if (member % 2 == 1) return TimeFactor{};
  return TimeFactor{1.0, rng.uniform(0.3, 0.7), kPi};
}

// Stream-function scalar chi as a product term with the given factors.
ProductTerm chi_term(const Grid& g, const std::array<int, 3>& mode, Rng& rng, double amp) {
  ProductTerm t;
  t.amp = amp;
  const bool torus = g.topology == Topology::Torus;
  for (int a = 0; a < g.dim; ++a)
    t.f[a] = torus ? trig(g.extent[a], mode[a], rng.uniform(0, 2 * kPi), true) : bubble(g.extent[a], mode[a]);
  return t;
}

// phi = curl(chi e_axis) in 3d, or the rotated gradient (-d_y chi, d_x chi) in 2d.
std::vector<ProductTerm> curl_terms(const ProductTerm& chi, int dim, int axis) {
  std::vector<ProductTerm> out;
  if (dim == 2) {
    ProductTerm t0 = chi, t1 = chi;
    t0.component = 0;
    t0.amp = -chi.amp;
    t0.order = {0, 1, 0};
    t1.component = 1;
    t1.order = {1, 0, 0};
    return {t0, t1};
  }
  // (curl(chi e_a))_i = eps_{i j a} d_j chi.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j || i == axis || j == axis) continue;
      const int eps = ((i + 1) % 3 == j) ? 1 : -1;  // eps_{i j a} with a the third index
      ProductTerm t = chi;
      t.component = i;
      t.amp = eps * chi.amp;
      t.order = unit_order(j);
      out.push_back(t);
    }
  }
  return out;
}

TestFunction incompressible_member(const Grid& g, int member, const std::array<int, 3>& mode, Rng& rng) {
  TestFunction f("phi" + std::to_string(member), g.dim);
  Piece p;
  p.time = time_factor(member, rng);
  const double a = rng.amp();
  if (g.dim == 1) {
    if (g.topology == Topology::Torus) {
      ProductTerm t;
      t.amp = a;
      p.terms.push_back(t);
    }
  } else {
    int fmax = 1;
    for (int k = 0; k < g.dim; ++k) fmax = std::max(fmax, mode[k]);
    const double scale = g.topology == Topology::Torus ? 1.0 / (2 * kPi * fmax) : 4.0;
    const ProductTerm chi = chi_term(g, mode, rng, a * scale);
    p.terms = curl_terms(chi, g.dim, member % 3);
  }
  f.phi_pieces().push_back(std::move(p));
  return f;
}

TestFunction compressible_member(const Grid& g, int member, const std::array<int, 3>& mode,
                                 const std::array<int, 3>& psi_mode, Rng& rng) {
  TestFunction f("phi" + std::to_string(member), g.dim);
  const bool torus = g.topology == Topology::Torus;
  Piece phi;
  phi.time = time_factor(member, rng);
  for (int i = 0; i < g.dim; ++i) {
    ProductTerm t;
    t.component = i;
    t.amp = rng.amp() * (torus ? 1.0 : 4.0);
    for (int a = 0; a < g.dim; ++a) {
      const int n = mode[(a + i) % g.dim];
      if (a == i && !torus)
        t.f[a] = bubble(g.extent[a], n);
      else
        t.f[a] = trig(g.extent[a], n, rng.uniform(0, 2 * kPi), torus);
    }
    phi.terms.push_back(t);
  }
  f.phi_pieces().push_back(std::move(phi));

  Piece psi;
  psi.time = member % 4 == 0 ? TimeFactor{1.0, rng.uniform(0.3, 0.7), kPi} : TimeFactor{};
  ProductTerm t;
  t.amp = rng.amp();
  for (int a = 0; a < g.dim; ++a) t.f[a] = trig(g.extent[a], psi_mode[a], rng.uniform(0, 2 * kPi), torus);
  psi.terms.push_back(t);
  f.psi_pieces().push_back(std::move(psi));
  return f;
}

}  // namespace

std::vector<TestFunction> battery(const SystemSpec& system, const Grid& g, int size, std::uint64_t seed) {
  if (size < 1) throw InputError("battery size must be at least 1");
  g.validate();
  std::vector<TestFunction> out;
  out.emplace_back("phi0", g.dim);
  Rng rng(seed);
  const bool torus = g.topology == Topology::Torus;
  const auto modes = mode_list(g.dim, !torus || system.compressible());
  for (int m = 1; m < size; ++m) {
    const auto& mode = modes[(m - 1) % modes.size()];
    if (system.compressible()) {
      const auto& psi_mode = modes[m % modes.size()];
      out.push_back(compressible_member(g, m, mode, psi_mode, rng));
    } else {
      out.push_back(incompressible_member(g, m, mode, rng));
    }
  }
  return out;
}

std::vector<TestFunction> scalar_battery(const Grid& g, int size, std::uint64_t seed) {
  std::vector<TestFunction> out;
  Rng rng(seed);
  const bool torus = g.topology == Topology::Torus;
  const auto modes = mode_list(g.dim, false);
  for (int m = 0; m < size; ++m) {
    TestFunction f("psi" + std::to_string(m), g.dim);
    Piece p;
    ProductTerm t;
    t.amp = rng.amp();
    for (int a = 0; a < g.dim; ++a)
      t.f[a] = trig(g.extent[a], modes[m % modes.size()][a], rng.uniform(0, 2 * kPi), torus);
    p.terms.push_back(t);
    f.psi_pieces().push_back(std::move(p));
    out.push_back(std::move(f));
  }
  return out;
}

double admissibility_violation(const SystemSpec& system, const Grid& g, const TestFunction& f,
                               int points, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0;
  for (int k = 0; k < points; ++k) {
    Vec x{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) x[a] = rng.uniform(0, g.extent[a]);
    const double t = rng.uniform(0, 1);
    if (!system.compressible()) worst = std::max(worst, std::abs(f.div_phi(x, t)));
    if (g.topology == Topology::Box) {
      const int a = static_cast<int>(rng.uniform(0, g.dim)) % g.dim;
      x[a] = rng.uniform(0, 1) < 0.5 ? 0.0 : g.extent[a];
      worst = std::max(worst, std::abs(f.phi(x, t)[a]));
    }
  }
  return worst;
}

}  // namespace gensol
