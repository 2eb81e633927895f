#include "gensol/systems.hpp"

#include <cmath>
#include <limits>

namespace gensol {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(const Vec& a, const Vec& b, int d) {
  double s = 0;
  for (int i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

bool vacuum(double rho) { return rho < kVacuum; }

}  // namespace

void validate_state(const SystemSpec& sys, const Grid& g, const State& s) {
  const std::size_t n = g.cell_count();
  if (s.m.size() != n) throw InputError("state field length does not match the grid");
  if (sys.compressible()) {
    if (s.rho.size() != n) throw InputError("density length does not match the grid");
  } else if (!s.rho.empty()) {
    throw InputError("incompressible state carries a density");
  }
  for (std::size_t c = 0; c < n; ++c) {
    for (int i = 0; i < 3; ++i)
      if (!std::isfinite(s.m[c][i])) throw InputError("non-finite momentum/velocity");
    for (int i = g.dim; i < 3; ++i)
      if (s.m[c][i] != 0) throw InputError("vector component beyond the grid dimension");
    if (!sys.compressible()) continue;
    const double r = s.rho[c];
    if (!std::isfinite(r) || r < 0) throw InputError("density must be finite and nonnegative");
    if (vacuum(r) && std::sqrt(dot(s.m[c], s.m[c], g.dim)) >= kVacuum)
      throw InputError("momentum in vacuum cell: infinite flux");
  }
}

void validate_trajectory(const SystemSpec& sys, const Trajectory& tr) {
  sys.validate();
  tr.grid.validate();
  tr.time.validate();
  if (static_cast<int>(tr.states.size()) != tr.time.count())
    throw InputError("number of states does not match the time grid");
  for (const auto& s : tr.states) validate_state(sys, tr.grid, s);
}

double eta(double rho, const Vec& m, double gamma) {
  if (!(rho >= 0)) throw InputError("eta: negative density");
  const double m2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
  if (rho == 0) return m2 == 0 ? 0.0 : kInf;
  return m2 / (2 * rho) + std::pow(rho, gamma) / (gamma - 1);
}

namespace {

double eta_cell(double rho, const Vec& m, double gamma) {
  // Vacuum cells have already been checked for vanishing momentum.
  if (vacuum(rho)) return eta(rho < 0 ? 0 : rho, Vec{0, 0, 0}, gamma);
  return eta(rho, m, gamma);
}

}  // namespace

double energy(const SystemSpec& sys, const Grid& g, const State& s) {
  return slice_fields(sys, g, s).energy;
}

double friction_dissipation(const SystemSpec& sys, const Grid& g, const State& s) {
  return slice_fields(sys, g, s).friction;
}

SliceFields slice_fields(const SystemSpec& sys, const Grid& g, const State& s) {
  validate_state(sys, g, s);
  const int n = g.cell_count(), d = g.dim;
  SliceFields f;
  f.rho = s.rho;
  f.m = s.m;
  f.flux.assign(n, SymMat(d));
  std::vector<double> dens(n, 0.0);

  if (!sys.compressible()) {
    for (int c = 0; c < n; ++c) {
      f.flux[c] = SymMat::outer(s.m[c], d);
      dens[c] = 0.5 * dot(s.m[c], s.m[c], d);
    }
    f.energy = quad(g, dens);
    return f;
  }

  for (int c = 0; c < n; ++c) {
    const double r = s.rho[c];
    SymMat st = std::pow(r, sys.gamma) * SymMat::identity(d);
    if (!vacuum(r)) st += (1.0 / r) * SymMat::outer(s.m[c], d);
    f.flux[c] = st;
    dens[c] = eta_cell(r, s.m[c], sys.gamma);
  }

  if (sys.kind == SystemKind::EulerKorteweg) {
    const auto gr = gradient(g, s.rho);
    f.capillary.assign(n, Vec{0, 0, 0});
    for (int c = 0; c < n; ++c) {
      const double g2 = dot(gr[c], gr[c], d);
      f.flux[c] += SymMat::outer(gr[c], d) + (0.5 * g2) * SymMat::identity(d);
      for (int i = 0; i < d; ++i) f.capillary[c][i] = s.rho[c] * gr[c][i];
      dens[c] += 0.5 * g2;
    }
  }

  if (sys.kind == SystemKind::EulerPoisson) {
    const auto v = neumann_poisson_solve(g, s.rho);
    const auto gv = gradient(g, v);
    const double rho_bar = quad(g, s.rho) / g.volume();
    f.drag.assign(n, Vec{0, 0, 0});
    std::vector<double> fric(n, 0.0);
    for (int c = 0; c < n; ++c) {
      const double g2 = dot(gv[c], gv[c], d);
      f.flux[c] += (0.5 * g2 + rho_bar * v[c]) * SymMat::identity(d) - SymMat::outer(gv[c], d);
      for (int i = 0; i < d; ++i) f.drag[c][i] = -sys.alpha * s.m[c][i];
      dens[c] += 0.5 * g2;
      if (!vacuum(s.rho[c])) fric[c] = sys.alpha * dot(s.m[c], s.m[c], d) / s.rho[c];
    }
    f.friction = quad(g, fric);
  }

  f.energy = quad(g, dens);
  return f;
}

SliceTerms slice_terms(const SystemSpec& sys, const Grid& g, const SliceFields& f, const TestFunction& tf,
                       double t) {
  const int n = g.cell_count(), d = g.dim;
  const bool comp = sys.compressible();
  double ms = 0, mf = 0, ps = 0, pf = 0;
  double a_ms = 0, a_mf = 0, a_ps = 0, a_pf = 0;
  for (int c = 0; c < n; ++c) {
    const Vec x = g.center(c);
    const Vec phi = tf.phi(x, t), phi_t = tf.phi_t(x, t);
    const Mat gp = tf.grad_phi(x, t);
    const double s1 = dot(f.m[c], phi, d);
    double s2 = dot(f.m[c], phi_t, d) + frob(gp, f.flux[c]);
    double a2 = std::abs(dot(f.m[c], phi_t, d)) + std::abs(frob(gp, f.flux[c]));
    if (!f.capillary.empty()) {
      const double k = dot(f.capillary[c], tf.grad_div_phi(x, t), d);
      s2 += k;
      a2 += std::abs(k);
    }
    if (!f.drag.empty()) {
      const double k = dot(f.drag[c], phi, d);
      s2 += k;
      a2 += std::abs(k);
    }
    ps += s1;
    a_ps += std::abs(s1);
    pf += s2;
    a_pf += a2;
    if (comp) {
      const double m1 = f.rho[c] * tf.psi(x, t);
      const double m2a = f.rho[c] * tf.psi_t(x, t), m2b = dot(f.m[c], tf.grad_psi(x, t), d);
      ms += m1;
      a_ms += std::abs(m1);
      mf += m2a + m2b;
      a_mf += std::abs(m2a) + std::abs(m2b);
    }
  }
  const double v = g.cell_volume();
  SliceTerms out{ms * v, mf * v, ps * v, pf * v, 0};
  out.scale = v * std::max({a_ms, a_mf, a_ps, a_pf});
  return out;
}

double trapezoid(std::span<const double> values, double dt, int s, int t) {
  double acc = 0;
  for (int i = s; i < t; ++i) acc += 0.5 * dt * (values[i] + values[i + 1]);
  return acc;
}

namespace {

void check_pair(const Trajectory& tr, int s, int t) {
  if (!(0 <= s && s < t && t < tr.time.count())) throw InputError("invalid sample pair");
}

}  // namespace

double mass_residual(const SystemSpec& sys, const Trajectory& tr, const TestFunction& tf, int s, int t) {
  if (!sys.compressible()) throw InputError("incompressible system has no mass equation");
  check_pair(tr, s, t);
  std::vector<double> flux;
  double ss = 0, st = 0;
  for (int i = s; i <= t; ++i) {
    const auto terms = slice_terms(sys, tr.grid, slice_fields(sys, tr.grid, tr.states[i]), tf, tr.time.at(i));
    flux.push_back(terms.mass_flux);
    if (i == s) ss = terms.mass_state;
    if (i == t) st = terms.mass_state;
  }
  return -(st - ss) + trapezoid(flux, tr.time.dt(), 0, t - s);
}

double momentum_residual(const SystemSpec& sys, const Trajectory& tr, const TestFunction& tf, int s, int t) {
  check_pair(tr, s, t);
  std::vector<double> flux;
  double ss = 0, st = 0;
  for (int i = s; i <= t; ++i) {
    const auto terms = slice_terms(sys, tr.grid, slice_fields(sys, tr.grid, tr.states[i]), tf, tr.time.at(i));
    flux.push_back(terms.mom_flux);
    if (i == s) ss = terms.mom_state;
    if (i == t) st = terms.mom_state;
  }
  return -(st - ss) + trapezoid(flux, tr.time.dt(), 0, t - s);
}

double regweight_from_gradients(const SystemSpec& sys, std::span<const Mat> grads, bool finer) {
  double neg = 0, pos = 0, full = 0, div_neg = 0;
  int d = 0;
  for (const Mat& gm : grads) {
    d = gm.dim;
    const EigenDecomp e = eigen(SymMat::sym_part(gm));
    const double lmax = e.values[0], lmin = e.values[d - 1];
    neg = std::max(neg, -lmin);
    pos = std::max(pos, lmax);
    full = std::max({full, std::abs(lmax), std::abs(lmin)});
    double div = 0;
    for (int i = 0; i < d; ++i) div += gm(i, i);
    div_neg = std::max(div_neg, -div);
  }
  const double g1 = sys.gamma - 1;
  switch (sys.kind) {
    case SystemKind::IncompressibleEuler: return 2 * neg;
    case SystemKind::IsentropicEuler: return std::max(2 * neg, g1 * div_neg);
    case SystemKind::EulerKorteweg: return std::max(2 * neg + div_neg, g1 * div_neg);
    case SystemKind::EulerPoisson:
      if (finer) return std::max({2 * neg, 2 * pos + div_neg, g1 * div_neg});
      return std::max((2.0 + d) * full, g1 * div_neg);
  }
  return 0;
}

double regweight(const SystemSpec& sys, const Grid& g, const TestFunction& tf, double t, bool finer) {
  if (tf.is_zero()) return 0;
  std::vector<Mat> grads;
  grads.reserve(g.cell_count());
  for (int c = 0; c < g.cell_count(); ++c) grads.push_back(tf.grad_phi(g.center(c), t));
  for (const Vec& x : g.vertices()) grads.push_back(tf.grad_phi(x, t));
  return regweight_from_gradients(sys, grads, finer);
}

}  // namespace gensol
