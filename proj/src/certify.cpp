#include "gensol/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gensol/parallel.hpp"

namespace gensol {

// ---------------------------------------------------------------------------
// Certificate validation

void EnVarCert::validate() const {
  validate_trajectory(system, traj);
  if (static_cast<int>(E.size()) != traj.time.count()) throw InputError("E length does not match the time grid");
  for (double e : E)
    if (!std::isfinite(e)) throw InputError("E must be finite");
  for (const auto& s : traj.states)
    if (!std::isfinite(energy(system, traj.grid, s))) throw InputError("state with infinite energy");
}

void DissWeakCert::validate() const {
  base.validate();
  const int n = base.traj.time.count();
  if (static_cast<int>(r1.size()) != n) throw InputError("r1 length does not match the time grid");
  for (const auto& m : r1) {
    if (m.kind() != WeightKind::Matrix || !(m.grid() == base.traj.grid)) throw InputError("r1 must be a matrix measure on the grid");
    m.validate();
  }
  if (!base.system.compressible()) {
    if (!r2.empty()) throw InputError("incompressible certificate carries r2");
    return;
  }
  if (static_cast<int>(r2.size()) != n) throw InputError("r2 length does not match the time grid");
  for (const auto& m : r2) {
    if (m.kind() != WeightKind::Scalar || !(m.grid() == base.traj.grid)) throw InputError("r2 must be a scalar measure on the grid");
    m.validate();
  }
}

namespace {

void validate_sphere(const SphereMeasure& nu, int dim) {
  if (nu.empty()) throw InputError("empty sphere measure");
  for (const auto& a : nu) {
    if (!std::isfinite(a.w)) throw InputError("non-finite sphere weight");
    for (int i = 0; i < 3; ++i)
      if (!std::isfinite(a.theta[i]) || (i >= dim && a.theta[i] != 0)) throw InputError("malformed sphere direction");
  }
}

}  // namespace

void MVCert::validate() const {
  if (system.kind != SystemKind::IncompressibleEuler) throw InputError("measure-valued certificates are incompressible only");
  grid.validate();
  time.validate();
  if (static_cast<int>(slices.size()) != time.count()) throw InputError("slice count does not match the time grid");
  const std::size_t n = grid.cell_count();
  for (const auto& s : slices) {
    if (s.v.size() != n || s.cov.size() != n) throw InputError("mean/covariance length does not match the grid");
    validate_state(system, grid, State{{}, s.v});
    for (const auto& c : s.cov)
      if (c.dim() != grid.dim || !c.finite()) throw InputError("malformed covariance");
    if (s.lambda.kind() != WeightKind::Scalar || !(s.lambda.grid() == grid)) throw InputError("lambda must be a scalar measure on the grid");
    s.lambda.validate();
    if (!s.angle_cells.empty() && s.angle_cells.size() != n) throw InputError("angle_cells length does not match the grid");
    for (std::size_t c = 0; c < n; ++c) {
      const bool charged = s.lambda.density(static_cast<int>(c)) != 0;
      if (charged && s.angle_cells.empty()) throw InputError("lambda density without a sphere measure");
      if (!s.angle_cells.empty() && charged) validate_sphere(s.angle_cells[c], grid.dim);
    }
    if (s.angle_atoms.size() != s.lambda.atoms().size()) throw InputError("one sphere measure per lambda atom required");
    for (const auto& nu : s.angle_atoms) validate_sphere(nu, grid.dim);
  }
}

SymMat second_moment(const SphereMeasure& nu, int dim) {
  SymMat m(dim);
  for (const auto& a : nu) m += a.w * SymMat::outer(a.theta, dim);
  return m;
}

DiscMeasure concentration_tensor(const Grid& g, const MVSlice& s) {
  DiscMeasure out(g, WeightKind::Matrix);
  for (int c = 0; c < g.cell_count(); ++c) {
    const double l = s.lambda.density(c);
    if (l != 0) out.set_density(c, l * second_moment(s.angle_cells[c], g.dim));
  }
  for (std::size_t a = 0; a < s.lambda.atoms().size(); ++a) {
    const auto& at = s.lambda.atoms()[a];
    out.add_atom(at.x, at.w(0, 0) * second_moment(s.angle_atoms[a], g.dim));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tolerances and reports

Tolerance Tolerance::for_grid(const Grid& g, const TimeGrid& t, double c_tol) {
  Tolerance tol;
  tol.c_tol = c_tol;
  tol.h = g.h();
  tol.dt = t.dt();
  return tol;
}

void Report::add(CheckRecord r) {
  ++checks_;
  if (!r.pass) {
    ++failures_;
    if (failing_.size() < kFailCap) failing_.push_back(r);
  }
  const auto key = std::make_pair(r.clause, r.test_id);
  const auto it = index_.find(key);
  if (it == index_.end()) {
    index_.emplace(key, worst_.size());
    worst_.push_back(std::move(r));
    return;
  }
  CheckRecord& w = worst_[it->second];
  // A failing record always displaces a passing one.
  if ((!r.pass && w.pass) || (r.pass == w.pass && r.value - r.tol > w.value - w.tol)) w = std::move(r);
}

void Report::merge(const Report& other) {
  for (const auto& r : other.worst_) {
    const auto key = std::make_pair(r.clause, r.test_id);
    const auto it = index_.find(key);
    if (it == index_.end()) {
      index_.emplace(key, worst_.size());
      worst_.push_back(r);
    } else if ((!r.pass && worst_[it->second].pass) ||
               (r.pass == worst_[it->second].pass && r.value - r.tol > worst_[it->second].value - worst_[it->second].tol)) {
      worst_[it->second] = r;
    }
  }
  for (const auto& r : other.failing_)
    if (failing_.size() < kFailCap) failing_.push_back(r);
  checks_ += other.checks_;
  failures_ += other.failures_;
}

double Report::max_value(const std::string& clause) const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& r : worst_)
    if (r.clause == clause) m = std::max(m, r.value);
  return m;
}

bool Report::clause_failed(const std::string& clause) const {
  for (const auto& r : worst_)
    if (r.clause == clause && !r.pass) return true;
  return false;
}

std::vector<std::string> Report::clauses() const {
  std::vector<std::string> out;
  for (const auto& r : worst_)
    if (std::find(out.begin(), out.end(), r.clause) == out.end()) out.push_back(r.clause);
  return out;
}

VerifyOptions VerifyOptions::standard(const SystemSpec& sys, const Grid& g, const TimeGrid& t, int battery_size,
                                      std::uint64_t seed, double c_tol) {
  VerifyOptions o;
  o.battery = gensol::battery(sys, g, battery_size, seed);
  if (!sys.compressible()) o.scalar_battery = gensol::scalar_battery(g, std::max(2, battery_size / 2), seed + 1);
  o.tol = Tolerance::for_grid(g, t, c_tol);
  return o;
}

double defect_budget(const SystemSpec& sys, const DiscMeasure& r1, const DiscMeasure* r2) {
  double b = sys.kind == SystemKind::EulerKorteweg ? total_variation(r1, MatNormKind::MMax)
                                                    : 0.5 * total_variation(r1, MatNormKind::Trace);
  if (r2 && sys.compressible()) b += total_variation(*r2) / (sys.gamma - 1);
  return b;
}

// ---------------------------------------------------------------------------
// Shared machinery: per test function, the per-sample integrals.

namespace {

struct Series {
  std::vector<double> mass_state, mass_flux, mom_state, mom_flux, defect, kterm, scale;
  std::vector<double> kterm_neg;  // the weight term for -phi
};

struct Context {
  const SystemSpec& sys;
  const Trajectory& traj;
  std::vector<SliceFields> fields;
  std::vector<double> energies;
};

Context make_context(const SystemSpec& sys, const Trajectory& traj) {
  Context c{sys, traj, {}, {}};
  c.fields.resize(traj.states.size());
  parallel_for(static_cast<int>(traj.states.size()),
               [&](int i) { c.fields[i] = slice_fields(sys, traj.grid, traj.states[i]); });
  for (const auto& f : c.fields) c.energies.push_back(f.energy);
  return c;
}

double defect_pairing(const Grid& g, const TestFunction& tf, double t, const DiscMeasure* r1, const DiscMeasure* r2) {
  double s = 0;
  if (r1) {
    std::vector<SymMat> cells(g.cell_count());
    for (int c = 0; c < g.cell_count(); ++c) cells[c] = SymMat::sym_part(tf.grad_phi(g.center(c), t));
    s += pair(*r1, cells, [&](const Vec& x) { return SymMat::sym_part(tf.grad_phi(x, t)); });
  }
  if (r2) {
    std::vector<double> cells(g.cell_count());
    for (int c = 0; c < g.cell_count(); ++c) cells[c] = tf.div_phi(g.center(c), t);
    s += pair(*r2, cells, [&](const Vec& x) { return tf.div_phi(x, t); });
  }
  return s;
}

// E == nullptr skips the regularity-weight term; r1/r2 == nullptr skip defects.
Series make_series(const Context& ctx, const TestFunction& tf, const std::vector<double>* E,
                   const std::vector<DiscMeasure>* r1, const std::vector<DiscMeasure>* r2, bool finer) {
  const int n = ctx.traj.time.count();
  Series s;
  for (auto* v : {&s.mass_state, &s.mass_flux, &s.mom_state, &s.mom_flux, &s.defect, &s.kterm, &s.scale, &s.kterm_neg})
    v->assign(n, 0.0);
  const TestFunction neg = E ? tf.scaled(-1) : TestFunction("-", tf.dim());
  for (int i = 0; i < n; ++i) {
    const double t = ctx.traj.time.at(i);
    const SliceTerms st = slice_terms(ctx.sys, ctx.traj.grid, ctx.fields[i], tf, t);
    s.mass_state[i] = st.mass_state;
    s.mass_flux[i] = st.mass_flux;
    s.mom_state[i] = st.mom_state;
    s.mom_flux[i] = st.mom_flux;
    s.scale[i] = st.scale;
    if (E) {
      s.kterm[i] = regweight(ctx.sys, ctx.traj.grid, tf, t, finer) * (ctx.energies[i] - (*E)[i]);
      s.kterm_neg[i] = regweight(ctx.sys, ctx.traj.grid, neg, t, finer) * (ctx.energies[i] - (*E)[i]);
      s.scale[i] = std::max({s.scale[i], std::abs(s.kterm[i]), std::abs(s.kterm_neg[i])});
    }
    if (r1) {
      s.defect[i] = defect_pairing(ctx.traj.grid, tf, t, &(*r1)[i], r2 && !r2->empty() ? &(*r2)[i] : nullptr);
      s.scale[i] = std::max(s.scale[i], std::abs(s.defect[i]));
    }
  }
  return s;
}

std::vector<double> prefix_trapezoid(const std::vector<double>& f, double dt) {
  std::vector<double> p(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i) p[i] = p[i - 1] + 0.5 * dt * (f[i - 1] + f[i]);
  return p;
}

std::vector<Series> all_series(const Context& ctx, const std::vector<TestFunction>& bat,
                               const std::vector<double>* E, const std::vector<DiscMeasure>* r1,
                               const std::vector<DiscMeasure>* r2, bool finer) {
  std::vector<Series> out(bat.size());
  parallel_for(static_cast<int>(bat.size()), [&](int k) { out[k] = make_series(ctx, bat[k], E, r1, r2, finer); });
  return out;
}

void check_domination(Report& rep, const std::vector<double>& energies, const std::vector<double>& E) {
  for (std::size_t i = 0; i < E.size(); ++i) {
    const double v = energies[i] - E[i];
    rep.add({"energy-domination", "-", static_cast<int>(i), static_cast<int>(i), v, kDataTol, v <= kDataTol});
  }
}

void check_divergence(Report& rep, const Grid& g, const std::vector<std::vector<Vec>>& vel,
                      const std::vector<TestFunction>& scalars, const Tolerance& tol) {
  for (const auto& psi : scalars) {
    for (std::size_t i = 0; i < vel.size(); ++i) {
      double s = 0, a = 0;
      for (int c = 0; c < g.cell_count(); ++c) {
        const Vec gp = psi.grad_psi(g.center(c), 0.0);
        double d = 0;
        for (int k = 0; k < g.dim; ++k) d += vel[i][c][k] * gp[k];
        s += d;
        a += std::abs(d);
      }
      const double v = std::abs(s) * g.cell_volume();
      const double t = tol.of(a * g.cell_volume());
      rep.add({"divergence-free", psi.id(), static_cast<int>(i), static_cast<int>(i), v, t, v <= t});
    }
  }
}

// Weak momentum (+ defect) equality and, for compressible systems, the mass
// equation, over all sample pairs.
void check_equations(Report& rep, const Context& ctx, const std::vector<TestFunction>& bat,
                     const std::vector<Series>& series, const Tolerance& tol, const std::string& mom_clause) {
  const double dt = ctx.traj.time.dt();
  const int n = ctx.traj.time.count();
  for (std::size_t k = 0; k < bat.size(); ++k) {
    const Series& s = series[k];
    std::vector<double> mom = s.mom_flux;
    for (int i = 0; i < n; ++i) mom[i] += s.defect[i];
    const auto pm = prefix_trapezoid(mom, dt);
    const auto pmass = prefix_trapezoid(s.mass_flux, dt);
    for (int a = 0; a < n; ++a) {
      double sc = 0;
      for (int b = a + 1; b < n; ++b) {
        sc = std::max({sc, s.scale[a], s.scale[b]});
        const double r = std::abs(-(s.mom_state[b] - s.mom_state[a]) + pm[b] - pm[a]);
        const double t = tol.of(sc);
        rep.add({mom_clause, bat[k].id(), a, b, r, t, r <= t});
        if (ctx.sys.compressible()) {
          const double q = std::abs(-(s.mass_state[b] - s.mass_state[a]) + pmass[b] - pmass[a]);
          rep.add({"mass", bat[k].id(), a, b, q, t, q <= t});
        }
      }
    }
  }
}

std::vector<double> frictions(const Context& ctx) {
  std::vector<double> f;
  for (const auto& s : ctx.fields) f.push_back(s.friction);
  return f;
}

}  // namespace

// ---------------------------------------------------------------------------

Report verify_envar(const EnVarCert& cert, const VerifyOptions& opt) {
  cert.validate();
  const Context ctx = make_context(cert.system, cert.traj);
  Report rep;
  check_domination(rep, ctx.energies, cert.E);
  if (!cert.system.compressible()) {
    std::vector<std::vector<Vec>> vel;
    for (const auto& s : cert.traj.states) vel.push_back(s.m);
    check_divergence(rep, cert.traj.grid, vel, opt.scalar_battery, opt.tol);
  }

  const auto series = all_series(ctx, opt.battery, &cert.E, nullptr, nullptr, opt.finer);
  const double dt = cert.traj.time.dt();
  const int n = cert.traj.time.count();
  const auto fric = frictions(ctx);
  const auto pfric = prefix_trapezoid(fric, dt);
  // The test space is linear, so every member is checked with both signs.
  for (std::size_t k = 0; k < opt.battery.size(); ++k) {
    const Series& s = series[k];
    for (const double sign : {1.0, -1.0}) {
      const auto& kt = sign > 0 ? s.kterm : s.kterm_neg;
      std::vector<double> flux(n), state(n);
      for (int i = 0; i < n; ++i) {
        flux[i] = sign * (s.mass_flux[i] + s.mom_flux[i]) + kt[i];
        state[i] = sign * (s.mass_state[i] + s.mom_state[i]);
      }
      const auto pf = prefix_trapezoid(flux, dt);
      const std::string id = (sign > 0 ? "" : "-") + opt.battery[k].id();
      for (int a = 0; a < n; ++a) {
        double sc = 0;
        for (int b = a + 1; b < n; ++b) {
          sc = std::max({sc, s.scale[a], s.scale[b], fric[a], fric[b]});
          const double v = (cert.E[b] - cert.E[a]) - (state[b] - state[a]) + (pf[b] - pf[a]) + (pfric[b] - pfric[a]);
          const double t = opt.tol.of(sc);
          rep.add({"envar-inequality", id, a, b, v, t, v <= t});
        }
      }
    }
  }
  return rep;
}

Report verify_dissweak(const DissWeakCert& cert, const VerifyOptions& opt) {
  cert.validate();
  const EnVarCert& base = cert.base;
  const SystemSpec& sys = base.system;
  const Context ctx = make_context(sys, base.traj);
  const int n = base.traj.time.count();
  Report rep;
  check_domination(rep, ctx.energies, base.E);
  if (!sys.compressible()) {
    std::vector<std::vector<Vec>> vel;
    for (const auto& s : base.traj.states) vel.push_back(s.m);
    check_divergence(rep, base.traj.grid, vel, opt.scalar_battery, opt.tol);
  }

  // (a) energy monotonicity, with friction for Poisson.
  const auto fric = frictions(ctx);
  const auto pfric = prefix_trapezoid(fric, base.traj.time.dt());
  for (int a = 0; a < n; ++a) {
    double sc = 0;
    for (int b = a + 1; b < n; ++b) {
      sc = std::max({sc, fric[a], fric[b]});
      const double v = base.E[b] - base.E[a] + (pfric[b] - pfric[a]);
      const double t = kDataTol * std::max(1.0, std::abs(base.E[a])) + (sc > 0 ? opt.tol.of(sc) : 0.0);
      rep.add({"energy-monotone", "-", a, b, v, t, v <= t});
    }
  }

  // Cone-valuedness and budgets per sample time.
  for (int i = 0; i < n; ++i) {
    if (sys.kind != SystemKind::EulerPoisson) {
      double worst = 0;
      for (const auto& w : cert.r1[i].ac()) worst = std::max(worst, -eigen(w).values[w.dim() - 1]);
      for (const auto& at : cert.r1[i].atoms()) worst = std::max(worst, -eigen(at.w).values[at.w.dim() - 1]);
      rep.add({"cone-r1", "-", i, i, worst, kDataTol, cone_membership(cert.r1[i], MatCone::PSD)});
    }
    const DiscMeasure* r2 = sys.compressible() ? &cert.r2[i] : nullptr;
    if (r2) {
      double worst = 0;
      for (const auto& w : r2->ac()) worst = std::max(worst, -w(0, 0));
      for (const auto& at : r2->atoms()) worst = std::max(worst, -at.w(0, 0));
      rep.add({"cone-r2", "-", i, i, worst, kDataTol, cone_membership(*r2, MatCone::PSD)});
    }
    const double v = defect_budget(sys, cert.r1[i], r2) - (base.E[i] - ctx.energies[i]);
    const double t = kDataTol * std::max(1.0, std::abs(base.E[i]));
    rep.add({"defect-budget", "-", i, i, v, t, v <= t});
  }

  const auto series = all_series(ctx, opt.battery, nullptr, &cert.r1, &cert.r2, opt.finer);
  check_equations(rep, ctx, opt.battery, series, opt.tol, "momentum");
  return rep;
}

Report verify_mv(const MVCert& cert, const VerifyOptions& opt) {
  cert.validate();
  const Grid& g = cert.grid;
  const int n = cert.time.count();
  Report rep;

  Trajectory traj{g, cert.time, {}};
  std::vector<DiscMeasure> defects;
  std::vector<std::vector<Vec>> vel;
  for (int i = 0; i < n; ++i) {
    const MVSlice& s = cert.slices[i];
    traj.states.push_back(State{{}, s.v});
    vel.push_back(s.v);
    defects.push_back(DiscMeasure::matrix_density(g, s.cov) + concentration_tensor(g, s));

    double worst_cov = 0;
    for (const auto& c : s.cov) worst_cov = std::max(worst_cov, -eigen(c).values[g.dim - 1]);
    rep.add({"mv-covariance-psd", "-", i, i, worst_cov, kDataTol, worst_cov <= kDataTol});

    double worst_l = 0;
    for (const auto& w : s.lambda.ac()) worst_l = std::max(worst_l, -w(0, 0));
    for (const auto& at : s.lambda.atoms()) worst_l = std::max(worst_l, -at.w(0, 0));
    rep.add({"mv-lambda-nonneg", "-", i, i, worst_l, kDataTol, worst_l <= kDataTol});

    // Probability on the sphere with unit-trace second moment.
    double worst_s = 0;
    auto sphere_defect = [&](const SphereMeasure& nu) {
      double mass = 0, neg = 0, unit = 0;
      for (const auto& a : nu) {
        mass += a.w;
        neg = std::max(neg, -a.w);
        double len2 = 0;
        for (int k = 0; k < g.dim; ++k) len2 += a.theta[k] * a.theta[k];
        unit = std::max(unit, std::abs(std::sqrt(len2) - 1));
      }
      const double tr = second_moment(nu, g.dim).trace();
      worst_s = std::max({worst_s, std::abs(mass - 1), neg, unit, std::abs(tr - 1)});
    };
    for (int c = 0; c < static_cast<int>(s.angle_cells.size()); ++c)
      if (s.lambda.density(c) != 0) sphere_defect(s.angle_cells[c]);
    for (const auto& nu : s.angle_atoms) sphere_defect(nu);
    rep.add({"mv-sphere", "-", i, i, worst_s, kDataTol, worst_s <= kDataTol});
  }
  check_divergence(rep, g, vel, opt.scalar_battery, opt.tol);

  std::vector<double> mve(n);
  for (int i = 0; i < n; ++i) mve[i] = mv_energy(cert, i);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double ea = mve[a], eb = mve[b];
      const double v = eb - ea;
      const double t = kDataTol * std::max(1.0, std::abs(ea));
      rep.add({"mv-energy", "-", a, b, v, t, v <= t});
    }
  }

  const Context ctx = make_context(cert.system, traj);
  const auto series = all_series(ctx, opt.battery, nullptr, &defects, nullptr, opt.finer);
  check_equations(rep, ctx, opt.battery, series, opt.tol, "mv-moment");
  return rep;
}

double mv_energy(const MVCert& cert, int i) {
  const MVSlice& s = cert.slices.at(i);
  const Grid& g = cert.grid;
  std::vector<double> dens(g.cell_count());
  for (int c = 0; c < g.cell_count(); ++c) {
    double v2 = 0;
    for (int k = 0; k < g.dim; ++k) v2 += s.v[c][k] * s.v[c][k];
    dens[c] = 0.5 * (v2 + s.cov[c].trace());
  }
  return quad(g, dens) + 0.5 * total_trace(s.lambda);
}

double jensen_gap(const MVCert& cert, int i) {
  const MVSlice& s = cert.slices.at(i);
  std::vector<double> tr(cert.grid.cell_count());
  for (int c = 0; c < cert.grid.cell_count(); ++c) tr[c] = s.cov[c].trace();
  const double gap = 0.5 * quad(cert.grid, tr) + 0.5 * total_trace(s.lambda);
  if (gap < -1e-12) throw InputError("negative Jensen gap: covariance or concentration not admissible");
  return std::max(gap, 0.0);
}

}  // namespace gensol
