#include "gensol/examples.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace gensol {

namespace {

EnVarCert with_energy(const SystemSpec& sys, Trajectory tr) {
  EnVarCert c{sys, std::move(tr), {}};
  for (const auto& s : c.traj.states) c.E.push_back(energy(sys, c.traj.grid, s));
  return c;
}

}  // namespace

EnVarCert example_zero(const SystemSpec& sys, const Grid& g, const TimeGrid& t) {
  sys.validate();
  State s;
  if (sys.compressible()) s.rho.assign(g.cell_count(), 0.0);
  s.m.assign(g.cell_count(), Vec{0, 0, 0});
  return EnVarCert{sys, Trajectory{g, t, std::vector<State>(t.count(), s)}, std::vector<double>(t.count(), 0.0)};
}

EnVarCert example_shear(const Grid& g, const TimeGrid& t) {
  if (g.dim < 2 || g.topology != Topology::Torus) throw InputError("shear example needs a torus of dimension >= 2");
  State s;
  for (int c = 0; c < g.cell_count(); ++c)
    s.m.push_back({std::sin(2 * std::numbers::pi * g.center(c)[1] / g.extent[1]), 0, 0});
  return with_energy(SystemSpec{}, Trajectory{g, t, std::vector<State>(t.count(), s)});
}

EnVarCert example_constant_state(const SystemSpec& sys, const Grid& g, const TimeGrid& t, double rho0) {
  if (!sys.compressible()) throw InputError("constant-state example needs a compressible system");
  State s;
  s.rho.assign(g.cell_count(), rho0);
  s.m.assign(g.cell_count(), Vec{0, 0, 0});
  return with_energy(sys, Trajectory{g, t, std::vector<State>(t.count(), s)});
}

DissWeakCert example_energy_jump(const Grid& g, const TimeGrid& t, double c) {
  if (!(c >= 0)) throw InputError("energy level must be nonnegative");
  EnVarCert base = example_zero(SystemSpec{}, g, t);
  base.E.assign(t.count(), c);
  const SymMat dens = (2 * c / (g.dim * g.volume())) * SymMat::identity(g.dim);
  const DiscMeasure r = DiscMeasure::matrix_density(g, std::vector<SymMat>(g.cell_count(), dens));
  return DissWeakCert{base, std::vector<DiscMeasure>(t.count(), r), {}};
}

EnVarCert example_poisson_mms(const SystemSpec& sys, const Grid& g, const TimeGrid& t, double rho0, Vec m0) {
  if (sys.kind != SystemKind::EulerPoisson) throw InputError("poisson-mms example needs the Euler-Poisson system");
  if (g.topology != Topology::Torus) throw InputError("poisson-mms example needs a torus");
  for (int i = g.dim; i < 3; ++i) m0[i] = 0;
  Trajectory tr{g, t, {}};
  for (int i = 0; i < t.count(); ++i) {
    const double decay = std::exp(-sys.alpha * t.at(i));
    State s;
    s.rho.assign(g.cell_count(), rho0);
    s.m.assign(g.cell_count(), Vec{m0[0] * decay, m0[1] * decay, m0[2] * decay});
    tr.states.push_back(std::move(s));
  }
  return with_energy(sys, std::move(tr));
}

DissWeakCert example_decaying_shear(const Grid& g, const TimeGrid& t, double a, double beta, double kappa) {
  if (g.dim < 2 || g.topology != Topology::Torus) throw InputError("decaying shear needs a torus of dimension >= 2");
  if (!(kappa >= 1) || !(beta >= 0)) throw InputError("decaying shear needs kappa >= 1 and beta >= 0");
  const double L = g.extent[1];
  const double k = 2 * std::numbers::pi / L;
  DissWeakCert d{EnVarCert{SystemSpec{}, Trajectory{g, t, {}}, {}}, {}, {}};
  for (int i = 0; i < t.count(); ++i) {
    const double decay = std::exp(-beta * t.at(i));
    const double gmax = std::abs(a) * beta * decay / k;
    const double c = kappa * gmax;
    State s;
    std::vector<SymMat> dens;
    for (int cell = 0; cell < g.cell_count(); ++cell) {
      const double y = g.center(cell)[1];
      s.m.push_back({a * decay * std::sin(k * y), 0, 0});
      SymMat r(g.dim);
      r.set(0, 0, c);
      r.set(1, 1, c);
      r.set(0, 1, -a * beta * decay * std::cos(k * y) / k);
      dens.push_back(r);
    }
    const double e = energy(d.base.system, g, s);
    d.base.traj.states.push_back(std::move(s));
    d.r1.push_back(DiscMeasure::matrix_density(g, dens));
    d.base.E.push_back(e + defect_budget(d.base.system, d.r1.back(), nullptr));
  }
  return d;
}

DissWeakCert example_random_dissweak(const Grid& g, const TimeGrid& t, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); };
  DissWeakCert d = example_decaying_shear(g, t, uni(-1.5, 1.5), uni(0.2, 1.5), uni(1.0, 2.0));
  const int n = t.count();
  const int atoms = static_cast<int>(uni(0, 4));
  const double slack0 = uni(0, 0.2);
  for (int i = 0; i < n; ++i) {
    // Nonincreasing extra mass keeps E monotone.
    const double extra = uni(0.5, 1.0) * (1.0 - 0.5 * i / std::max(1, n - 1));
    std::vector<double> bump(g.cell_count());
    double total = 0;
    for (double& b : bump) total += (b = uni(0, 1) * uni(0, 1));
    DiscMeasure iso(g, WeightKind::Matrix);
    const double share = atoms > 0 ? 0.5 : 1.0;
    for (int c = 0; c < g.cell_count(); ++c)
      iso.set_density(c, (share * extra * bump[c] / total / g.cell_volume()) * SymMat::identity(g.dim));
    for (int a = 0; a < atoms; ++a) {
      Vec x{};
      for (int k = 0; k < g.dim; ++k) x[k] = uni(0, g.extent[k]);
      iso.add_atom(x, ((1 - share) * extra / atoms) * SymMat::identity(g.dim));
    }
    d.r1[i] += iso;
    const double e = energy(d.base.system, g, d.base.traj.states[i]);
    d.base.E[i] = e + defect_budget(d.base.system, d.r1[i], nullptr) + slack0 * (1.0 - double(i) / n);
  }
  // The random extra mass can still increase the budget a little; restore monotonicity.
  for (int i = n - 2; i >= 0; --i) d.base.E[i] = std::max(d.base.E[i], d.base.E[i + 1]);
  return d;
}

DissWeakCert example_uniform_defect(const SystemSpec& sys, const Grid& g, const TimeGrid& t, double c1, double c2) {
  if (!(c1 >= 0) || !(c2 >= 0)) throw InputError("uniform defect levels must be nonnegative");
  DissWeakCert d = with_zero_defects(example_constant_state(sys, g, t));
  for (int i = 0; i < t.count(); ++i) {
    d.r1[i] = DiscMeasure::matrix_density(g, std::vector<SymMat>(g.cell_count(), c1 * SymMat::identity(g.dim)));
    d.r2[i] = DiscMeasure::scalar_density(g, std::vector<double>(g.cell_count(), c2));
    d.base.E[i] += defect_budget(sys, d.r1[i], &d.r2[i]);
  }
  return d;
}

DissWeakCert with_zero_defects(const EnVarCert& c) {
  DissWeakCert d{c, {}, {}};
  d.r1.assign(c.traj.time.count(), DiscMeasure(c.traj.grid, WeightKind::Matrix));
  if (c.system.compressible()) d.r2.assign(c.traj.time.count(), DiscMeasure(c.traj.grid, WeightKind::Scalar));
  return d;
}

}  // namespace gensol
