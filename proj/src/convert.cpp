#include "gensol/convert.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gensol/parallel.hpp"

namespace gensol {

namespace {

void require_psd(const SymMat& R, const char* what) {
  if (!R.finite()) throw InputError(std::string(what) + " has non-finite entries");
  const EigenDecomp e = eigen(R);
  double scale = 1;
  for (int i = 0; i < e.dim; ++i) scale = std::max(scale, std::abs(e.values[i]));
  if (e.values[e.dim - 1] < -1e-12 * scale) throw InputError(std::string(what) + " is not positive semidefinite");
}

}  // namespace

SymMat gaussian_second_moment(const Vec& v, const SymMat& R) {
  require_psd(R, "covariance");
  return R + SymMat::outer(v, R.dim());
}

SphereMeasure sphere_measure_from_cov(const SymMat& R) {
  require_psd(R, "concentration covariance");
  if (std::abs(R.trace() - 1) > 1e-10) throw InputError("concentration covariance must have unit trace");
  const EigenDecomp e = eigen(R);
  double total = 0;
  for (int i = 0; i < e.dim; ++i) total += std::max(e.values[i], 0.0);
  SphereMeasure out;
  for (int i = 0; i < e.dim; ++i) {
    const double s = std::max(e.values[i], 0.0) / total;
    if (s == 0) continue;
    Vec minus{};
    for (int k = 0; k < 3; ++k) minus[k] = -e.vectors[i][k];
    out.push_back({s / 2, e.vectors[i]});
    out.push_back({s / 2, minus});
  }
  return out;
}

MVCert diss_to_mv(const DissWeakCert& cert) {
  cert.validate();
  const EnVarCert& b = cert.base;
  if (b.system.compressible())
    throw InputError("measure-valued certificates are implemented for the incompressible system only");
  const Grid& g = b.traj.grid;
  MVCert out{b.system, g, b.traj.time, {}};
  for (int i = 0; i < b.traj.time.count(); ++i) {
    if (!cone_membership(cert.r1[i], MatCone::PSD)) throw InputError("Reynolds defect is not PSD-valued");
    const State& s = b.traj.states[i];
    const double zeta = b.E[i] - energy(b.system, g, s);
    const RnSplit parts = rn_split(trace_adjust(cert.r1[i], zeta));
    MVSlice sl{s.m, parts.ac.ac(), DiscMeasure(g, WeightKind::Scalar), {}, {}};
    for (const Atom& a : parts.singular.atoms()) {
      const double tr = a.w.trace();
      if (tr < 1e-14) continue;
      sl.lambda.add_atom(a.x, tr);
      sl.angle_atoms.push_back(sphere_measure_from_cov((1.0 / tr) * a.w));
    }
    out.slices.push_back(std::move(sl));
  }
  return out;
}

EnVarCert mv_to_envar(const MVCert& cert) {
  cert.validate();
  EnVarCert out{cert.system, Trajectory{cert.grid, cert.time, {}}, {}};
  for (int i = 0; i < cert.time.count(); ++i) {
    State s;
    s.m = cert.slices[i].v;
    out.traj.states.push_back(std::move(s));
    out.E.push_back(mv_energy(cert, i));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Vec> ray_fan(int dim, int rays) {
  if (dim == 1) return {Vec{1, 0, 0}};
  if (dim == 2) {
    if (rays < 4 || rays % 2 != 0) throw InputError("d = 2 ray fans need an even count >= 4 (axes included)");
    std::vector<Vec> out;
    for (int k = 0; k < rays; ++k) {
      const double a = std::numbers::pi * k / rays;
      out.push_back({std::cos(a), std::sin(a), 0});
    }
    return out;
  }
  if (dim == 3) {
    if (rays != 13 && rays != 26) throw InputError("d = 3 ray fans use the 13 cube-neighbour lines (rays = 13 or 26)");
    std::vector<Vec> out;
    for (int x = -1; x <= 1; ++x)
      for (int y = -1; y <= 1; ++y)
        for (int z = -1; z <= 1; ++z) {
          // One representative per line: first nonzero coordinate positive.
          const int first = x != 0 ? x : (y != 0 ? y : z);
          if (first <= 0) continue;
          const double n = std::sqrt(double(x * x + y * y + z * z));
          out.push_back({x / n, y / n, z / n});
        }
    return out;
  }
  throw InputError("dimension must be 1, 2 or 3");
}

SolverOptions SolverOptions::defaults_for(int dim) {
  SolverOptions o;
  o.rays = dim == 3 ? 13 : (dim == 2 ? 8 : 1);
  return o;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NonConverged: return "non-converged";
  }
  return "?";
}

double required_budget_lower_bound(const FeasibilityProblem& p) {
  // Weak duality: for any row weights y and feasible x,
  //   y.rhs - sum |y_k| tol_k <= y.(A x) <= budget * max_j |y.a_j| / cost_j.
  const std::size_t m = p.rhs.size();
  auto bound = [&](const std::vector<double>& y) {
    double need = 0;
    for (std::size_t k = 0; k < m; ++k) need += y[k] * p.rhs[k] - std::abs(y[k]) * p.row_tol[k];
    if (need <= 0) return 0.0;
    double per_budget = 0;
    for (int j = 0; j < p.columns(); ++j) {
      double s = 0;
      for (std::size_t k = 0; k < m; ++k) s += y[k] * p.col(j, k);
      per_budget = std::max(per_budget, std::abs(s) / (*p.cost)[j]);
    }
    return per_budget > 0 ? need / per_budget : HUGE_VAL;
  };
  double best = 0;
  std::vector<double> y(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    y[k] = p.rhs[k] < 0 ? -1 : 1;
    best = std::max(best, bound(y));
    y[k] = 0;
  }
  return std::max(best, bound(p.rhs));
}

// ---------------------------------------------------------------------------
// Wolfe's minimum-norm-point algorithm over the points
//   P_0 = b / tau,  P_j = (b - (zeta / cost_j) a_j) / tau,
// i.e. the scaled residual at the vertices of the budget polytope.

namespace {

// Solves the affine minimum-norm problem over the corral: min |sum mu_s P_s|,
// sum mu = 1, via the bordered Gram system. Returns false when singular.
bool affine_min(const std::vector<const double*>& pts, int m, std::vector<double>& mu) {
  const int n = static_cast<int>(pts.size());
  const int N = n + 1;
  std::vector<double> A(N * N, 0.0), rhs(N, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = 0;
      for (int k = 0; k < m; ++k) s += pts[i][k] * pts[j][k];
      A[i * N + j] = A[j * N + i] = s;
    }
    A[i * N + n] = A[n * N + i] = 1;
  }
  rhs[n] = 1;
  for (int c = 0; c < N; ++c) {
    int piv = c;
    for (int r = c + 1; r < N; ++r)
      if (std::abs(A[r * N + c]) > std::abs(A[piv * N + c])) piv = r;
    if (std::abs(A[piv * N + c]) < 1e-300) return false;
    if (piv != c) {
      for (int k = 0; k < N; ++k) std::swap(A[c * N + k], A[piv * N + k]);
      std::swap(rhs[c], rhs[piv]);
    }
    for (int r = c + 1; r < N; ++r) {
      const double f = A[r * N + c] / A[c * N + c];
      if (f == 0) continue;
      for (int k = c; k < N; ++k) A[r * N + k] -= f * A[c * N + k];
      rhs[r] -= f * rhs[c];
    }
  }
  std::vector<double> x(N);
  for (int r = N - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int k = r + 1; k < N; ++k) s -= A[r * N + k] * x[k];
    x[r] = s / A[r * N + r];
  }
  mu.assign(x.begin(), x.begin() + n);
  for (double v : mu)
    if (!std::isfinite(v)) return false;
  return true;
}

double max_abs(const std::vector<double>& x) {
  double m = 0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

SlabResult solve_slab(const FeasibilityProblem& p, int max_iters) {
  const int m = static_cast<int>(p.rhs.size());
  const int ncol = p.columns();
  SlabResult res;
  res.weights.assign(ncol, 0.0);

  // Point 0 is "no defect"; point j + 1 puts the whole budget on column j.
  const bool any_budget = p.zeta > 0;
  const int npts = any_budget ? ncol + 1 : 1;
  std::vector<double> P(static_cast<std::size_t>(npts) * m);
  for (int k = 0; k < m; ++k) P[k] = p.rhs[k] / p.row_tol[k];
  for (int j = 0; j < ncol && any_budget; ++j) {
    const double w = p.zeta / (*p.cost)[j];
    for (int k = 0; k < m; ++k) P[(j + 1) * m + k] = (p.rhs[k] - w * p.col(j, k)) / p.row_tol[k];
  }
  auto pt = [&](int j) { return &P[static_cast<std::size_t>(j) * m]; };
  auto dot = [&](const double* a, const double* b) {
    double s = 0;
    for (int k = 0; k < m; ++k) s += a[k] * b[k];
    return s;
  };

  std::vector<int> S{0};
  std::vector<double> lam{1.0};
  std::vector<double> x(pt(0), pt(0) + m);
  double pmax = dot(pt(0), pt(0));
  bool converged = false;
  int it = 0;
  for (; it < max_iters; ++it) {
    // Stop early with a margin; the acceptance test below is against 1.
    if (max_abs(x) <= 0.25) {
      converged = true;
      break;
    }
    int jbest = 0;
    double best = dot(x.data(), pt(0));
    for (int j = 1; j < npts; ++j) {
      const double v = dot(x.data(), pt(j));
      if (v < best) best = v, jbest = j;
    }
    const double xx = dot(x.data(), x.data());
    pmax = std::max(pmax, dot(pt(jbest), pt(jbest)));
    if (xx - best <= 1e-12 * pmax || std::find(S.begin(), S.end(), jbest) != S.end()) {
      converged = true;
      break;
    }
    S.push_back(jbest);
    lam.push_back(0.0);
    // Minor cycles: move towards the affine minimizer while staying in the hull.
    for (;;) {
      std::vector<const double*> pts;
      for (int s : S) pts.push_back(pt(s));
      std::vector<double> mu;
      if (!affine_min(pts, m, mu)) {
        // Affinely dependent corral: drop the newest point and stop.
        S.pop_back();
        lam.pop_back();
        converged = true;
        break;
      }
      bool interior = true;
      for (double v : mu)
        if (v <= 1e-14) interior = false;
      if (interior) {
        lam = mu;
        break;
      }
      double theta = 1;
      for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu[i] <= 1e-14) theta = std::min(theta, lam[i] / (lam[i] - mu[i]));
      std::vector<int> S2;
      std::vector<double> l2;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        const double v = lam[i] + theta * (mu[i] - lam[i]);
        if (v > 1e-14) S2.push_back(S[i]), l2.push_back(v);
      }
      if (S2.empty()) {
        S2.push_back(S.back());
        l2.push_back(1.0);
      }
      double sum = 0;
      for (double v : l2) sum += v;
      for (double& v : l2) v /= sum;
      S = std::move(S2);
      lam = std::move(l2);
    }
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t i = 0; i < S.size(); ++i)
      for (int k = 0; k < m; ++k) x[k] += lam[i] * pt(S[i])[k];
    if (converged) break;
  }
  res.iterations = it;
  for (std::size_t i = 0; i < S.size(); ++i)
    if (S[i] > 0) res.weights[S[i] - 1] = lam[i] * p.zeta / (*p.cost)[S[i] - 1];
  // Report the residual of the weights actually returned.
  res.violation = 0;
  for (int k = 0; k < m; ++k) {
    double r = p.rhs[k];
    for (std::size_t i = 0; i < S.size(); ++i)
      if (S[i] > 0) r -= res.weights[S[i] - 1] * p.col(S[i] - 1, k);
    res.violation = std::max(res.violation, std::abs(r) / p.row_tol[k]);
  }
  if (res.violation <= 1)
    res.status = SolveStatus::Feasible;
  else
    res.status = converged ? SolveStatus::Infeasible : SolveStatus::NonConverged;
  return res;
}

// ---------------------------------------------------------------------------

namespace {

// d/dt of a sampled series, second order (one-sided three-point at the ends).
std::vector<double> time_derivative(const std::vector<double>& f, double dt) {
  const int n = static_cast<int>(f.size());
  std::vector<double> d(n, 0.0);
  if (n == 2) {
    d[0] = d[1] = (f[1] - f[0]) / dt;
    return d;
  }
  for (int i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2 * dt);
  d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * dt);
  d[n - 1] = (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * dt);
  return d;
}

double r1_cost(const SystemSpec& sys) { return sys.kind == SystemKind::EulerKorteweg ? 1.0 : 0.5; }

}  // namespace

std::vector<FeasibilityProblem> assemble_problems(const EnVarCert& cert, const std::vector<TestFunction>& battery,
                                                  const SolverOptions& opt) {
  cert.validate();
  const SystemSpec& sys = cert.system;
  const Grid& g = cert.traj.grid;
  const TimeGrid& tg = cert.traj.time;
  const int n = tg.count();
  if (n < 2) throw InputError("conversion needs at least two sample times");
  const std::vector<Vec> fan = ray_fan(g.dim, opt.rays);
  const int K = static_cast<int>(fan.size());
  const bool sign_free = sys.kind == SystemKind::EulerPoisson;
  const bool scalar = sys.compressible();

  std::vector<TestFunction> rows;
  for (const auto& f : battery)
    for (auto& p : f.spatial_phi_parts())
      if (!p.is_zero()) rows.push_back(std::move(p));
  const int m = static_cast<int>(rows.size());

  std::vector<SliceFields> fields(n);
  parallel_for(n, [&](int i) { fields[i] = slice_fields(sys, g, cert.traj.states[i]); });

  // Per row: momentum state and flux series, and the pairing generators.
  std::vector<std::vector<double>> rhs(m, std::vector<double>(n));
  std::vector<double> scale(m, 0.0);
  std::vector<std::vector<double>> ray_pair(m), div_pair(m);
  parallel_for(m, [&](int k) {
    std::vector<double> state(n), flux(n);
    for (int i = 0; i < n; ++i) {
      const SliceTerms st = slice_terms(sys, g, fields[i], rows[k], tg.at(i));
      state[i] = st.mom_state;
      flux[i] = st.mom_flux;
      scale[k] = std::max(scale[k], st.scale);
    }
    const auto dstate = time_derivative(state, tg.dt());
    for (int i = 0; i < n; ++i) rhs[k][i] = dstate[i] - flux[i];
    ray_pair[k].resize(static_cast<std::size_t>(g.cell_count()) * K);
    if (scalar) div_pair[k].resize(g.cell_count());
    for (int c = 0; c < g.cell_count(); ++c) {
      const Vec x = g.center(c);
      const SymMat S = SymMat::sym_part(rows[k].grad_phi(x, 0.0));
      for (int j = 0; j < K; ++j) {
        double q = 0;
        for (int a = 0; a < g.dim; ++a)
          for (int b = 0; b < g.dim; ++b) q += fan[j][a] * S(a, b) * fan[j][b];
        ray_pair[k][c * K + j] = q;
      }
      if (scalar) div_pair[k][c] = rows[k].div_phi(x, 0.0);
    }
  });

  // Columns are shared by every slab.
  auto col = std::make_shared<std::vector<double>>();
  auto cost = std::make_shared<std::vector<double>>();
  for (int c = 0; c < g.cell_count(); ++c)
    for (int j = 0; j < K; ++j)
      for (int sgn : sign_free ? std::vector<int>{1, -1} : std::vector<int>{1}) {
        for (int k = 0; k < m; ++k) col->push_back(sgn * ray_pair[k][c * K + j]);
        cost->push_back(r1_cost(sys));
      }
  if (scalar)
    for (int c = 0; c < g.cell_count(); ++c) {
      for (int k = 0; k < m; ++k) col->push_back(div_pair[k][c]);
      cost->push_back(1.0 / (sys.gamma - 1));
    }

  const Tolerance tol = Tolerance::for_grid(g, tg, opt.tol);
  std::vector<FeasibilityProblem> out(n);
  for (int i = 0; i < n; ++i) {
    FeasibilityProblem& p = out[i];
    p.time_index = i;
    p.zeta = cert.E[i] - fields[i].energy;
    for (int k = 0; k < m; ++k) {
      p.rhs.push_back(rhs[k][i]);
      p.row_tol.push_back(tol.of(scale[k]) / (2 * tg.T));
    }
    p.a = col;
    p.cost = cost;
    p.cells = g.cell_count();
    p.rays = K;
    p.sign_free = sign_free;
    p.scalar = scalar;
  }
  return out;
}

ConversionOutcome envar_to_diss(const EnVarCert& cert, const std::vector<TestFunction>& battery,
                                const SolverOptions& opt) {
  cert.validate();
  const SystemSpec& sys = cert.system;
  const Grid& g = cert.traj.grid;
  const int n = cert.traj.time.count();
  ConversionOutcome out;

  // Clauses no defect can repair: E must dominate the energy and, with phi = 0,
  // decrease (up to friction for Poisson).
  std::vector<double> energies(n), fric(n);
  for (int i = 0; i < n; ++i) {
    energies[i] = energy(sys, g, cert.traj.states[i]);
    fric[i] = friction_dissipation(sys, g, cert.traj.states[i]);
  }
  for (int i = 0; i < n; ++i)
    if (cert.E[i] - energies[i] < -kDataTol * std::max(1.0, std::abs(cert.E[i]))) {
      out.status = SolveStatus::Infeasible;
      out.worst_slab = i;
      out.violation = energies[i] - cert.E[i];
      out.message = "E is below the energy at sample " + std::to_string(i);
      return out;
    }
  const Tolerance tol = Tolerance::for_grid(g, cert.traj.time, opt.tol);
  for (int i = 0; i + 1 < n; ++i) {
    const double v = cert.E[i + 1] - cert.E[i] + 0.5 * cert.traj.time.dt() * (fric[i] + fric[i + 1]);
    const double allowed = kDataTol * std::max(1.0, std::abs(cert.E[i])) + (fric[i] > 0 ? tol.of(fric[i]) : 0.0);
    if (v > allowed) {
      out.status = SolveStatus::Infeasible;
      out.worst_slab = i + 1;
      out.violation = v;
      out.message = "E increases between samples " + std::to_string(i) + " and " + std::to_string(i + 1);
      return out;
    }
  }

  const auto problems = assemble_problems(cert, battery, opt);
  std::vector<SlabResult> results(n);
  parallel_for(n, [&](int i) { results[i] = solve_slab(problems[i], opt.max_iters); });

  for (int i = 0; i < n; ++i) {
    if (results[i].violation > out.violation || out.worst_slab < 0) {
      out.violation = results[i].violation;
      out.worst_slab = i;
    }
    if (results[i].status != SolveStatus::Feasible && out.status == SolveStatus::Feasible) {
      out.status = results[i].status;
      out.message = "slab " + std::to_string(i) + ": " + to_string(results[i].status);
    } else if (results[i].status == SolveStatus::Infeasible) {
      out.status = SolveStatus::Infeasible;
    }
  }
  if (out.status != SolveStatus::Feasible) return out;

  const std::vector<Vec> fan = ray_fan(g.dim, opt.rays);
  const int K = static_cast<int>(fan.size());
  const double vol = g.cell_volume();
  DissWeakCert d{cert, {}, {}};
  for (int i = 0; i < n; ++i) {
    const auto& w = results[i].weights;
    const FeasibilityProblem& p = problems[i];
    std::vector<SymMat> dens(g.cell_count(), SymMat(g.dim));
    std::size_t j = 0;
    for (int c = 0; c < g.cell_count(); ++c)
      for (int r = 0; r < K; ++r)
        for (int sgn : p.sign_free ? std::vector<int>{1, -1} : std::vector<int>{1}) {
          if (w[j] != 0) dens[c] += (sgn * w[j] / vol) * SymMat::outer(fan[r], g.dim);
          ++j;
        }
    d.r1.push_back(DiscMeasure::matrix_density(g, dens));
    if (p.scalar) {
      std::vector<double> s(g.cell_count());
      for (int c = 0; c < g.cell_count(); ++c) s[c] = w[j++] / vol;
      d.r2.push_back(DiscMeasure::scalar_density(g, s));
    }
    const double budget = defect_budget(sys, d.r1.back(), p.scalar ? &d.r2.back() : nullptr);
    out.budget_slack.push_back(p.zeta - budget);
    double bnd = 0;
    for (int c = 0; c < g.cell_count(); ++c)
      if (g.is_boundary_cell(c)) bnd += mat_norm(dens[c], MatNormKind::Trace) * vol;
    out.boundary_mass.push_back(bnd);
  }
  out.cert = std::move(d);
  return out;
}

ConversionOutcome envar_to_diss(const EnVarCert& cert, const SolverOptions& opt) {
  const VerifyOptions v =
      VerifyOptions::standard(cert.system, cert.traj.grid, cert.traj.time, opt.battery_size, opt.seed);
  return envar_to_diss(cert, v.battery, opt);
}

}  // namespace gensol
