#pragma once

// Certificates for energy-variational, dissipative weak and measure-valued
// solutions, and clause-by-clause verification against test batteries.

#include <map>
#include <string>
#include <vector>

#include "gensol/dmeasure.hpp"
#include "gensol/systems.hpp"

namespace gensol {

struct EnVarCert {
  SystemSpec system;
  Trajectory traj;
  std::vector<double> E;  // one per sample time

  void validate() const;
};

/// Defects per sample time. r2 is empty for the incompressible system.
struct DissWeakCert {
  EnVarCert base;
  std::vector<DiscMeasure> r1;
  std::vector<DiscMeasure> r2;

  void validate() const;
};

struct SphereAtom {
  double w = 0;
  Vec theta{1, 0, 0};

  friend bool operator==(const SphereAtom&, const SphereAtom&) = default;
};
/// Probability measure on the unit sphere, as weighted directions.
using SphereMeasure = std::vector<SphereAtom>;

/// Second moment sum w theta (x) theta.
SymMat second_moment(const SphereMeasure& nu, int dim);

/// Moments of a measure-valued solution at one sample time.
struct MVSlice {
  std::vector<Vec> v;            // mean <nu, xi>
  std::vector<SymMat> cov;       // R = <nu, xi (x) xi> - v (x) v
  DiscMeasure lambda;            // concentration, scalar
  std::vector<SphereMeasure> angle_cells;  // empty, or one per cell
  std::vector<SphereMeasure> angle_atoms;  // one per atom of lambda
};

/// Incompressible only.
struct MVCert {
  SystemSpec system;
  Grid grid;
  TimeGrid time;
  std::vector<MVSlice> slices;

  void validate() const;
};

/// lambda (x) <nu_inf, theta (x) theta> as a matrix measure.
DiscMeasure concentration_tensor(const Grid& g, const MVSlice& s);

/// tol = c_tol (h^2 + dt^2)(1 + scale), multiplied by `factor`.
struct Tolerance {
  double c_tol = 10;
  double h = 0;
  double dt = 0;
  double factor = 1;

  static Tolerance for_grid(const Grid& g, const TimeGrid& t, double c_tol = 10);
  double of(double scale) const { return factor * c_tol * (h * h + dt * dt) * (1 + scale); }
  Tolerance scaled(double f) const {
    Tolerance t = *this;
    t.factor *= f;
    return t;
  }
};

/// Absolute slack for clauses that involve no discretization error beyond
/// the energy quadrature (domination, budgets, monotonicity, cone tests).
inline constexpr double kDataTol = 1e-10;

struct CheckRecord {
  std::string clause;
  std::string test_id;
  int s = -1;
  int t = -1;
  double value = 0;
  double tol = 0;
  bool pass = true;
};

/// Keeps the worst record per (clause, test function) and every failing
/// record up to a cap. The verdict counts every check.
class Report {
 public:
  void add(CheckRecord r);
  void merge(const Report& other);

  bool pass() const { return failures_ == 0; }
  long checks() const { return checks_; }
  long failures() const { return failures_; }
  const std::vector<CheckRecord>& worst() const { return worst_; }
  const std::vector<CheckRecord>& failing() const { return failing_; }
  /// Largest value recorded for the clause (-inf if none).
  double max_value(const std::string& clause) const;
  bool clause_failed(const std::string& clause) const;
  std::vector<std::string> clauses() const;

  static constexpr std::size_t kFailCap = 200;

 private:
  std::vector<CheckRecord> worst_;
  std::map<std::pair<std::string, std::string>, std::size_t> index_;
  std::vector<CheckRecord> failing_;
  long checks_ = 0;
  long failures_ = 0;
};

struct VerifyOptions {
  std::vector<TestFunction> battery;
  std::vector<TestFunction> scalar_battery;  // weak divergence for incompressible states
  Tolerance tol;
  bool finer = false;  // Poisson: the finer regularity weight

  static VerifyOptions standard(const SystemSpec& sys, const Grid& g, const TimeGrid& t, int battery_size,
                                std::uint64_t seed, double c_tol = 10);
};

/// Defect budget of the system: 1/2 |r1|_tr (incompressible, isentropic,
/// Poisson) or |r1|_MMax (Korteweg), plus |r2| / (gamma - 1).
double defect_budget(const SystemSpec& sys, const DiscMeasure& r1, const DiscMeasure* r2);

Report verify_envar(const EnVarCert& cert, const VerifyOptions& opt);
Report verify_dissweak(const DissWeakCert& cert, const VerifyOptions& opt);
Report verify_mv(const MVCert& cert, const VerifyOptions& opt);

/// E - energy(v) = 1/2 int tr R + 1/2 lambda(closed domain).
double jensen_gap(const MVCert& cert, int time_index);

/// E(t_i) = 1/2 int |v|^2 + tr R + 1/2 lambda(closed domain).
double mv_energy(const MVCert& cert, int time_index);

}  // namespace gensol
