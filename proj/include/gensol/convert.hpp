#pragma once

// Conversions between the three solution concepts. The envar -> dissweak
// direction solves a finite convex feasibility problem for cone-valued
// defects, one sample time at a time.

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gensol/certify.hpp"

namespace gensol {

/// <nu, xi (x) xi> for the Gaussian with mean v and covariance R: R + v (x) v.
SymMat gaussian_second_moment(const Vec& v, const SymMat& R);

/// Symmetric atoms sigma_i/2 at +-e_i from the eigenpairs of a PSD, unit-trace R.
SphereMeasure sphere_measure_from_cov(const SymMat& R);

/// Incompressible only. Adjusts the trace of the Reynolds defect to 2(E - energy),
/// splits it and reads off the oscillation and concentration parts.
MVCert diss_to_mv(const DissWeakCert& cert);

/// Mean field and E = 1/2 int |v|^2 + tr R + 1/2 lambda(closed domain).
EnVarCert mv_to_envar(const MVCert& cert);

/// Unit directions whose rank-one projectors span the inner approximation
/// of the PSD cone. d = 2: `rays` equally spaced angles in [0, pi).
/// d = 3: the 13 lines through the cube neighbours (`rays` must be 13 or 26).
std::vector<Vec> ray_fan(int dim, int rays);

struct SolverOptions {
  int rays = 8;
  int max_iters = 50000;
  /// Constraint tolerance constant: a slab is accepted when every constraint
  /// is met within tol (h^2 + dt^2)(1 + scale) / (2T).
  double tol = 10;
  std::uint64_t seed = 1;  // only used when the battery is generated here
  int battery_size = 12;

  static SolverOptions defaults_for(int dim);
};

/// Per-sample defect problem: columns are unit-budget cone generators,
/// rows are the spatial battery members.
struct FeasibilityProblem {
  int time_index = 0;
  double zeta = 0;                       // E - energy
  std::vector<double> rhs;               // one per row
  std::vector<double> row_tol;           // allowed violation per row
  /// Column-major pairings, shared across slabs: entry (k, j) is a[j * rows + k].
  std::shared_ptr<const std::vector<double>> a;
  std::shared_ptr<const std::vector<double>> cost;  // budget per unit weight
  int cells = 0;
  int rays = 0;
  bool sign_free = false;  // Poisson: +- ray columns
  bool scalar = false;     // r2 columns present

  int rows() const { return static_cast<int>(rhs.size()); }
  int columns() const { return static_cast<int>(cost->size()); }
  double col(int j, int k) const { return (*a)[static_cast<std::size_t>(j) * rhs.size() + k]; }
  const double* column(int j) const { return a->data() + static_cast<std::size_t>(j) * rhs.size(); }
};

enum class SolveStatus { Feasible, Infeasible, NonConverged };
std::string to_string(SolveStatus s);

struct SlabResult {
  SolveStatus status = SolveStatus::Feasible;
  int iterations = 0;
  double violation = 0;         // max_k |residual_k| / row_tol_k
  std::vector<double> weights;  // one per column
};

/// Minimum-norm point of the scaled residual over the budget polytope.
SlabResult solve_slab(const FeasibilityProblem& p, int max_iters);

struct ConversionOutcome {
  SolveStatus status = SolveStatus::Feasible;
  std::optional<DissWeakCert> cert;
  double violation = 0;             // worst over slabs
  int worst_slab = -1;
  std::vector<double> budget_slack;  // zeta - exact budget per sample
  std::vector<double> boundary_mass; // trace mass of r1 in boundary cells per sample
  std::string message;
};

/// The slab problems for a certificate, with the spatial parts of `battery`
/// as rows.
std::vector<FeasibilityProblem> assemble_problems(const EnVarCert& cert, const std::vector<TestFunction>& battery,
                                                  const SolverOptions& opt);

ConversionOutcome envar_to_diss(const EnVarCert& cert, const std::vector<TestFunction>& battery,
                                const SolverOptions& opt);

/// Same, with the standard battery for the certificate.
ConversionOutcome envar_to_diss(const EnVarCert& cert, const SolverOptions& opt);

/// Lower bound on the budget any defect needs at sample i, by weak duality over
/// the single rows and the aggregated row rhs.
double required_budget_lower_bound(const FeasibilityProblem& p);

}  // namespace gensol
