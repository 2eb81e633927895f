#pragma once

// Energies, regularity weights and weak-form residuals of the four systems.

#include <span>
#include <vector>

#include "gensol/domain.hpp"
#include "gensol/system_spec.hpp"

namespace gensol {

/// Density below this is vacuum; momentum there must vanish to the same level.
inline constexpr double kVacuum = 1e-14;

/// Cell values at one instant. For the incompressible system `rho` is empty
/// and `m` holds the velocity.
struct State {
  std::vector<double> rho;
  std::vector<Vec> m;

  friend bool operator==(const State&, const State&) = default;
};

/// States at every sample time of `time`.
struct Trajectory {
  Grid grid;
  TimeGrid time;
  std::vector<State> states;
};

/// Throws InputError when the state does not fit the system and grid, has
/// non-finite or negative density, or carries momentum in vacuum.
void validate_state(const SystemSpec& sys, const Grid& g, const State& s);
void validate_trajectory(const SystemSpec& sys, const Trajectory& tr);

/// |m|^2/(2 rho) + rho^gamma/(gamma-1); 0 at (0,0); +inf for rho = 0, m != 0.
double eta(double rho, const Vec& m, double gamma);

/// Total energy; +inf propagates from eta.
double energy(const SystemSpec& sys, const Grid& g, const State& s);

/// int alpha |m|^2/rho (zero unless Poisson with alpha > 0).
double friction_dissipation(const SystemSpec& sys, const Grid& g, const State& s);

/// Per-cell fields of one state that enter the weak forms.
struct SliceFields {
  std::vector<double> rho;    // empty for incompressible
  std::vector<Vec> m;         // momentum (velocity for incompressible)
  std::vector<SymMat> flux;   // everything paired with grad phi
  std::vector<Vec> capillary; // rho grad rho, paired with grad div phi (Korteweg)
  std::vector<Vec> drag;      // -alpha m, paired with phi (Poisson)
  double energy = 0;
  double friction = 0;
};

SliceFields slice_fields(const SystemSpec& sys, const Grid& g, const State& s);

/// Spatial integrals of one test function against one slice at time t.
struct SliceTerms {
  double mass_state = 0;  // int rho psi
  double mass_flux = 0;   // int rho psi_t + m . grad psi
  double mom_state = 0;   // int m . phi
  double mom_flux = 0;    // int m . phi_t + flux : grad phi (+ capillary, drag)
  double scale = 0;       // largest absolute integrand mass seen
};

SliceTerms slice_terms(const SystemSpec& sys, const Grid& g, const SliceFields& f, const TestFunction& tf,
                       double t);

/// Trapezoid weights for the sample indices s..t.
double trapezoid(std::span<const double> values, double dt, int s, int t);

/// -[int rho psi]_s^t + int_s^t int rho psi_t + m . grad psi (sample indices s < t).
double mass_residual(const SystemSpec& sys, const Trajectory& tr, const TestFunction& tf, int s, int t);

/// The weak momentum equation without defect terms, between sample indices s < t.
double momentum_residual(const SystemSpec& sys, const Trajectory& tr, const TestFunction& tf, int s, int t);

/// Regularity weight from sampled gradients (entry (i,j) = d phi_i/d x_j),
/// with the spectral norm pointwise and each sup taken before combining.
/// `finer` selects the finer Poisson weight.
double regweight_from_gradients(const SystemSpec& sys, std::span<const Mat> grads, bool finer = false);

/// Regularity weight of phi(., t), sup over cell centres and grid vertices.
double regweight(const SystemSpec& sys, const Grid& g, const TestFunction& tf, double t, bool finer = false);

}  // namespace gensol
