#pragma once

// Generator certificates with known verification outcomes.

#include <cstdint>

#include "gensol/certify.hpp"

namespace gensol {

/// Vanishing state (vacuum for compressible systems) with E = 0.
EnVarCert example_zero(const SystemSpec& sys, const Grid& g, const TimeGrid& t);

/// v = (sin 2 pi y / L_y, 0[, 0]) on a torus, an exact steady Euler solution; E = energy.
EnVarCert example_shear(const Grid& g, const TimeGrid& t);

/// rho = rho0, m = 0, E = energy: exact for every compressible system.
EnVarCert example_constant_state(const SystemSpec& sys, const Grid& g, const TimeGrid& t, double rho0 = 1.0);

/// v = 0, E = c, with the explicit isotropic Reynolds defect (2c/(d|Omega|)) I dx.
DissWeakCert example_energy_jump(const Grid& g, const TimeGrid& t, double c = 1.0);

/// Euler-Poisson on a torus: rho = rho0 uniform, m = m0 exp(-alpha t) uniform,
/// an exact solution with friction; E = energy.
EnVarCert example_poisson_mms(const SystemSpec& sys, const Grid& g, const TimeGrid& t, double rho0 = 1.0,
                              Vec m0 = {0.3, -0.2, 0.1});

/// v = (a e^{-beta t} sin 2 pi y / L_y, 0[, 0]) on a torus (d >= 2). The decay is
/// carried by the Reynolds defect [[c, g], [g, c]] with
/// g = -a beta e^{-beta t} (L_y / 2 pi) cos(2 pi y / L_y) and c = kappa max|g|,
/// kappa >= 1; E = energy + c |Omega| spends the trace budget exactly.
DissWeakCert example_decaying_shear(const Grid& g, const TimeGrid& t, double a, double beta, double kappa);

/// Seeded incompressible certificate: a decaying shear plus isotropic defects
/// c(x, t) I dx and atoms w I (invisible to divergence-free test functions),
/// with E = energy + budget + a decreasing slack.
DissWeakCert example_random_dissweak(const Grid& g, const TimeGrid& t, std::uint64_t seed);

/// Compressible constant state with uniform defects r1 = c1 I dx, r2 = c2 dx
/// (both pair to zero with admissible test functions); E = energy + budget.
DissWeakCert example_uniform_defect(const SystemSpec& sys, const Grid& g, const TimeGrid& t, double c1, double c2);

/// Zero defects attached to an envar certificate.
DissWeakCert with_zero_defects(const EnVarCert& c);

}  // namespace gensol
