#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "gensol/certify.hpp"
#include "gensol/examples.hpp"
#include "test_support.hpp"

using namespace gensol;
using gensol::testing::Sampler;

namespace {

const SystemSpec kIncomp{};

VerifyOptions opts(const SystemSpec& sys, const Grid& g, const TimeGrid& t, int size = 10) {
  return VerifyOptions::standard(sys, g, t, size, 1);
}

MVCert mv_from_state(const Grid& g, const TimeGrid& t, const std::vector<Vec>& v) {
  MVCert m{kIncomp, g, t, {}};
  for (int i = 0; i < t.count(); ++i)
    m.slices.push_back(MVSlice{v, std::vector<SymMat>(g.cell_count(), SymMat(g.dim)),
                               DiscMeasure(g, WeightKind::Scalar), {}, {}});
  return m;
}

}  // namespace

TEST_CASE("verify_envar: v = 0 with constant E") {
  const Grid g = Grid::unit(2, Topology::Box, 8);
  const TimeGrid t{1.0, 4};
  EnVarCert c = example_zero(kIncomp, g, t);
  c.E.assign(t.count(), 0.7);
  const Report r = verify_envar(c, opts(kIncomp, g, t));
  CHECK(r.pass());
  // The inequality reduces to -K(phi) c (t - s) <= 0.
  CHECK(r.max_value("envar-inequality") <= 1e-14);

  c.E.assign(t.count(), -1.0);
  const Report bad = verify_envar(c, opts(kIncomp, g, t));
  CHECK(!bad.pass());
  CHECK(bad.clause_failed("energy-domination"));
}

TEST_CASE("verify_envar: shear flow passes and the residual is small") {
  for (int n : {16, 32}) {
    const Grid g = Grid::unit(2, Topology::Torus, n);
    const TimeGrid t{0.5, n / 2};
    const Report r = verify_envar(example_shear(g, t), opts(kIncomp, g, t));
    CHECK(r.pass());
    CHECK(r.max_value("envar-inequality") <= 10 * (g.h() * g.h() + t.dt() * t.dt()));
  }
}

TEST_CASE("verify_envar rejects malformed certificates") {
  const Grid g = Grid::unit(2, Topology::Torus, 4);
  const TimeGrid t{1.0, 2};
  EnVarCert c = example_zero(kIncomp, g, t);
  c.E.pop_back();
  CHECK_THROWS_AS(verify_envar(c, opts(kIncomp, g, t)), InputError);
  const SystemSpec iso{SystemKind::IsentropicEuler, 2, 0};
  EnVarCert v = example_constant_state(iso, g, t);
  v.traj.states[1].rho[0] = 0;
  v.traj.states[1].m[0] = {1, 0, 0};
  CHECK_THROWS_AS(verify_envar(v, opts(iso, g, t)), InputError);
}

TEST_CASE("verify_envar fails when the state is not a solution") {
  // A velocity jump between samples with constant E cannot satisfy the inequality for all phi.
  const Grid g = Grid::unit(2, Topology::Torus, 16);
  const TimeGrid t{0.5, 4};
  EnVarCert c = example_shear(g, t);
  for (int i = 2; i < t.count(); ++i)
    for (auto& v : c.traj.states[i].m) v[0] = -v[0];
  const Report r = verify_envar(c, opts(kIncomp, g, t, 16));
  CHECK(!r.pass());
  CHECK(r.clause_failed("envar-inequality"));
}

TEST_CASE("verify_dissweak examples") {
  const Grid g = Grid::unit(2, Topology::Box, 8);
  const TimeGrid t{1.0, 4};
  CHECK(verify_dissweak(with_zero_defects(example_zero(kIncomp, g, t)), opts(kIncomp, g, t)).pass());

  const DissWeakCert jump = example_energy_jump(g, t, 0.6);
  const Report ok = verify_dissweak(jump, opts(kIncomp, g, t));
  CHECK(ok.pass());
  CHECK(ok.max_value("defect-budget") <= 1e-12);

  DissWeakCert big = jump;
  for (auto& r : big.r1) r *= 1.1;
  const Report over = verify_dissweak(big, opts(kIncomp, g, t));
  CHECK(!over.pass());
  CHECK(over.clause_failed("defect-budget"));
  CHECK(!over.clause_failed("momentum"));

  DissWeakCert neg = jump;
  neg.r1[2].add_atom({0.5, 0.5, 0}, SymMat::diag({0.01, -0.01, 0}, 2));
  const Report cone = verify_dissweak(neg, opts(kIncomp, g, t));
  CHECK(cone.clause_failed("cone-r1"));

  DissWeakCert rising = jump;
  rising.base.E[3] = 0.9;
  for (auto& r : rising.r1) r *= 1.0;
  CHECK(verify_dissweak(rising, opts(kIncomp, g, t)).clause_failed("energy-monotone"));
}

TEST_CASE("verify_dissweak on exact compressible states with zero defects") {
  for (auto kind : {SystemKind::IsentropicEuler, SystemKind::EulerKorteweg, SystemKind::EulerPoisson}) {
    const SystemSpec sys{kind, 1.4, 0.0};
    const Grid g = Grid::unit(2, Topology::Box, 16);
    const TimeGrid t{1.0, 8};
    const EnVarCert c = example_constant_state(sys, g, t, 1.3);
    CHECK(verify_envar(c, opts(sys, g, t)).pass());
    CHECK(verify_dissweak(with_zero_defects(c), opts(sys, g, t)).pass());
  }
}

TEST_CASE("Poisson manufactured solution with friction") {
  const SystemSpec sys{SystemKind::EulerPoisson, 1.5, 0.8};
  const Grid g = Grid::unit(2, Topology::Torus, 16);
  const TimeGrid t{1.0, 16};
  const EnVarCert c = example_poisson_mms(sys, g, t);
  CHECK(c.E.front() > c.E.back());
  CHECK(verify_envar(c, opts(sys, g, t)).pass());
  CHECK(verify_dissweak(with_zero_defects(c), opts(sys, g, t)).pass());
  // Without friction in the model the decaying momentum is not a solution.
  const SystemSpec strong{SystemKind::EulerPoisson, 1.5, 2.0};
  const Grid fine = Grid::unit(2, Topology::Torus, 32);
  const TimeGrid ft{1.0, 32};
  EnVarCert frictionless = example_poisson_mms(strong, fine, ft, 1.0, {1.0, 0.5, 0});
  frictionless.system.alpha = 0;
  const Report r = verify_dissweak(with_zero_defects(frictionless), opts(frictionless.system, fine, ft));
  CHECK(r.clause_failed("momentum"));
  CHECK(!r.clause_failed("mass"));
}

TEST_CASE("verify_mv examples") {
  const Grid g = Grid::unit(2, Topology::Torus, 16);
  const TimeGrid t{0.5, 8};
  const EnVarCert sh = example_shear(g, t);
  CHECK(verify_mv(mv_from_state(g, t, sh.traj.states[0].m), opts(kIncomp, g, t)).pass());

  // v = 0, R = 0, lambda = 2c uniform with isotropic directions.
  const double c = 0.4;
  MVCert m = mv_from_state(g, t, std::vector<Vec>(g.cell_count(), Vec{0, 0, 0}));
  const SphereMeasure iso{{0.25, {1, 0, 0}}, {0.25, {-1, 0, 0}}, {0.25, {0, 1, 0}}, {0.25, {0, -1, 0}}};
  for (auto& s : m.slices) {
    s.lambda = DiscMeasure::scalar_density(g, std::vector<double>(g.cell_count(), 2 * c));
    s.angle_cells.assign(g.cell_count(), iso);
  }
  const Report ok = verify_mv(m, opts(kIncomp, g, t));
  CHECK(ok.pass());
  CHECK(jensen_gap(m, 0) == doctest::Approx(c));

  MVCert neg = m;
  neg.slices[3].lambda.add_atom({0.5, 0.5, 0}, -0.1);
  neg.slices[3].angle_atoms.push_back({{0.5, {1, 0, 0}}, {0.5, {-1, 0, 0}}});
  CHECK(verify_mv(neg, opts(kIncomp, g, t)).clause_failed("mv-lambda-nonneg"));

  MVCert bad_sphere = m;
  bad_sphere.slices[1].angle_cells[5][0].w = 0.5;
  CHECK(verify_mv(bad_sphere, opts(kIncomp, g, t)).clause_failed("mv-sphere"));

  MVCert missing = m;
  missing.slices[0].angle_cells.clear();
  CHECK_THROWS_AS(verify_mv(missing, opts(kIncomp, g, t)), InputError);
}

TEST_CASE("jensen_gap examples") {
  const Grid g = Grid::unit(2, Topology::Box, 4);
  const TimeGrid t{1, 2};
  MVCert m = mv_from_state(g, t, std::vector<Vec>(g.cell_count(), Vec{0, 0, 0}));
  CHECK(jensen_gap(m, 0) == 0);
  m.slices[0].cov.assign(g.cell_count(), SymMat::identity(2));
  CHECK(jensen_gap(m, 0) == doctest::Approx(1));
  m.slices[1].lambda.add_atom({0.2, 0.2, 0}, 1.2);
  m.slices[1].angle_atoms.push_back({{1, {1, 0, 0}}});
  CHECK(jensen_gap(m, 1) == doctest::Approx(0.6));
}

TEST_CASE("scaling consistency: a passing envar certificate passes for alpha * phi") {
  const Grid g = Grid::unit(2, Topology::Torus, 16);
  const TimeGrid t{0.5, 8};
  const EnVarCert c = example_shear(g, t);
  const VerifyOptions base = opts(kIncomp, g, t, 8);
  for (double a : {0.1, 1.0, 10.0, 100.0}) {
    VerifyOptions o = base;
    for (auto& f : o.battery) f = f.scaled(a);
    o.tol = base.tol.scaled(std::max(1.0, a));
    CHECK(verify_envar(c, o).pass());
  }
}

TEST_CASE("dissweak pass implies envar pass at twice the tolerance") {
  Sampler rng(3);
  const Grid g = Grid::unit(2, Topology::Box, 8);
  const TimeGrid t{1.0, 4};
  for (int k = 0; k < 5; ++k) {
    DissWeakCert d = example_energy_jump(g, t, rng.uniform(0.1, 2));
    // Decreasing E above the budget keeps the certificate valid.
    for (int i = 0; i < t.count(); ++i) d.base.E[i] += 0.1 * (t.count() - i);
    VerifyOptions o = opts(kIncomp, g, t);
    REQUIRE(verify_dissweak(d, o).pass());
    o.tol = o.tol.scaled(2);
    CHECK(verify_envar(d.base, o).pass());
  }
}

TEST_CASE("reports are deterministic") {
  const Grid g = Grid::unit(2, Topology::Torus, 8);
  const TimeGrid t{0.5, 4};
  const auto a = verify_envar(example_shear(g, t), opts(kIncomp, g, t));
  const auto b = verify_envar(example_shear(g, t), opts(kIncomp, g, t));
  REQUIRE(a.worst().size() == b.worst().size());
  for (std::size_t i = 0; i < a.worst().size(); ++i) {
    CHECK(a.worst()[i].value == b.worst()[i].value);
    CHECK(a.worst()[i].s == b.worst()[i].s);
  }
  CHECK(a.checks() == b.checks());
}
