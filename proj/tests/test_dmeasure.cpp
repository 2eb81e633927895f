#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "gensol/dmeasure.hpp"
#include "test_support.hpp"

using namespace gensol;
using gensol::testing::Sampler;
using std::numbers::pi;

namespace {

DiscMeasure random_matrix_measure(const Grid& g, Sampler& rng, int atoms, bool psd) {
  DiscMeasure m(g, WeightKind::Matrix);
  for (int i = 0; i < g.cell_count(); ++i) m.set_density(i, psd ? rng.psd(g.dim) : rng.sym(g.dim));
  for (int a = 0; a < atoms; ++a) {
    Vec x{0, 0, 0};
    for (int k = 0; k < g.dim; ++k) x[k] = rng.uniform(0, g.extent[k]);
    m.add_atom(x, psd ? rng.psd(g.dim) : rng.sym(g.dim));
  }
  return m;
}

MatField random_smooth_field(int dim, Sampler& rng) {
  const SymMat a = rng.sym(dim), b = rng.sym(dim);
  const double k = rng.uniform(1, 4), s = rng.uniform(0, 2 * pi);
  return [=](const Vec& x) { return a + std::sin(k * x[0] + s) * std::cos(k * x[1]) * b; };
}

}  // namespace

TEST_CASE("total_variation examples") {
  const Grid g = Grid::unit(2, Topology::Box, 4);
  CHECK(total_variation(DiscMeasure(g, WeightKind::Matrix), MatNormKind::Trace) == 0);
  DiscMeasure atom(g, WeightKind::Matrix);
  atom.add_atom({0.5, 0.5, 0}, SymMat::identity(2));
  CHECK(total_variation(atom, MatNormKind::Trace) == doctest::Approx(2));
  const double c = 0.7;
  const DiscMeasure dens = DiscMeasure::matrix_density(g, std::vector<SymMat>(g.cell_count(), c * SymMat::identity(2)));
  CHECK(total_variation(dens, MatNormKind::MMax) == doctest::Approx(c));
  CHECK_THROWS_AS(total_variation(dens), InputError);
  CHECK_THROWS_AS(total_variation(DiscMeasure(g, WeightKind::Scalar), MatNormKind::Trace), InputError);
  DiscMeasure s(g, WeightKind::Scalar);
  s.add_atom({1, 1, 0}, -2.0);
  s.set_density(0, 16.0);
  CHECK(total_variation(s) == doctest::Approx(3));
}

TEST_CASE("total_variation is subadditive and absolutely homogeneous") {
  Sampler rng(1);
  const Grid g = Grid::unit(3, Topology::Torus, 3);
  for (int k = 0; k < 30; ++k) {
    const DiscMeasure a = random_matrix_measure(g, rng, 2, false), b = random_matrix_measure(g, rng, 3, false);
    const double s = rng.normal();
    for (auto kind : {MatNormKind::Spectral, MatNormKind::Trace, MatNormKind::Frobenius, MatNormKind::MMax}) {
      CHECK(total_variation(a + b, kind) <= total_variation(a, kind) + total_variation(b, kind) + 1e-10);
      CHECK(total_variation(s * a, kind) == doctest::Approx(std::abs(s) * total_variation(a, kind)));
    }
  }
}

TEST_CASE("pair examples") {
  const Grid g = Grid::unit(2, Topology::Box, 5);
  DiscMeasure atom(g, WeightKind::Matrix);
  atom.add_atom({0.3, 0.4, 0}, SymMat::identity(2));
  CHECK(pair(atom, [](const Vec&) { return SymMat::diag({1, -1, 0}, 2); }) == doctest::Approx(0));
  const DiscMeasure leb = DiscMeasure::scalar_density(g, std::vector<double>(g.cell_count(), 1.0));
  CHECK(pair(leb, [](const Vec&) { return 1.0; }) == doctest::Approx(1));
  SymMat w(2);
  w.set(0, 1, 0.5);
  w.set(1, 1, 2);
  DiscMeasure at(g, WeightKind::Matrix);
  at.add_atom({1, 0, 0}, w);
  const SymMat phi = SymMat::diag({3, 4, 0}, 2) + SymMat::outer({1, 1, 0}, 2);
  CHECK(pair(at, [&](const Vec&) { return phi; }) == doctest::Approx(frob(phi, w)));
  CHECK_THROWS_AS(pair(at, [](const Vec&) { return 1.0; }), InputError);
}

TEST_CASE("cone_membership examples") {
  Sampler rng(2);
  const Grid g = Grid::unit(2, Topology::Box, 4);
  DiscMeasure m = random_matrix_measure(g, rng, 3, true);
  CHECK(cone_membership(m, MatCone::PSD));
  m.add_atom({0.1, 0.9, 0}, SymMat::diag({1, -1, 0}, 2));
  CHECK(!cone_membership(m, MatCone::PSD));
  const DiscMeasure s = DiscMeasure::scalar_density(g, std::vector<double>(g.cell_count(), 0.2));
  CHECK(cone_membership(s, MatCone::PSD));
}

TEST_CASE("cone_duality_test examples") {
  Sampler rng(3);
  const Grid g = Grid::unit(2, Topology::Box, 6);
  CHECK(cone_duality_test(random_matrix_measure(g, rng, 4, true), MatCone::PSD, 500, 1).holds);
  for (auto cone : {MatCone::PSD, MatCone::NSD, MatCone::IdentityRay, MatCone::FullSym})
    CHECK(cone_duality_test(DiscMeasure(g, WeightKind::Matrix), cone, 100, 2).holds);
  DiscMeasure bad(g, WeightKind::Matrix);
  const Vec x0{0.35, 0.6, 0};
  bad.add_atom(x0, SymMat::diag({1, -1, 0}, 2));
  const auto r = cone_duality_test(bad, MatCone::PSD, 500, 4);
  CHECK(!r.holds);
  CHECK(r.max_pairing > 0);
  // The explicit witness bump * diag(0,-1) centred at the atom.
  CHECK(pair(bad, [&](const Vec& x) {
          const double d2 = (x[0] - x0[0]) * (x[0] - x0[0]) + (x[1] - x0[1]) * (x[1] - x0[1]);
          return std::exp(-d2 / 0.01) * SymMat::diag({0, -1, 0}, 2);
        }) == doctest::Approx(1));
}

TEST_CASE("membership implies the duality test, for every cone") {
  Sampler rng(4);
  for (int dim : {1, 2, 3}) {
    const Grid g = Grid::unit(dim, dim == 2 ? Topology::Box : Topology::Torus, 4);
    for (int k = 0; k < 10; ++k) {
      DiscMeasure psd = random_matrix_measure(g, rng, 3, true);
      CHECK(cone_duality_test(psd, MatCone::PSD, 200, k).holds);
      CHECK(cone_duality_test(-1.0 * psd, MatCone::NSD, 200, k).holds);
      CHECK(cone_duality_test(random_matrix_measure(g, rng, 2, false), MatCone::FullSym, 50, k).holds);
      DiscMeasure ray(g, WeightKind::Matrix);
      for (int i = 0; i < g.cell_count(); ++i) ray.set_density(i, rng.uniform() * SymMat::identity(dim));
      ray.add_atom(g.center(0), 2.0 * SymMat::identity(dim));
      CHECK(cone_membership(ray, MatCone::IdentityRay));
      CHECK(cone_duality_test(ray, MatCone::IdentityRay, 200, k).holds);
    }
  }
}

TEST_CASE("sampled converse: non-members are caught with high probability") {
  Sampler rng(5);
  const Grid g = Grid::unit(2, Topology::Box, 6);
  int caught = 0, total = 0;
  for (int seed = 0; seed < 100; ++seed) {
    DiscMeasure m = 0.2 * random_matrix_measure(g, rng, 2, true);
    Vec x{rng.uniform(), rng.uniform(), 0};
    const double s = rng.uniform(0.1, 1.0);
    m.add_atom(x, s * SymMat::outer(rng.unit_vector(2), 2) - SymMat::outer(rng.unit_vector(2), 2) * (2 * s));
    if (cone_membership(m, MatCone::PSD)) continue;
    ++total;
    caught += cone_duality_test(m, MatCone::PSD, 500, seed).holds ? 0 : 1;
  }
  CHECK(total >= 90);
  CHECK(caught >= 0.99 * total);
}

TEST_CASE("rn_split partitions the measure") {
  Sampler rng(6);
  const Grid g = Grid::unit(2, Topology::Torus, 5);
  const DiscMeasure m = random_matrix_measure(g, rng, 4, false);
  const auto s = rn_split(m);
  CHECK(s.ac.atoms().empty());
  CHECK(s.singular.ac() == std::vector<SymMat>(g.cell_count(), SymMat(2)));
  for (int k = 0; k < 20; ++k) {
    const MatField f = random_smooth_field(2, rng);
    CHECK(std::abs(pair(s.ac, f) + pair(s.singular, f) - pair(m, f)) <= 1e-12);
  }
  DiscMeasure dens = random_matrix_measure(g, rng, 0, true);
  CHECK(rn_split(dens).singular.is_zero());
  DiscMeasure atoms(g, WeightKind::Matrix);
  atoms.add_atom({0.2, 0.2, 0}, SymMat::identity(2));
  CHECK(rn_split(atoms).ac.is_zero());
}

TEST_CASE("trace_adjust examples") {
  const Grid g = Grid::unit(2, Topology::Box, 4);
  const double c = 0.8;
  const DiscMeasure t = trace_adjust(DiscMeasure(g, WeightKind::Matrix), c);
  for (const auto& w : t.ac()) CHECK(frobenius_distance(w, c * SymMat::identity(2)) <= 1e-14);
  CHECK(total_trace(t) == doctest::Approx(2 * c).epsilon(1e-10));

  Sampler rng(7);
  const DiscMeasure r = random_matrix_measure(g, rng, 2, true);
  const DiscMeasure same = trace_adjust(r, total_trace(r) / 2);
  for (int i = 0; i < g.cell_count(); ++i) CHECK(frobenius_distance(same.ac()[i], r.ac()[i]) <= 1e-14);

  DiscMeasure atoms(g, WeightKind::Matrix);
  atoms.add_atom({0.5, 1.0, 0}, SymMat::diag({0.3, 0.2, 0}, 2));
  const double m = 0.5, zeta = m;
  const DiscMeasure adj = trace_adjust(atoms, zeta);
  CHECK(adj.ac()[0](0, 0) == doctest::Approx((2 * zeta - m) / 2));
  CHECK(adj.ac()[0](0, 1) == 0);
  CHECK(total_trace(adj) == doctest::Approx(2 * zeta).epsilon(1e-10));
  CHECK(cone_membership(adj, MatCone::PSD));
  CHECK_THROWS_AS(trace_adjust(atoms, 0.2), InputError);
}

TEST_CASE("trace_adjust is invisible to divergence-free test functions") {
  Sampler rng(8);
  const SystemSpec sys{};
  double prev = 0;
  for (int n : {8, 16, 32}) {
    const Grid g = Grid::unit(2, Topology::Box, n);
    const DiscMeasure r = random_matrix_measure(g, rng, 2, true);
    const DiscMeasure adj = trace_adjust(r, total_trace(r) / 2 + 1.5);
    const auto bat = battery(sys, g, 6, 11);
    double worst = 0;
    for (const auto& f : bat) {
      const MatField grad = [&](const Vec& x) { return SymMat::sym_part(f.grad_phi(x, 0.2)); };
      worst = std::max(worst, std::abs(pair(adj, grad) - pair(r, grad)));
    }
    CHECK(worst <= 10 * g.h() * g.h());
    prev = worst;
  }
  CHECK(prev >= 0);
}
