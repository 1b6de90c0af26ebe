#include "itp/measures.hpp"

#include <cmath>
#include <complex>

#include "doctest.h"
#include "itp/fnalg.hpp"

using namespace itp;
using fnalg::Cplx;
using fnalg::PiecewisePoly;
using fnalg::Poly;
using fnalg::ScalarFn;
using measures::BudgetKind;
using measures::Measure1D;
using measures::ProductMeasure;
using measures::QuadratureCfg;

namespace {

// triangle density on [-1, 1], peak 1 at 0 (already unit mass)
PiecewisePoly triangle() {
  return PiecewisePoly::make({-1.0, 0.0, 1.0},
                             {Poly{{0.0, 1.0}}, Poly{{1.0, -1.0}}});
}

}  // namespace

TEST_SUITE_BEGIN("measures");

TEST_CASE("measure constructors validate their parameters") {
  CHECK_THROWS_AS(Measure1D::gaussian(0.0), InvalidArgError);
  CHECK_THROWS_AS(Measure1D::gaussian(-1.0), InvalidArgError);
  CHECK_THROWS_AS(Measure1D::uniform(2.0, 2.0), InvalidArgError);
  const auto neg = PiecewisePoly::make({0.0, 1.0}, {Poly{{-1.0, 2.0}}});
  CHECK_THROWS_AS(Measure1D::density(neg), InvalidArgError);
  QuadratureCfg bad;
  bad.abs_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgError);
}

TEST_CASE("densities are normalized to unit mass") {
  const auto twice = fnalg::pp_scale(triangle(), 2.0);
  const Measure1D a = Measure1D::density(triangle());
  const Measure1D b = Measure1D::density(twice);
  CHECK(a == b);
  CHECK(a.pdf().definite_integral(-1.0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("plateau mass matches erf values for the standard Gaussian") {
  const Measure1D g = Measure1D::gaussian(1.0);
  CHECK(measures::plateau_mass(g, 1.0) ==
        doctest::Approx(0.68268949213708585).epsilon(1e-14));
  CHECK(measures::plateau_mass(g, 2.0) ==
        doctest::Approx(0.95449973610364158).epsilon(1e-14));
  CHECK(measures::plateau_mass(g, 3.0) ==
        doctest::Approx(0.99730020393673979).epsilon(1e-14));
  CHECK(measures::plateau_mass(g, 0.0) == 0.0);

  const Measure1D u = Measure1D::uniform(-1.0, 3.0);
  CHECK(measures::plateau_mass(u, 2.0) == doctest::Approx(0.75));
  CHECK(measures::plateau_mass(u, 5.0) == 1.0);
}

TEST_CASE("characteristic functions match closed forms") {
  // Gaussian: e^{-sigma^2 x^2 / 2}
  const Cplx g = measures::char_fn(Measure1D::gaussian(1.3), 0.8);
  CHECK(g.real() == doctest::Approx(0.58228224020181329).epsilon(1e-14));
  CHECK(g.imag() == 0.0);

  // symmetric uniform: sin(x)/x
  const Measure1D u = Measure1D::uniform(-1.0, 1.0);
  const Cplx s = measures::char_fn(u, 0.7);
  CHECK(s.real() == doctest::Approx(0.92031098176813009).epsilon(1e-14));
  CHECK(std::abs(s.imag()) < 1e-16);

  // shifted uniform picks up a phase
  const Cplx sh = measures::char_fn(Measure1D::uniform(0.5, 2.0), 1.1);
  CHECK(sh.real() == doctest::Approx(0.1732176817508673).epsilon(1e-13));
  CHECK(sh.imag() == doctest::Approx(0.87334887231203118).epsilon(1e-13));

  // triangle density: (sin(x/2) / (x/2))^2, via quadrature
  const Measure1D tri = Measure1D::density(triangle());
  const Cplx t1 = measures::char_fn(tri, 1.0);
  CHECK(t1.real() == doctest::Approx(0.91939538826372047).epsilon(1e-10));
  CHECK(std::abs(t1.imag()) < 1e-10);
  const Cplx t2 = measures::char_fn(tri, 2.5);
  CHECK(t2.real() == doctest::Approx(0.5763659569750188).epsilon(1e-10));

  // x = 0 gives exactly 1 for every measure
  CHECK(measures::char_fn(u, 0.0) == Cplx{1.0, 0.0});
  CHECK(std::abs(measures::char_fn(tri, 0.0) - Cplx{1.0, 0.0}) < 1e-13);
}

TEST_CASE("bump integrals against the standard Gaussian") {
  const Measure1D g = Measure1D::gaussian(1.0);
  const ScalarFn v1 = fnalg::make_bump(1).fn;
  const ScalarFn v2 = fnalg::make_bump(2).fn;

  const auto i1 = measures::integrate(v1, g);
  CHECK(std::abs(i1.value - Cplx{0.85035046405828674, 0.0}) < 1e-10);
  CHECK(i1.err <= 1e-10);

  const auto i1sq = measures::integrate(fnalg::multiply(v1, v1), g);
  CHECK(std::abs(i1sq.value - Cplx{0.8058802309077564, 0.0}) < 1e-10);

  const auto i2 = measures::integrate(v2, g);
  CHECK(std::abs(i2.value - Cplx{0.98378290340043606, 0.0}) < 1e-10);
}

TEST_CASE("frequency-0 integrals against uniform measures are exact") {
  const Measure1D u = Measure1D::uniform(-2.0, 2.0);
  const ScalarFn v1 = fnalg::make_bump(1).fn;
  const auto iv = measures::integrate(v1, u);
  CHECK(iv.value.real() == 0.75);  // (plateau 2 + ramps 1) / length 4
  CHECK(iv.value.imag() == 0.0);
  CHECK(iv.err <= 2e-15);

  const auto c = measures::integrate(ScalarFn::constant(Cplx{2.0, -1.0}), u);
  CHECK(c.value == Cplx{2.0, -1.0});
  CHECK(c.err == 0.0);
}

TEST_CASE("quadrature failure reports the best estimate") {
  QuadratureCfg tight;
  tight.abs_tol = 1e-16;
  tight.max_segments = 8;
  const ScalarFn osc = fnalg::modulate(50.0, fnalg::make_bump(1).fn);
  CHECK_THROWS_AS(measures::integrate(osc, Measure1D::gaussian(1.0), tight),
                  QuadratureFailureError);
  try {
    measures::integrate(osc, Measure1D::gaussian(1.0), tight);
  } catch (const QuadratureFailureError& e) {
    CHECK(e.achieved_bound > 1e-16);
    CHECK(std::abs(e.best_estimate) < 1.0);
  }
}

TEST_CASE("product measures resolve coordinates through prefix and cycle") {
  const Measure1D g = Measure1D::gaussian(1.0);
  const Measure1D u = Measure1D::uniform(0.0, 1.0);
  const ProductMeasure mu = ProductMeasure::of({g, u}, {u, g, g});
  CHECK(mu.prefix_len() == 2);
  CHECK(mu.cycle_len() == 3);
  CHECK(mu.at(1) == g);
  CHECK(mu.at(2) == u);
  CHECK(mu.at(3) == u);   // cycle starts
  CHECK(mu.at(4) == g);
  CHECK(mu.at(5) == g);
  CHECK(mu.at(6) == u);   // cycle repeats
  CHECK(mu.at(8) == g);
  CHECK_THROWS_AS(mu.at(0), InvalidArgError);
  CHECK_THROWS_AS(ProductMeasure::of({g}, {}), InvalidArgError);

  const ProductMeasure iid = ProductMeasure::iid(g);
  CHECK(iid.prefix_len() == 0);
  CHECK(iid.cycle_len() == 1);
  CHECK(iid.at(1) == iid.at(97));
  CHECK(iid == ProductMeasure::of({}, {g}));
}

TEST_CASE("budget values and tail sums") {
  CHECK(measures::budget_value(BudgetKind::Pow2, 3) == 0.125);
  CHECK(measures::budget_value(BudgetKind::Quartic, 2) == 0.0625);
  CHECK_THROWS_AS(measures::budget_value(BudgetKind::Pow2, 0), InvalidArgError);

  // pow2 tail is exact: sum_{j > n} 2^-j = 2^-n
  CHECK(measures::budget_tail_sum(BudgetKind::Pow2, 0) == 1.0);
  CHECK(measures::budget_tail_sum(BudgetKind::Pow2, 5) == 0.03125);

  // quartic tail: zeta(4) at 0, then the 1/(3 n^3) integral bound
  const double z4 = measures::budget_tail_sum(BudgetKind::Quartic, 0);
  CHECK(z4 > 1.0823);
  CHECK(z4 < 1.0824);
  CHECK(measures::budget_tail_sum(BudgetKind::Quartic, 4) ==
        1.0 / (3.0 * 64.0));
  // the bound really dominates the series it replaces
  double tail = 0.0;
  for (int j = 5; j <= 4000; ++j)
    tail += measures::budget_value(BudgetKind::Quartic, j);
  CHECK(tail <= measures::budget_tail_sum(BudgetKind::Quartic, 4));
}

TEST_CASE("level selection under the quartic budget for iid Gaussian") {
  const ProductMeasure mu = ProductMeasure::iid(Measure1D::gaussian(1.0));
  const auto levels =
      measures::select_levels(mu, BudgetKind::Quartic, 12);
  CHECK(levels == std::vector<int>{1, 2, 3, 3, 4, 4, 4, 4, 4, 4, 4, 5});
  CHECK_THROWS_AS(measures::select_levels(mu, BudgetKind::Quartic, 12, 4),
                  HeavyTailError);
}

TEST_CASE("sampling is counter-based and reproducible") {
  const Measure1D u = Measure1D::uniform(-1.0, 2.0);
  const Measure1D g = Measure1D::gaussian(2.0);
  for (int c = 0; c < 200; ++c) {
    const double x = measures::sample_one(u, 7, 1, c);
    CHECK(x > -1.0);
    CHECK(x < 2.0);
  }
  CHECK(measures::sample_one(g, 7, 1, 3) == measures::sample_one(g, 7, 1, 3));
  CHECK(measures::sample_one(g, 7, 1, 3) != measures::sample_one(g, 7, 1, 4));
  CHECK(measures::sample_one(g, 7, 1, 3) != measures::sample_one(g, 8, 1, 3));

  // matrix entries agree with direct draws regardless of evaluation order
  const ProductMeasure mu = ProductMeasure::of({u}, {g});
  const auto m = measures::sample_matrix(mu, 5, 4, 99);
  REQUIRE(m.size() == 20);
  for (int r = 0; r < 4; ++r)
    for (int n = 1; n <= 5; ++n)
      CHECK(m[static_cast<std::size_t>(r) * 5 + (n - 1)] ==
            measures::sample_one(mu.at(n), 99, n, r));
  CHECK(m == measures::sample_matrix(mu, 5, 4, 99));

  // Gaussian draws land near the bulk: crude sanity on the mean
  double acc = 0.0;
  for (int c = 0; c < 4000; ++c) acc += measures::sample_one(g, 5, 2, c);
  CHECK(std::abs(acc / 4000.0) < 0.15);
}

TEST_SUITE_END();
