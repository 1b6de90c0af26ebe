#include "itp/bm_pipeline.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "doctest.h"
#include "itp/chars_states.hpp"
#include "itp/measures.hpp"
#include "itp/tensor_core.hpp"

using namespace itp;
using chars::ProductState;
using fnalg::Cplx;
using measures::Measure1D;
using measures::ProductMeasure;
using tensor::StabSeq;
using tensor::StabSeqPtr;

namespace {

ProductState gauss_state() {
  return ProductState{ProductMeasure::iid(Measure1D::gaussian(1.0))};
}

}  // namespace

TEST_SUITE_BEGIN("bm_pipeline");

TEST_CASE("the selector materializes quartic-budget levels") {
  const StabSeqPtr f = bm::choose_f(gauss_state(), 12);
  CHECK(f->materialized_depth() == 12);
  CHECK(f->prefix_levels() ==
        std::vector<int>{1, 2, 3, 3, 4, 4, 4, 4, 4, 4, 4, 5});
}

TEST_CASE("tail residuals obey the 1/(k-1) bound for the selected levels") {
  const ProductState s = gauss_state();
  const StabSeqPtr f = bm::choose_f(s, 200);
  const auto rows = bm::verify_tail(f, s, 2, 10, 200);
  REQUIRE(rows.size() == 9);
  for (const auto& r : rows) {
    CHECK(r.pass);
    CHECK(r.residual >= 0.0);
    CHECK(r.residual <= r.bound + r.slack);
  }
  CHECK(rows[0].k == 2);
  CHECK(rows[0].bound == 1.0);
  CHECK(rows[0].residual ==
        doctest::Approx(0.017792430463918651).epsilon(1e-6));
  CHECK(rows[3].k == 5);
  CHECK(rows[3].bound == 0.25);
  CHECK(rows[3].residual ==
        doctest::Approx(0.00010198155043805723).epsilon(1e-4));
  CHECK(rows[8].k == 10);
  CHECK(rows[8].residual ==
        doctest::Approx(3.1067797589878765e-05).epsilon(1e-3));
}

TEST_CASE("a fixed-level sequence flunks the tail check") {
  const ProductState s = gauss_state();
  const auto rows = bm::verify_tail(StabSeq::constant_level(1), s, 3, 4, 120);
  for (const auto& r : rows) {
    CHECK_FALSE(r.pass);
    CHECK(r.residual > 0.9);
  }
}

TEST_CASE("tail check validates its ranges") {
  const ProductState s = gauss_state();
  const StabSeqPtr f = bm::choose_f(s, 50);
  CHECK_THROWS_AS(bm::verify_tail(f, s, 0, 5, 50), InvalidArgError);
  CHECK_THROWS_AS(bm::verify_tail(f, s, 5, 2, 50), InvalidArgError);
  CHECK_THROWS_AS(bm::verify_tail(f, s, 2, 10, 8), InvalidArgError);
  // materialized depth must cover the last scanned coordinate
  CHECK_THROWS_AS(bm::verify_tail(f, s, 2, 10, 200), InvalidArgError);
  CHECK_THROWS_AS(bm::verify_tail(nullptr, s, 2, 10, 50), InvalidArgError);
}

TEST_CASE("monte-carlo rows match the closed transform within the band") {
  const ProductState s = gauss_state();
  const std::vector<std::map<int, double>> xs{
      {{1, 0.7}, {2, -1.3}},
      {{1, -0.7}, {2, 1.3}},
      {},
  };
  const auto rows = bm::mc_verify(s, xs, 4000, 11, 4);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.pass);
    CHECK(r.radius == doctest::Approx(4.0 / std::sqrt(4000.0)));
  }
  // negated point: the shared sample matrix gives the exact conjugate
  CHECK(rows[1].estimate == std::conj(rows[0].estimate));
  CHECK(rows[1].closed == std::conj(rows[0].closed));
  // empty support: both sides are exactly 1
  CHECK(rows[2].estimate == Cplx{1.0, 0.0});
  CHECK(rows[2].closed == Cplx{1.0, 0.0});
  CHECK(rows[2].closed_err == 0.0);

  // reruns with the same seed are bitwise identical
  const auto again = bm::mc_verify(s, xs, 4000, 11, 4);
  CHECK(again[0].estimate == rows[0].estimate);

  CHECK_THROWS_AS(bm::mc_verify(s, {{{5, 1.0}}}, 100, 1, 4), InvalidArgError);
  CHECK_THROWS_AS(bm::mc_verify(s, xs, 0, 1, 4), InvalidArgError);
}

TEST_CASE("the full decomposition pipeline passes for the iid Gaussian") {
  const ProductState s = gauss_state();
  bm::DecomposeCfg cfg;
  cfg.depth = 32;
  cfg.tail_n = 200;
  cfg.samples = 4000;
  cfg.push_elems = 2;
  cfg.push_samples = 2000;
  cfg.seed = 7;
  cfg.points = {{{1, 0.7}, {2, -1.3}}, {{3, 0.25}}};

  const bm::DecompositionReport rep = bm::decompose(s, cfg);
  CHECK(rep.pass);
  CHECK(rep.levels_pass);
  CHECK(rep.tail_pass);
  CHECK(rep.mc_pass);
  CHECK(rep.push_pass);
  CHECK(rep.error.empty());
  CHECK(rep.measure_key == s.measure.key());
  CHECK(rep.depth == 32);
  CHECK(rep.seed == 7);
  REQUIRE(rep.levels.size() == 200);
  CHECK(rep.levels[0] == 1);
  CHECK(rep.levels[1] == 2);
  CHECK(rep.tail.size() == 9);
  CHECK(rep.mc.size() == 2);
  REQUIRE(rep.push.size() == 2);
  // window elements against the vacuum: certified product of bump means
  CHECK(rep.push[0].closed.real() ==
        doctest::Approx(0.85035046405828674).epsilon(1e-9));
  CHECK(rep.push[1].closed.real() ==
        doctest::Approx(0.85035046405828674 * 0.98378290340043606)
            .epsilon(1e-9));
}

TEST_CASE("stage failures are recorded, not thrown") {
  const ProductState s = gauss_state();
  bm::DecomposeCfg cfg;
  cfg.depth = 8;
  cfg.tail_n = 50;
  cfg.samples = 100;
  cfg.push_elems = 1;
  cfg.push_samples = 100;
  cfg.quad.abs_tol = -1.0;  // poisons every quadrature stage
  const bm::DecompositionReport rep = bm::decompose(s, cfg);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.tail_pass);
  CHECK(rep.error.rfind("tail:", 0) == 0);
  // the levels stage ran before the poisoned quadrature
  CHECK(rep.levels_pass);
}

TEST_SUITE_END();
