#include "itp/tensor_core.hpp"

#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "itp/fnalg.hpp"
#include "itp/measures.hpp"

using namespace itp;
using fnalg::Cplx;
using fnalg::ScalarFn;
using measures::BudgetKind;
using measures::Measure1D;
using measures::ProductMeasure;
using tensor::ElemTensor;
using tensor::StabSeq;
using tensor::StabSeqPtr;
using tensor::TailDeficit;
using tensor::TailSpec;
using tensor::TensorElem;

namespace {

const ProductMeasure& std_gauss() {
  static const ProductMeasure mu = ProductMeasure::iid(Measure1D::gaussian(1.0));
  return mu;
}

}  // namespace

TEST_SUITE_BEGIN("tensor_core");

TEST_CASE("deficit classes combine with divergence dominant") {
  using K = TailDeficit::Kind;
  CHECK(TailDeficit::zero().combined(TailDeficit::zero()).kind == K::Zero);
  const auto b = TailDeficit::bounded(0.25).combined(TailDeficit::bounded(0.5));
  CHECK(b.kind == K::Bounded);
  CHECK(b.bound == 0.75);
  CHECK(TailDeficit::divergent().combined(TailDeficit::bounded(1.0)).kind ==
        K::Divergent);
  CHECK(TailDeficit::divergent().combined(TailDeficit::unknown()).kind ==
        K::Divergent);
  CHECK(TailDeficit::unknown().combined(TailDeficit::bounded(1.0)).kind ==
        K::Unknown);
  CHECK(TailDeficit::bounded(0.0).kind == K::Zero);
  CHECK(TailDeficit::bounded(0.5).scaled(3).bound == 1.5);
  CHECK(TailDeficit::divergent().scaled(2).kind == K::Divergent);
  CHECK_THROWS_AS(TailDeficit::zero().scaled(0), InvalidArgError);
  CHECK(TailDeficit::bounded(0.5).summable());
  CHECK_FALSE(TailDeficit::unknown().summable());
}

TEST_CASE("level sequences resolve levels by rule") {
  const StabSeqPtr c2 = StabSeq::constant_level(2);
  CHECK(c2->level(1) == 2);
  CHECK(c2->level(1000) == 2);
  CHECK(c2->is_periodic());
  CHECK(c2->materialized_depth() == 0);
  CHECK(c2->level_floor_beyond(0) == 2);

  const StabSeqPtr p = StabSeq::periodic({5, 1}, {2, 3});
  CHECK(p->level(1) == 5);
  CHECK(p->level(2) == 1);
  CHECK(p->level(3) == 2);
  CHECK(p->level(4) == 3);
  CHECK(p->level(5) == 2);
  CHECK(p->level(6) == 3);
  CHECK(p->level_floor_beyond(2) == 2);
  CHECK_THROWS_AS(p->level(0), InvalidArgError);
  CHECK_THROWS_AS(StabSeq::periodic({1}, {}), InvalidArgError);
  CHECK_THROWS_AS(StabSeq::constant_level(0), InvalidLevelError);
}

TEST_CASE("budget-selected sequences materialize the chosen levels") {
  const StabSeqPtr f =
      StabSeq::budget_selected(std_gauss(), BudgetKind::Quartic, 12);
  CHECK_FALSE(f->is_periodic());
  CHECK(f->materialized_depth() == 12);
  CHECK(f->selected_for(std_gauss()));
  const std::vector<int> want{1, 2, 3, 3, 4, 4, 4, 4, 4, 4, 4, 5};
  for (int n = 1; n <= 12; ++n) CHECK(f->level(n) == want[n - 1]);
  CHECK_THROWS_AS(f->level(13), DepthExceededError);
  // slot functions are the bumps at the selected level
  CHECK(fnalg::sf_equal(f->slot_fn(2), fnalg::make_bump(2).fn, 0.0));
}

TEST_CASE("tail deficits classify by coverage and budget") {
  using K = TailDeficit::Kind;
  // fixed level against a Gaussian: a constant positive deficit diverges
  const auto d1 = StabSeq::constant_level(1)->deficit_beyond(std_gauss(), 0);
  CHECK(d1.kind == K::Divergent);
  // plateau covers the whole support: zero deficit
  const ProductMeasure box = ProductMeasure::iid(Measure1D::uniform(-1.0, 1.0));
  CHECK(StabSeq::constant_level(1)->deficit_beyond(box, 0).kind == K::Zero);
  // budget-selected: bounded by the budget tail sum
  const StabSeqPtr f =
      StabSeq::budget_selected(std_gauss(), BudgetKind::Quartic, 30);
  const auto db = f->deficit_beyond(std_gauss(), 0);
  CHECK(db.kind == K::Bounded);
  CHECK(db.bound <= measures::budget_tail_sum(BudgetKind::Quartic, 0));
  const auto db5 = f->deficit_beyond(std_gauss(), 5);
  CHECK(db5.summable());
  CHECK(db5.bound <= measures::budget_tail_sum(BudgetKind::Quartic, 5));
}

TEST_CASE("tail products are graded and commutative") {
  const StabSeqPtr f = StabSeq::constant_level(2);
  const StabSeqPtr g = StabSeq::constant_level(3);
  const TailSpec u = TailSpec::unit();
  const TailSpec f1 = TailSpec::power(f, 1);
  const TailSpec f2 = TailSpec::power(f, 2);
  CHECK(u.is_unit());
  CHECK((u * f1) == f1);
  CHECK((f1 * f2) == TailSpec::power(f, 3));
  CHECK((f1 * f2).single() != nullptr);
  CHECK((f1 * f2).single()->exp == 3);
  const TailSpec mixed = f1 * TailSpec::power(g, 2);
  CHECK(mixed.single() == nullptr);
  CHECK(mixed == (TailSpec::power(g, 2) * f1));
  CHECK(mixed.exponent_on(f->key()) == 1);
  CHECK(mixed.exponent_on(g->key()) == 2);
  CHECK(mixed.total_exponent() == 3);
  CHECK_THROWS_AS(TailSpec::power(f, 0), InvalidArgError);

  // slot function of a power is the pointwise power of the bump
  const double v = f2.slot_value(1, 2.5);
  CHECK(v == doctest::Approx(0.25));  // bump_2(2.5)^2
  CHECK(fnalg::sf_equal(f2.slot_fn(4),
                        fnalg::sf_pow(fnalg::make_bump(2).fn, 2), 1e-12));

  // power deficit scales the base deficit
  const auto d = f2.deficit_beyond(std_gauss(), 0);
  CHECK(d.kind == TailDeficit::Kind::Divergent);
}

TEST_CASE("tensor normal form merges like terms and drops zeros") {
  const StabSeqPtr f = StabSeq::constant_level(1);
  ElemTensor a{TailSpec::power(f, 1), {{1, fnalg::make_bump(2).fn}}, {2.0, 0.0}};
  ElemTensor b = a;
  b.coeff = {-1.0, 0.5};
  const TensorElem t = TensorElem::make({a, b});
  REQUIRE(t.terms().size() == 1);
  CHECK(t.terms()[0].coeff == Cplx{1.0, 0.5});

  ElemTensor c = a;
  c.coeff = {-2.0, 0.0};
  CHECK(TensorElem::make({a, c}).is_zero());

  // distinct tails stay separate and the class query reflects that
  ElemTensor d{TailSpec::power(f, 2), {}, {1.0, 0.0}};
  const TensorElem two = TensorElem::make({a, d});
  CHECK(two.terms().size() == 2);
  CHECK(two.homogeneous_class() == nullptr);
  CHECK(TensorElem::of(a).homogeneous_class() != nullptr);
  CHECK(*TensorElem::of(a).homogeneous_class() == TailSpec::power(f, 1));
}

TEST_CASE("tensor algebra: linearity, products, involution") {
  const StabSeqPtr f = StabSeq::constant_level(1);
  const ScalarFn v1 = fnalg::make_bump(1).fn;
  const ScalarFn v2 = fnalg::make_bump(2).fn;
  const ScalarFn osc = fnalg::modulate(1.0, v2);

  const TensorElem a =
      TensorElem::of({TailSpec::power(f, 1), {{1, osc}}, {1.0, 1.0}});
  const TensorElem b =
      TensorElem::of({TailSpec::power(f, 1), {{2, v2}}, {0.0, 2.0}});

  // product multiplies slotwise: tails add grading, devs multiply
  const TensorElem p = tensor::tensor_mul(a, b);
  REQUIRE(p.terms().size() == 1);
  const ElemTensor& pt = p.terms()[0];
  CHECK(pt.tail == TailSpec::power(f, 2));
  CHECK(pt.coeff == Cplx{1.0, 1.0} * Cplx{0.0, 2.0});
  // slot 1: osc * V_1 (the other factor's tail slot) = modulate(1, V_1)
  CHECK(fnalg::sf_equal(pt.devs.at(1), fnalg::modulate(1.0, v1), 1e-12));
  // slot 2: V_1 * V_2 = V_1
  CHECK(fnalg::sf_equal(pt.devs.at(2), v1, 1e-12));

  // adjoint conjugates coefficients and slot functions
  const TensorElem aj = tensor::tensor_adjoint(a);
  CHECK(aj.terms()[0].coeff == Cplx{1.0, -1.0});
  CHECK(fnalg::sf_equal(aj.terms()[0].devs.at(1), fnalg::conj_fn(osc), 0.0));
  CHECK(tensor::tensor_equal(tensor::tensor_adjoint(aj), a, 0.0));

  // antimultiplicative: (ab)* = b* a*
  CHECK(tensor::tensor_equal(
      tensor::tensor_adjoint(tensor::tensor_mul(a, b)),
      tensor::tensor_mul(tensor::tensor_adjoint(b), tensor::tensor_adjoint(a)),
      1e-12));

  // linear structure
  const TensorElem s = tensor::tensor_add(a, tensor::tensor_scale(a, {1.0, 0.0}));
  CHECK(tensor::tensor_equal(s, tensor::tensor_scale(a, {2.0, 0.0}), 1e-12));
  CHECK(tensor::tensor_sub(a, a).is_zero());
  CHECK(tensor::tensor_mul(a, TensorElem::zero()).is_zero());
}

TEST_CASE("equivalence means same tail class up to finitely many slots") {
  const StabSeqPtr f = StabSeq::constant_level(1);
  const ElemTensor x{TailSpec::power(f, 1), {{3, fnalg::make_bump(2).fn}}, {1.0, 0.0}};
  const ElemTensor y{TailSpec::power(f, 1), {{7, fnalg::make_bump(3).fn}}, {2.0, 0.0}};
  const ElemTensor z{TailSpec::power(f, 2), {}, {1.0, 0.0}};
  CHECK(tensor::equivalent(x, y));
  CHECK_FALSE(tensor::equivalent(x, z));
}

TEST_CASE("window projection contracts off-window slots at the origin") {
  const StabSeqPtr f = StabSeq::constant_level(1);
  const ScalarFn v2 = fnalg::make_bump(2).fn;
  const ElemTensor base{TailSpec::power(f, 1), {}, {1.0, 0.0}};
  const TensorElem a =
      TensorElem::of({TailSpec::power(f, 1), {{2, v2}}, {3.0, 0.0}});
  const auto w = tensor::window_project(a, base, {1, 2});
  REQUIRE(w.terms.size() == 1);
  CHECK(w.slots == std::vector<int>{1, 2});
  CHECK(w.terms[0].coeff == Cplx{3.0, 0.0});
  REQUIRE(w.terms[0].fns.size() == 2);
  CHECK(fnalg::sf_equal(w.terms[0].fns[0], fnalg::make_bump(1).fn, 0.0));
  CHECK(fnalg::sf_equal(w.terms[0].fns[1], v2, 0.0));
}

TEST_CASE("block decomposition at a cut matches the projected product") {
  const StabSeqPtr f = StabSeq::constant_level(2);
  const ScalarFn v1 = fnalg::make_bump(1).fn;
  const TensorElem a = TensorElem::make(
      {{TailSpec::power(f, 1), {{1, v1}}, {1.0, 0.5}},
       {TailSpec::power(f, 1), {{2, fnalg::modulate(1.0, v1)}}, {0.5, 0.0}}});
  const TensorElem b =
      TensorElem::of({TailSpec::power(f, 1), {{2, v1}}, {2.0, -1.0}});
  CHECK(tensor::regroup_check(a, b, 3));
  CHECK(tensor::regroup_check(a, b, 2));
  // a deviation past the cut cannot be regrouped
  CHECK_THROWS_AS(tensor::regroup_check(a, b, 1), WindowTooSmallError);
  // mixed tail classes are rejected
  const TensorElem mixed = tensor::tensor_add(
      a, TensorElem::of({TailSpec::power(f, 2), {}, {1.0, 0.0}}));
  CHECK_THROWS_AS(tensor::regroup_check(mixed, b, 3), InvalidArgError);
}

TEST_CASE("translation action adds frequencies slotwise") {
  const StabSeqPtr f = StabSeq::constant_level(2);
  const ScalarFn v1 = fnalg::make_bump(1).fn;
  const TensorElem a =
      TensorElem::of({TailSpec::power(f, 1), {{1, v1}}, {1.0, 0.0}});
  const TensorElem moved = tensor::eta_act({{1, 0.7}, {3, -0.2}}, a);
  REQUIRE(moved.terms().size() == 1);
  const ElemTensor& t = moved.terms()[0];
  CHECK(fnalg::sf_equal(t.devs.at(1), fnalg::modulate(0.7, v1), 0.0));
  // untouched tail slot got materialized as a modulated bump
  CHECK(fnalg::sf_equal(t.devs.at(3),
                        fnalg::modulate(-0.2, fnalg::make_bump(2).fn), 0.0));
  CHECK(t.devs.find(2) == t.devs.end());
  // zero shift is the identity
  CHECK(tensor::tensor_equal(tensor::eta_act({{1, 0.0}}, a), a, 0.0));
  // unit-tail slots carry constant 1 off the deviations: no phase fits
  const TensorElem u = TensorElem::of({TailSpec::unit(), {}, {1.0, 0.0}});
  CHECK_THROWS_AS(tensor::eta_act({{1, 0.3}}, u), UnsupportedModulationError);
}

TEST_CASE("cross-norm upper bound multiplies certified sup norms") {
  const StabSeqPtr f = StabSeq::constant_level(1);
  const TensorElem plain =
      TensorElem::of({TailSpec::power(f, 1), {}, {1.0, 0.0}});
  CHECK(tensor::cross_norm_upper(plain) == 1.0);

  const TensorElem two = TensorElem::of(
      {TailSpec::power(f, 1), {{1, fnalg::make_bump(2).fn}}, {2.0, 0.0}});
  const double up = tensor::cross_norm_upper(two, 128);
  CHECK(up >= 2.0);
  CHECK(up < 2.2);

  const TensorElem sum = tensor::tensor_add(plain, two);
  CHECK(tensor::cross_norm_upper(sum, 128) ==
        doctest::Approx(1.0 + up).epsilon(1e-12));
}

TEST_CASE("json round trips preserve tensors exactly") {
  const ScalarFn osc = fnalg::sf_scale(
      fnalg::modulate(0.5, fnalg::make_bump(2).fn), Cplx{0.25, -1.75});
  const ScalarFn back = tensor::scalar_fn_from_json(tensor::scalar_fn_to_json(osc));
  CHECK(fnalg::sf_equal(back, osc, 0.0));

  const StabSeqPtr p = StabSeq::periodic({2}, {1, 3});
  const StabSeqPtr sel =
      StabSeq::budget_selected(std_gauss(), BudgetKind::Quartic, 8);
  const TensorElem a = TensorElem::make(
      {{TailSpec::power(p, 2) * TailSpec::power(sel, 1),
        {{1, osc}, {4, fnalg::make_bump(1).fn}},
        {0.5, 0.25}},
       {TailSpec::unit(), {}, {-1.0, 1.0 / 3.0}}});
  const TensorElem b = tensor::tensor_from_json(tensor::tensor_to_json(a));
  CHECK(tensor::tensor_equal(b, a, 0.0));
  // the selected sequence survives with its measure and levels
  REQUIRE(b.terms().size() == 2);
  const StabSeqPtr* found = nullptr;
  for (const auto& t : b.terms())
    for (const auto& fac : t.tail.factors())
      if (!fac.base->is_periodic()) found = &fac.base;
  REQUIRE(found != nullptr);
  CHECK((*found)->materialized_depth() == 8);
  CHECK((*found)->selected_for(std_gauss()));
}

TEST_SUITE_END();
