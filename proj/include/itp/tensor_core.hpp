#pragma once

// Normal-form calculus for elementary tensors with stabilizing tails:
// linear combinations, products, involution, equivalence classes and
// grading, finite-window projection, translation action, norm bounds.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "itp/errors.hpp"
#include "itp/fnalg.hpp"
#include "itp/measures.hpp"

namespace itp::tensor {

using fnalg::Cplx;
using fnalg::ScalarFn;

// Classification of a nonnegative deficit series sum(1 - slot integrals).
struct TailDeficit {
  enum class Kind { Zero, Bounded, Divergent, Unknown };
  Kind kind = Kind::Unknown;
  double bound = 0.0;  // valid upper bound for Zero (0) and Bounded

  static TailDeficit zero() { return {Kind::Zero, 0.0}; }
  static TailDeficit bounded(double b) {
    return b <= 0.0 ? zero() : TailDeficit{Kind::Bounded, b};
  }
  static TailDeficit divergent() { return {Kind::Divergent, 0.0}; }
  static TailDeficit unknown() { return {Kind::Unknown, 0.0}; }
  bool summable() const {
    return kind == Kind::Zero || kind == Kind::Bounded;
  }
  // Sum of two nonnegative series: divergence dominates, unknown infects.
  TailDeficit combined(const TailDeficit& o) const;
  // Deficit of the pointwise power: 1 - f^l <= l * (1 - f).
  TailDeficit scaled(int l) const;
};

// A level sequence n -> k_n defining the stabilizing slot bumps.  Either an
// explicit eventually periodic rule, or levels materialized to a finite
// depth by the summable-deficit selector for a product measure.
class StabSeq {
 public:
  static std::shared_ptr<const StabSeq> constant_level(int level);
  static std::shared_ptr<const StabSeq> periodic(std::vector<int> prefix,
                                                 std::vector<int> cycle);
  static std::shared_ptr<const StabSeq> budget_selected(
      const measures::ProductMeasure& mu, measures::BudgetKind budget,
      int depth);

  int level(int n) const;  // 1-based; DepthExceededError past materialized
  fnalg::ScalarFn slot_fn(int n) const { return fnalg::make_bump(level(n)).fn; }
  const std::string& key() const { return key_; }
  bool is_periodic() const { return periodic_; }
  int materialized_depth() const;  // 0 when the rule covers every n

  // Largest L with level(n) >= L guaranteed for all n > from (weak level
  // monotonicity per residue class for budget-selected sequences).
  int level_floor_beyond(int from) const;

  // Classification of sum_{n > beyond} (1 - plateau_mass(mu_n, level(n))).
  TailDeficit deficit_beyond(const measures::ProductMeasure& mu,
                             int beyond) const;
  bool selected_for(const measures::ProductMeasure& mu) const;
  measures::BudgetKind budget() const { return budget_kind_; }

  // serialization support
  const std::vector<int>& prefix_levels() const { return prefix_; }
  const std::vector<int>& cycle_levels() const { return cycle_; }
  const measures::ProductMeasure* selection_measure() const {
    return selected_ ? &mu_ : nullptr;
  }

 private:
  StabSeq() = default;
  bool periodic_ = false;
  std::vector<int> prefix_;  // periodic: prefix+cycle; budget: all levels
  std::vector<int> cycle_;
  bool selected_ = false;
  measures::ProductMeasure mu_ = measures::ProductMeasure::iid(
      measures::Measure1D::uniform(-1.0, 1.0));
  measures::BudgetKind budget_kind_ = measures::BudgetKind::Quartic;
  std::string key_;
};

using StabSeqPtr = std::shared_ptr<const StabSeq>;

// One tail factor: a level sequence raised to a positive exponent.
struct TailFactor {
  StabSeqPtr base;
  int exp = 1;
};

// A commutative product of tail factors in canonical key order.  The empty
// product is the all-ones unit tail.
class TailSpec {
 public:
  static TailSpec unit() { return TailSpec{}; }
  static TailSpec power(StabSeqPtr base, int exp);

  bool is_unit() const { return factors_.empty(); }
  const std::vector<TailFactor>& factors() const { return factors_; }
  const TailFactor* single() const {
    return factors_.size() == 1 ? &factors_[0] : nullptr;
  }
  int exponent_on(const std::string& base_key) const;
  int total_exponent() const;

  ScalarFn slot_fn(int n) const;
  double slot_value(int n, double x) const;
  TailDeficit deficit_beyond(const measures::ProductMeasure& mu,
                             int beyond) const;
  const std::string& key() const { return key_; }

  friend TailSpec operator*(const TailSpec& a, const TailSpec& b);
  friend bool operator==(const TailSpec& a, const TailSpec& b) {
    return a.key_ == b.key_;
  }

 private:
  void rebuild_key();
  std::vector<TailFactor> factors_;
  std::string key_ = "1";
};

// coeff * (x_1 (x) x_2 (x) ...) where x_n is the tail slot function except
// at the finitely many deviation slots.
struct ElemTensor {
  TailSpec tail;
  std::map<int, ScalarFn> devs;  // 1-based slot -> function
  Cplx coeff{1.0, 0.0};

  ScalarFn slot_fn(int n) const {
    auto it = devs.find(n);
    return it != devs.end() ? it->second : tail.slot_fn(n);
  }
  int max_dev() const { return devs.empty() ? 0 : devs.rbegin()->first; }
};

// Normalized linear combination of elementary tensors, grouped by tail
// class, like deviation maps merged, zero terms dropped.
class TensorElem {
 public:
  TensorElem() = default;
  static TensorElem zero() { return TensorElem{}; }
  static TensorElem of(ElemTensor t);
  static TensorElem make(std::vector<ElemTensor> terms);

  const std::vector<ElemTensor>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // all terms in one tail class: that class
  const TailSpec* homogeneous_class() const;

 private:
  std::vector<ElemTensor> terms_;
};

TensorElem tensor_add(const TensorElem& a, const TensorElem& b);
TensorElem tensor_sub(const TensorElem& a, const TensorElem& b);
TensorElem tensor_scale(const TensorElem& a, Cplx s);
TensorElem tensor_mul(const TensorElem& a, const TensorElem& b);
TensorElem tensor_adjoint(const TensorElem& a);
bool tensor_equal(const TensorElem& a, const TensorElem& b,
                  double tol = fnalg::kNormTol);

// Same tail class: differ in finitely many slots.
bool equivalent(const ElemTensor& x, const ElemTensor& y);

// Projection onto the span of tensors in base's class restricted to the
// window F; off-window slots are contracted by evaluation at 0 (every
// admissible tail slot equals 1 there).
struct FiniteTensor {
  std::vector<int> slots;  // sorted window
  struct Term {
    Cplx coeff{0.0, 0.0};
    std::vector<ScalarFn> fns;  // aligned with slots
  };
  std::vector<Term> terms;
};

FiniteTensor window_project(const TensorElem& a, const ElemTensor& base,
                            std::vector<int> window);
FiniteTensor finite_mul(const FiniteTensor& a, const FiniteTensor& b);
bool finite_equal(const FiniteTensor& a, const FiniteTensor& b,
                  double tol = fnalg::kNormTol);

// Two-path block-decomposition check at the cut: window(mul(a,b), {1..cut})
// against finite_mul(window(a), window(b)).  Both inputs must be
// homogeneous; a deviation beyond the cut raises WindowTooSmallError.
bool regroup_check(const TensorElem& a, const TensorElem& b, int cut,
                   double tol = 1e-9);

// Translation action: slot j gains the frequency x_j.
TensorElem eta_act(const std::map<int, double>& x, const TensorElem& a);

// sum over terms of |coeff| * prod over deviations of certified sup-norm
// upper bounds; tail slots have sup norm exactly 1.
double cross_norm_upper(const TensorElem& a, int refinement = 64);

// JSON interchange (nlohmann text), round-trip exact at %.17g.
std::string tensor_to_json(const TensorElem& a);
TensorElem tensor_from_json(const std::string& text);
std::string scalar_fn_to_json(const ScalarFn& f);
ScalarFn scalar_fn_from_json(const std::string& text);

}  // namespace itp::tensor
