#pragma once

// Characters of the single-base tail algebra, product states, strict
// extension residuals, positive-definiteness checks, and character-based
// norm lower bounds.

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "itp/bracket.hpp"
#include "itp/tensor_core.hpp"

namespace itp::chars {

using fnalg::Cplx;
using tensor::StabSeq;
using tensor::StabSeqPtr;
using tensor::TensorElem;

// A point of the product space: finitely many explicit coordinates plus an
// explicit rule for the rest.
class PointSeq {
 public:
  enum class TailRule { InPlateau, Constant, Sampled };

  // tail coordinates sit inside every slot plateau (representative value 0)
  static PointSeq in_plateau(std::map<int, double> devs = {});
  static PointSeq constant(double c, std::map<int, double> devs = {});
  // tail coordinate n drawn from mu.at(n) with key (seed, stream n, counter
  // row); deterministic
  static PointSeq sampled(measures::ProductMeasure mu, std::uint64_t seed,
                          std::uint64_t row = 0,
                          std::map<int, double> devs = {});

  TailRule rule() const { return rule_; }
  double tail_constant() const { return c_; }
  double at(int n) const;  // 1-based
  const std::map<int, double>& devs() const { return devs_; }
  int max_dev() const { return devs_.empty() ? 0 : devs_.rbegin()->first; }

 private:
  PointSeq() = default;
  TailRule rule_ = TailRule::InPlateau;
  double c_ = 0.0;
  std::uint64_t seed_ = 0, row_ = 0;
  bool has_mu_ = false;
  measures::ProductMeasure mu_ = measures::ProductMeasure::iid(
      measures::Measure1D::uniform(-1.0, 1.0));
  std::map<int, double> devs_;
};

struct Character {
  PointSeq point;
  double q = 1.0;
  StabSeqPtr base;

  static Character make(PointSeq point, double q, StabSeqPtr base);
};

// Verdict on prod_{j>=start} f_j(x_j)^ell.  `bracket` always contains the
// product over the full range (zero factors included); `kind` classifies
// the tail: Limit means the deep tail stays away from 0, InNf means the
// deficit series certifiably diverges (exceptional point).
struct TailVerdict {
  enum class Kind { Limit, InNf, Undetermined };
  Kind kind = Kind::Undetermined;
  RealBracket bracket{0.0, 1.0};
  double deficit = 0.0;  // scanned deficit sum
  int scanned = 0;
};

TailVerdict tail_product(const PointSeq& x, const StabSeq& f, int ell,
                         int start, int depth, double tol = 1e-12,
                         const std::set<int>* exclude = nullptr);

struct CharEval {
  Cplx value{0.0, 0.0};
  double radius = 0.0;
  bool degenerate = false;    // some term hit an exceptional tail
  bool undetermined = false;  // some tail product had no verdict
};

// gamma(x, q): per term, deviation values times the tail product times
// q^ell; requires every non-unit tail to be a power of c.base.
CharEval char_eval(const Character& c, const TensorElem& a, int depth = 64,
                   double tol = 1e-12);

struct ProductState {
  measures::ProductMeasure measure;
};

// omega(x) = prod over supp(x) of the coordinate characteristic functions
ComplexDisk state_eval(const ProductState& s, const std::map<int, double>& x,
                       const measures::QuadratureCfg& cfg = {});

// |<Omega, eta(x) E_n Omega> - omega(x)| where E_n is the approximate
// identity with constant-1 slots through n and tail f beyond; the infinite
// tail is bracketed via the deficit rule to `depth` coordinates past the
// window.  Conservative: maximized over the tail bracket.
double strict_ext_residual(const ProductState& s, const StabSeq& f,
                           const std::map<int, double>& x, int n,
                           int depth = 64,
                           const measures::QuadratureCfg& cfg = {});

// smallest eigenvalue of the Hermitized Gram matrix [omega(x_i - x_j)]
double psd_min_eig(
    const std::vector<std::map<int, double>>& pts,
    const std::function<Cplx(const std::map<int, double>&)>& omega);
double psd_check(const ProductState& s,
                 const std::vector<std::map<int, double>>& pts,
                 const measures::QuadratureCfg& cfg = {});

// the shipped non-state: the product of coordinate box indicators; its
// Gram matrices go negative (no positive measure has this transform)
Cplx box_indicator(const std::map<int, double>& x);

// max over the characters of max(0, |value| - radius): a certified lower
// bound for any C*-norm of a's image.  Characters are validated against
// a's tail classes before the parallel sweep.
double char_sup_lower(const TensorElem& a, const std::vector<Character>& cs,
                      int depth = 64);

}  // namespace itp::chars
