#pragma once

// Matrix elements of the tail-limit operators in product representations:
// inner products with certified tail brackets, the monotone window limits
// F, their projection limit P, the excess operator Q built from the tail
// units B_n, the two-formula pi_Q evaluation, and the excess semigroup law.
// Hilbert spaces are never materialized; every operator here is a diagonal
// elementary tensor, so all limits are scalar infinite products of 1-D
// integrals.

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "itp/bracket.hpp"
#include "itp/chars_states.hpp"
#include "itp/tensor_core.hpp"

namespace itp::rep {

using fnalg::Cplx;
using fnalg::ScalarFn;
using tensor::StabSeqPtr;

// Finite linear combination of vectors differing from the constant-1
// stabilizing sequence in finitely many slots.
struct VecElem {
  struct VTerm {
    Cplx coeff{1.0, 0.0};
    std::map<int, ScalarFn> slots;  // 1-based deviations from constant 1
  };
  measures::ProductMeasure ambient;
  std::vector<VTerm> terms;

  static VecElem vacuum(measures::ProductMeasure mu);
  int max_slot() const;
};

// base vector with diagonal operators applied in order; slot functions
// multiply, tails accumulate into a combined tail class
struct LazyVec {
  VecElem base;
  std::vector<tensor::ElemTensor> applied;
};

struct InnerResult {
  Cplx value{0.0, 0.0};
  double radius = 0.0;
  tensor::TailDeficit tail = tensor::TailDeficit::zero();
  RealBracket tail_bracket{1.0, 1.0};  // bracket used for the infinite tail
};

InnerResult inner(const VecElem& u, const VecElem& v,
                  const measures::QuadratureCfg& cfg = {});
InnerResult inner_lazy(const VecElem& u, const LazyVec& v, int depth = 64,
                       const measures::QuadratureCfg& cfg = {});

// sum_t |(u_t, v_t) - 1| convergence verdict; `remainder` is the caller's
// analytic bound on the unscanned part of the series.
struct SeriesVerdict {
  enum class Kind { Convergent, Divergent, Undetermined };
  Kind kind = Kind::Undetermined;
  double partial = 0.0;
  int scanned = 0;
};

SeriesVerdict vn_equiv(const measures::ProductMeasure& mu,
                       const std::function<ScalarFn(int)>& u,
                       const std::function<ScalarFn(int)>& v, int depth,
                       double tol = 1e-12,
                       tensor::TailDeficit remainder =
                           tensor::TailDeficit::unknown(),
                       const measures::QuadratureCfg& cfg = {});

// window operator prod_{j=k}^{n} pi_j(f_j^ell): unit tail, window devs
tensor::ElemTensor f_window_op(const StabSeqPtr& f, int ell, int k, int n);
// tail operator F_k^(ell): tail f^ell with constant-1 slots before k
tensor::ElemTensor f_tail_op(const StabSeqPtr& f, int ell, int k);

// <u, F_k^(ell) v> with certified tail bracket
InnerResult f_elem(const StabSeqPtr& f, int ell, int k, const VecElem& u,
                   const VecElem& v, int depth = 64,
                   const measures::QuadratureCfg& cfg = {});

// vacuum partial values <Omega, prod_{j=k}^{n} pi_j(f_j^ell) Omega> for
// n = k..N; factors are clamped to [0,1], so the returned sequence is
// nonincreasing exactly in floating point.
std::vector<double> f_elem_partials_vacuum(
    const StabSeqPtr& f, int ell, int k, const measures::ProductMeasure& mu,
    int N, const measures::QuadratureCfg& cfg = {});

// P[f] = lim_k F_k^(ell), evaluated at k_max with independence checks
struct ProjReport {
  InnerResult value;       // F at k_max, ell = 1
  double ell_spread = 0.0; // max deviation across ell in {2,3}
  double idem_gap = 0.0;   // |F(k,1) - F(k,2)|: P vs P^2
  double slack = 0.0;      // combined bracket slack of the comparisons
};

ProjReport p_elem(const StabSeqPtr& f, const VecElem& u, const VecElem& v,
                  int k_max = 8, int depth = 64,
                  const measures::QuadratureCfg& cfg = {});

// <u, B_n v> rows for the tail units B_n = pi~(1 x...x 1 x f_n^ell x ...)
// plus the classified limit <u, Q v>
struct ExcessRow {
  int n = 0;
  Cplx value{0.0, 0.0};
  double lo = 0.0, hi = 0.0;  // containment interval for the real part
  double radius = 0.0;
};

struct ExcessResult {
  std::vector<ExcessRow> rows;
  ComplexDisk limit;
  tensor::TailDeficit tail = tensor::TailDeficit::unknown();
};

ExcessResult excess_elem(const StabSeqPtr& f, int ell, const VecElem& u,
                         const VecElem& v, int n_max = 16, int depth = 64,
                         const measures::QuadratureCfg& cfg = {});

// character representation: Q acts as q^ell times the tail indicator
struct CharExcess {
  double value = 0.0;
  bool degenerate = false;
  bool undetermined = false;
};

CharExcess excess_char(const chars::Character& c, int ell, int depth = 64);

// pi_Q(A) matrix element by the two independent formulas:
// path1 = window [1..m] times F_{m+1}^(ell) times q^ell,
// path2 = limit of full windows [1..n] times q^ell with reversed
// accumulation order.
struct PiQResult {
  ComplexDisk path1, path2;
  double residual = 0.0;
  double slack = 0.0;
};

PiQResult piq_eval(const tensor::TensorElem& a, double q, const VecElem& u,
                   const VecElem& v, int depth = 64,
                   const measures::QuadratureCfg& cfg = {});

// |<u, Q_f Q_g v> - <u, Q_{f g} v>|: left side through staggered lazy
// application of the two tail units, right side through the combined tail
struct SemigroupCheck {
  ComplexDisk lhs, rhs;
  double residual = 0.0;
  double slack = 0.0;
};

SemigroupCheck excess_semigroup_check(const StabSeqPtr& f,
                                      const StabSeqPtr& g, const VecElem& u,
                                      const VecElem& v, int depth = 64,
                                      const measures::QuadratureCfg& cfg = {});

}  // namespace itp::rep
