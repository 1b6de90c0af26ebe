#include "itp/rep_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "itp/par.hpp"

namespace itp::rep {

namespace {

using measures::IntegralValue;
using measures::ProductMeasure;
using measures::QuadratureCfg;
using tensor::ElemTensor;
using tensor::TailDeficit;
using tensor::TailSpec;

// Certified bracket for the infinite product of slot integrals beyond the
// numeric window, from the deficit classification of the tail class.  Slot
// integrals there are plateau masses in [0, 1], so prod >= 1 - sum(deficit).
RealBracket tail_bracket_of(const TailDeficit& d) {
  switch (d.kind) {
    case TailDeficit::Kind::Zero:
      return RealBracket::exact(1.0);
    case TailDeficit::Kind::Bounded:
      return {std::max(0.0, 1.0 - d.bound), 1.0};
    case TailDeficit::Kind::Divergent:
      return RealBracket::exact(0.0);
    case TailDeficit::Kind::Unknown:
    default:
      return {0.0, 1.0};
  }
}

// less informative / larger deficit wins, for the diagnostic field
TailDeficit worse_of(const TailDeficit& a, const TailDeficit& b) {
  auto rank = [](const TailDeficit& d) {
    switch (d.kind) {
      case TailDeficit::Kind::Zero:
        return 0;
      case TailDeficit::Kind::Bounded:
        return 1;
      case TailDeficit::Kind::Divergent:
        return 2;
      default:
        return 3;
    }
  };
  if (rank(a) != rank(b)) return rank(a) > rank(b) ? a : b;
  if (a.kind == TailDeficit::Kind::Bounded)
    return TailDeficit::bounded(std::max(a.bound, b.bound));
  return a;
}

// Per-coordinate certified factors of <u_term, Op v_term> over the window
// [1, D].  Coordinates where every contribution is the constant 1 stay as
// exact unit disks.  The quadratures run in parallel; the caller multiplies
// in a fixed order, so results are bitwise reproducible.
std::vector<ComplexDisk> window_factors(const VecElem::VTerm& s,
                                        const VecElem::VTerm& t,
                                        const std::vector<ElemTensor>& ops,
                                        const ProductMeasure& mu, int d,
                                        const QuadratureCfg& cfg) {
  std::vector<ComplexDisk> fac(
      static_cast<std::size_t>(std::max(d, 0)),
      ComplexDisk::exact({1.0, 0.0}));
  par::guarded_for(d, [&](std::int64_t idx) {
    const int j = static_cast<int>(idx) + 1;
    bool any = false;
    ScalarFn h = ScalarFn::constant({1.0, 0.0});
    if (auto it = s.slots.find(j); it != s.slots.end()) {
      h = fnalg::multiply(h, fnalg::conj_fn(it->second));
      any = true;
    }
    for (const auto& op : ops) {
      if (op.devs.count(j) == 0 && op.tail.is_unit()) continue;
      h = fnalg::multiply(h, op.slot_fn(j));
      any = true;
    }
    if (auto it = t.slots.find(j); it != t.slots.end()) {
      h = fnalg::multiply(h, it->second);
      any = true;
    }
    if (!any) return;  // factor is exactly 1
    const IntegralValue iv = measures::integrate(h, mu.at(j), cfg);
    fac[static_cast<std::size_t>(idx)] = {iv.value, iv.err};
  });
  return fac;
}

int term_max_slot(const VecElem::VTerm& t) {
  return t.slots.empty() ? 0 : t.slots.rbegin()->first;
}

// numeric window depth for one term pair: covers all deviations, extends to
// `depth` when a nontrivial tail class remains, and never runs past the
// materialized levels of a budget-selected base
int window_depth(const VecElem::VTerm& s, const VecElem::VTerm& t,
                 const std::vector<ElemTensor>& ops, const TailSpec& opt,
                 int depth) {
  int w0 = std::max(term_max_slot(s), term_max_slot(t));
  for (const auto& op : ops) w0 = std::max(w0, op.max_dev());
  if (opt.is_unit()) return w0;
  int d = std::max(w0, depth);
  int cap = std::numeric_limits<int>::max();
  for (const auto& f : opt.factors())
    if (const int md = f.base->materialized_depth(); md > 0)
      cap = std::min(cap, md);
  if (d > cap) d = std::max(w0, cap);
  return d;
}

ComplexDisk ordered_product(Cplx c0, const std::vector<ComplexDisk>& fac,
                            bool descending) {
  ComplexDisk p = ComplexDisk::exact(c0);
  if (descending) {
    for (auto it = fac.rbegin(); it != fac.rend(); ++it) p = p * *it;
  } else {
    for (const auto& f : fac) p = p * f;
  }
  return p;
}

}  // namespace

VecElem VecElem::vacuum(measures::ProductMeasure mu) {
  VecElem v{std::move(mu), {}};
  v.terms.push_back(VTerm{});
  return v;
}

int VecElem::max_slot() const {
  int m = 0;
  for (const auto& t : terms) m = std::max(m, term_max_slot(t));
  return m;
}

InnerResult inner_lazy(const VecElem& u, const LazyVec& v, int depth,
                       const QuadratureCfg& cfg) {
  if (!(u.ambient == v.base.ambient))
    throw InvalidArgError("inner product needs matching ambient measures");
  if (depth < 0) throw InvalidArgError("depth must be nonnegative");
  cfg.validate();

  TailSpec opt = TailSpec::unit();
  Cplx opc{1.0, 0.0};
  for (const auto& op : v.applied) {
    opt = opt * op.tail;
    opc *= op.coeff;
  }

  InnerResult out;
  out.tail = TailDeficit::zero();
  out.tail_bracket = RealBracket::exact(1.0);
  bool first = true;
  for (const auto& s : u.terms) {
    for (const auto& t : v.base.terms) {
      const int d = window_depth(s, t, v.applied, opt, depth);
      const auto fac = window_factors(s, t, v.applied, u.ambient, d, cfg);
      const TailDeficit def =
          opt.is_unit() ? TailDeficit::zero() : opt.deficit_beyond(u.ambient, d);
      const RealBracket br = tail_bracket_of(def);
      const Cplx c0 = opc * std::conj(s.coeff) * t.coeff;
      const ComplexDisk pair =
          ordered_product(c0, fac, /*descending=*/false).mul_interval(br);
      out.value += pair.value;
      out.radius += pair.radius;
      out.tail = first ? def : worse_of(out.tail, def);
      out.tail_bracket = first ? br
                               : RealBracket{std::min(out.tail_bracket.lo, br.lo),
                                             std::max(out.tail_bracket.hi, br.hi)};
      first = false;
    }
  }
  return out;
}

InnerResult inner(const VecElem& u, const VecElem& v,
                  const QuadratureCfg& cfg) {
  return inner_lazy(u, LazyVec{v, {}}, 0, cfg);
}

SeriesVerdict vn_equiv(const ProductMeasure& mu,
                       const std::function<ScalarFn(int)>& u,
                       const std::function<ScalarFn(int)>& v, int depth,
                       double tol, TailDeficit remainder,
                       const QuadratureCfg& cfg) {
  if (depth < 1) throw InvalidArgError("depth must be >= 1");
  std::vector<double> summand(static_cast<std::size_t>(depth), 0.0);
  par::guarded_for(depth, [&](std::int64_t idx) {
    const int t = static_cast<int>(idx) + 1;
    const ScalarFn h = fnalg::multiply(fnalg::conj_fn(u(t)), v(t));
    const IntegralValue iv = measures::integrate(h, mu.at(t), cfg);
    summand[static_cast<std::size_t>(idx)] =
        std::abs(iv.value - Cplx{1.0, 0.0}) + iv.err;
  });
  SeriesVerdict sv;
  sv.scanned = depth;
  for (double x : summand) sv.partial += x;
  if (remainder.kind == TailDeficit::Kind::Divergent) {
    sv.kind = SeriesVerdict::Kind::Divergent;
  } else if (remainder.summable() && sv.partial < 1.0 / tol) {
    sv.kind = SeriesVerdict::Kind::Convergent;
  } else {
    sv.kind = SeriesVerdict::Kind::Undetermined;
  }
  return sv;
}

tensor::ElemTensor f_window_op(const StabSeqPtr& f, int ell, int k, int n) {
  if (!f) throw InvalidArgError("window operator needs a level sequence");
  if (ell < 1) throw InvalidArgError("exponent must be >= 1");
  if (k < 1) throw InvalidArgError("window start must be >= 1");
  if (n < k - 1) throw InvalidArgError("window end must be >= start - 1");
  ElemTensor op;  // unit tail
  for (int j = k; j <= n; ++j)
    op.devs[j] = fnalg::sf_pow(f->slot_fn(j), ell);
  return op;
}

tensor::ElemTensor f_tail_op(const StabSeqPtr& f, int ell, int k) {
  if (!f) throw InvalidArgError("tail operator needs a level sequence");
  if (ell < 1) throw InvalidArgError("exponent must be >= 1");
  if (k < 1) throw InvalidArgError("window start must be >= 1");
  ElemTensor op;
  op.tail = TailSpec::power(f, ell);
  for (int j = 1; j < k; ++j) op.devs[j] = ScalarFn::constant({1.0, 0.0});
  return op;
}

InnerResult f_elem(const StabSeqPtr& f, int ell, int k, const VecElem& u,
                   const VecElem& v, int depth, const QuadratureCfg& cfg) {
  return inner_lazy(u, LazyVec{v, {f_tail_op(f, ell, k)}}, depth, cfg);
}

std::vector<double> f_elem_partials_vacuum(const StabSeqPtr& f, int ell,
                                           int k,
                                           const ProductMeasure& mu, int n,
                                           const QuadratureCfg& cfg) {
  if (!f) throw InvalidArgError("partials need a level sequence");
  if (ell < 1) throw InvalidArgError("exponent must be >= 1");
  if (k < 1) throw InvalidArgError("window start must be >= 1");
  if (n < k) throw InvalidArgError("window end must be >= start");
  const int count = n - k + 1;
  std::vector<double> factor(static_cast<std::size_t>(count), 1.0);
  par::guarded_for(count, [&](std::int64_t idx) {
    const int j = k + static_cast<int>(idx);
    const ScalarFn h = fnalg::sf_pow(f->slot_fn(j), ell);
    const IntegralValue iv = measures::integrate(h, mu.at(j), cfg);
    factor[static_cast<std::size_t>(idx)] =
        std::clamp(iv.value.real(), 0.0, 1.0);
  });
  // running products of factors in [0,1] never round upward, so the
  // sequence is nonincreasing exactly in floating point
  std::vector<double> partial(factor.size(), 0.0);
  double p = 1.0;
  for (std::size_t i = 0; i < factor.size(); ++i) {
    p *= factor[i];
    partial[i] = p;
  }
  return partial;
}

ProjReport p_elem(const StabSeqPtr& f, const VecElem& u, const VecElem& v,
                  int k_max, int depth, const QuadratureCfg& cfg) {
  ProjReport r;
  r.value = f_elem(f, 1, k_max, u, v, depth, cfg);
  const InnerResult r2 = f_elem(f, 2, k_max, u, v, depth, cfg);
  const InnerResult r3 = f_elem(f, 3, k_max, u, v, depth, cfg);
  r.ell_spread = std::max(std::abs(r.value.value - r2.value),
                          std::abs(r.value.value - r3.value));
  // the operator applied twice: P^2 against P
  const InnerResult rpp = inner_lazy(
      u, LazyVec{v, {f_tail_op(f, 1, k_max), f_tail_op(f, 1, k_max)}}, depth,
      cfg);
  r.idem_gap = std::abs(r.value.value - rpp.value);
  r.slack = r.value.radius + r2.radius + r3.radius + rpp.radius;
  // the compared windows differ slot by slot: |int h^l - int h^m| is at
  // most 2 (1 - int h) per slot, so the level deficit beyond the cut
  // bounds the spread; without a summable budget there is no certificate
  const TailDeficit d =
      TailSpec::power(f, 1).deficit_beyond(u.ambient, k_max - 1);
  if (d.kind == TailDeficit::Kind::Bounded)
    r.slack += 2.0 * d.bound;
  else if (d.kind != TailDeficit::Kind::Zero)
    r.slack = std::numeric_limits<double>::infinity();
  return r;
}

ExcessResult excess_elem(const StabSeqPtr& f, int ell, const VecElem& u,
                         const VecElem& v, int n_max, int depth,
                         const QuadratureCfg& cfg) {
  if (n_max < 1) throw InvalidArgError("n_max must be >= 1");
  ExcessResult res;
  res.rows.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    const InnerResult ir = f_elem(f, ell, n, u, v, depth, cfg);
    res.rows.push_back({n, ir.value, ir.value.real() - ir.radius,
                        ir.value.real() + ir.radius, ir.radius});
  }
  const TailDeficit d =
      TailSpec::power(f, ell).deficit_beyond(u.ambient, 0);
  res.tail = d;
  if (d.kind == TailDeficit::Kind::Divergent) {
    res.limit = ComplexDisk::exact({0.0, 0.0});
  } else {
    const InnerResult base = inner(u, v, cfg);
    if (d.summable()) {
      res.limit = {base.value, base.radius};
    } else {
      // no classification: enclose both possible limits 0 and <u, v>
      res.limit = {0.5 * base.value,
                   0.5 * std::abs(base.value) + base.radius};
    }
  }
  return res;
}

CharExcess excess_char(const chars::Character& c, int ell, int depth) {
  if (ell < 1) throw InvalidArgError("exponent must be >= 1");
  CharExcess r;
  const chars::TailVerdict tv =
      chars::tail_product(c.point, *c.base, ell, 1, depth);
  const double qp = ipow(c.q, ell);
  switch (tv.kind) {
    case chars::TailVerdict::Kind::Limit:
      r.value = qp;
      break;
    case chars::TailVerdict::Kind::InNf:
      r.value = 0.0;
      r.degenerate = true;
      break;
    default:
      r.value = 0.5 * qp;
      r.undetermined = true;
      break;
  }
  return r;
}

PiQResult piq_eval(const tensor::TensorElem& a, double q, const VecElem& u,
                   const VecElem& v, int depth, const QuadratureCfg& cfg) {
  if (!(q > 0.0 && q <= 1.0))
    throw InvalidArgError("q must lie in (0,1]");
  if (!(u.ambient == v.ambient))
    throw InvalidArgError("inner product needs matching ambient measures");
  const TailSpec* cls = a.homogeneous_class();
  if (!cls)
    throw BaseMismatchError("pi_Q evaluation needs a homogeneous tail class");
  if (!cls->is_unit() && !cls->single())
    throw BaseMismatchError("mixed tails in pi_Q evaluation");
  const StabSeqPtr f = cls->is_unit() ? nullptr : cls->single()->base;
  const int ell = cls->is_unit() ? 0 : cls->single()->exp;
  const double qp = ipow(q, ell);

  PiQResult res;
  Cplx v1{0.0, 0.0}, v2{0.0, 0.0};
  double r1 = 0.0, r2 = 0.0;
  for (const auto& term : a.terms()) {
    const int m = term.max_dev();
    // window op through m with the exponent fill, then the tail unit
    std::vector<ElemTensor> ops1;
    if (cls->is_unit()) {
      ops1.push_back(term);
    } else {
      ElemTensor win;
      win.coeff = term.coeff;
      for (int j = 1; j <= m; ++j) win.devs[j] = term.slot_fn(j);
      ops1.push_back(std::move(win));
      ops1.push_back(f_tail_op(f, ell, m + 1));
    }
    const InnerResult p1 = inner_lazy(u, LazyVec{v, std::move(ops1)}, depth, cfg);
    v1 += qp * p1.value;
    r1 += qp * p1.radius;

    // full increasing windows, accumulated in descending slot order
    for (const auto& s : u.terms) {
      for (const auto& t : v.terms) {
        std::vector<ElemTensor> self{term};
        const int d = window_depth(s, t, self, term.tail, depth);
        const auto fac = window_factors(s, t, self, u.ambient, d, cfg);
        const TailDeficit def = term.tail.is_unit()
                                    ? TailDeficit::zero()
                                    : term.tail.deficit_beyond(u.ambient, d);
        const Cplx c0 = term.coeff * std::conj(s.coeff) * t.coeff;
        const ComplexDisk pair = ordered_product(c0, fac, /*descending=*/true)
                                     .mul_interval(tail_bracket_of(def));
        v2 += qp * pair.value;
        r2 += qp * pair.radius;
      }
    }
  }
  res.path1 = {v1, r1};
  res.path2 = {v2, r2};
  res.residual = std::abs(v1 - v2);
  res.slack = r1 + r2;
  return res;
}

SemigroupCheck excess_semigroup_check(const StabSeqPtr& f,
                                      const StabSeqPtr& g, const VecElem& u,
                                      const VecElem& v, int depth,
                                      const QuadratureCfg& cfg) {
  if (depth < 2) throw InvalidArgError("depth must be >= 2");
  const int m = std::max(1, depth / 2);
  const InnerResult lhs = inner_lazy(
      u, LazyVec{v, {f_tail_op(g, 1, m), f_tail_op(f, 1, depth)}}, depth,
      cfg);
  ElemTensor combined;
  combined.tail = TailSpec::power(f, 1) * TailSpec::power(g, 1);
  for (int j = 1; j < m; ++j) combined.devs[j] = ScalarFn::constant({1.0, 0.0});
  const InnerResult rhs = inner_lazy(u, LazyVec{v, {combined}}, depth, cfg);
  SemigroupCheck out;
  out.lhs = {lhs.value, lhs.radius};
  out.rhs = {rhs.value, rhs.radius};
  out.residual = std::abs(lhs.value - rhs.value);
  out.slack = lhs.radius + rhs.radius;
  return out;
}

}  // namespace itp::rep
