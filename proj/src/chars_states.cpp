#include "itp/chars_states.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "itp/par.hpp"

namespace itp::chars {

PointSeq PointSeq::in_plateau(std::map<int, double> devs) {
  PointSeq p;
  p.rule_ = TailRule::InPlateau;
  p.devs_ = std::move(devs);
  return p;
}

PointSeq PointSeq::constant(double c, std::map<int, double> devs) {
  PointSeq p;
  p.rule_ = TailRule::Constant;
  p.c_ = c;
  p.devs_ = std::move(devs);
  return p;
}

PointSeq PointSeq::sampled(measures::ProductMeasure mu, std::uint64_t seed,
                           std::uint64_t row, std::map<int, double> devs) {
  PointSeq p;
  p.rule_ = TailRule::Sampled;
  p.mu_ = std::move(mu);
  p.has_mu_ = true;
  p.seed_ = seed;
  p.row_ = row;
  p.devs_ = std::move(devs);
  return p;
}

double PointSeq::at(int n) const {
  if (n < 1) throw InvalidArgError("coordinates are 1-based");
  if (auto it = devs_.find(n); it != devs_.end()) return it->second;
  switch (rule_) {
    case TailRule::InPlateau:
      return 0.0;
    case TailRule::Constant:
      return c_;
    case TailRule::Sampled:
      return measures::sample_one(mu_.at(n), seed_,
                                  static_cast<std::uint64_t>(n), row_);
  }
  return 0.0;
}

Character Character::make(PointSeq point, double q, StabSeqPtr base) {
  if (!(q > 0.0) || q > 1.0)
    throw InvalidArgError("q must lie in (0,1]");
  if (!base) throw InvalidArgError("character needs a base level sequence");
  return Character{std::move(point), q, std::move(base)};
}

TailVerdict tail_product(const PointSeq& x, const StabSeq& f, int ell,
                         int start, int depth, double tol,
                         const std::set<int>* exclude) {
  if (start < 1 || depth < 1 || ell < 1)
    throw InvalidArgError("tail product needs start, depth, exponent >= 1");
  const int md = f.materialized_depth();  // 0 when the rule covers every n
  if (md > 0 && x.max_dev() > md)
    throw DepthExceededError(
        "point deviation lies beyond the materialized level sequence");
  int jend = std::max(start + depth - 1, x.max_dev());
  if (md > 0) jend = std::min(jend, md);

  double prod = 1.0;
  double deficit_total = 0.0;
  double deficit_run = 0.0;  // since the last zero factor
  int scanned = 0;
  bool exact = true;
  for (int j = start; j <= jend; ++j) {
    if (exclude && exclude->count(j)) continue;
    const double v = ipow(fnalg::bump_value(f.level(j), x.at(j)), ell);
    ++scanned;
    prod *= v;
    deficit_total += 1.0 - v;
    if (v == 0.0)
      deficit_run = 0.0;
    else
      deficit_run += 1.0 - v;
    if (v != 0.0 && v != 1.0) exact = false;
    if (deficit_run > 50.0)
      return TailVerdict{TailVerdict::Kind::InNf,
                         RealBracket{0.0, std::exp(-50.0)}, deficit_total,
                         scanned};
  }
  RealBracket w =
      exact ? RealBracket::exact(prod)
            : RealBracket::around(prod, prod * scanned * 2.2e-16);
  w = w.intersect(RealBracket{0.0, 1.0});

  switch (x.rule()) {
    case PointSeq::TailRule::InPlateau:
      // beyond the window every coordinate is 0: factors exactly 1
      return TailVerdict{TailVerdict::Kind::Limit, w, deficit_total, scanned};
    case PointSeq::TailRule::Constant: {
      const double c = std::abs(x.tail_constant());
      const int floor_level = f.level_floor_beyond(jend);
      if (c <= static_cast<double>(floor_level))
        return TailVerdict{TailVerdict::Kind::Limit, w, deficit_total,
                           scanned};
      if (f.is_periodic()) {
        // some cycle level stays below |c|: a fixed positive deficit
        // repeats every period, so the product collapses
        return TailVerdict{TailVerdict::Kind::InNf, RealBracket{0.0, 0.0},
                           deficit_total, scanned};
      }
      return TailVerdict{TailVerdict::Kind::Undetermined,
                         RealBracket{0.0, w.hi}, deficit_total, scanned};
    }
    case PointSeq::TailRule::Sampled:
      return TailVerdict{TailVerdict::Kind::Undetermined,
                         RealBracket{0.0, w.hi}, deficit_total, scanned};
  }
  return TailVerdict{};
}

CharEval char_eval(const Character& c, const TensorElem& a, int depth,
                   double tol) {
  CharEval out;
  for (const auto& t : a.terms()) {
    int ell = 0;
    const StabSeq* f = nullptr;
    if (!t.tail.is_unit()) {
      const tensor::TailFactor* s = t.tail.single();
      if (!s)
        throw BaseMismatchError(
            "character evaluation needs single-base tails");
      if (!c.base || s->base->key() != c.base->key())
        throw BaseMismatchError(
            "tail base differs from the character base");
      ell = s->exp;
      f = s->base.get();
    }
    Cplx dev{1.0, 0.0};
    for (const auto& [n, fn] : t.devs) dev *= fn.eval(c.point.at(n));
    const double qp = ipow(c.q, ell);
    RealBracket tb = RealBracket::exact(1.0);
    if (f) {
      std::set<int> ex;
      for (const auto& [n, fn] : t.devs) ex.insert(n);
      const TailVerdict v = tail_product(c.point, *f, ell, 1, depth, tol, &ex);
      if (v.kind == TailVerdict::Kind::InNf) out.degenerate = true;
      if (v.kind == TailVerdict::Kind::Undetermined) out.undetermined = true;
      tb = v.bracket;
    }
    out.value += t.coeff * dev * qp * tb.mid();
    out.radius += std::abs(t.coeff * dev) * qp * (0.5 * tb.width());
  }
  return out;
}

ComplexDisk state_eval(const ProductState& s, const std::map<int, double>& x,
                       const measures::QuadratureCfg& cfg) {
  ComplexDisk d = ComplexDisk::exact(Cplx{1.0, 0.0});
  for (const auto& [n, xn] : x) {
    if (xn == 0.0) continue;
    const measures::Measure1D& mu = s.measure.at(n);
    const double r =
        mu.kind() == measures::MKind::Density ? cfg.abs_tol : 2e-16;
    d = d * ComplexDisk{measures::char_fn(mu, xn, cfg), r};
  }
  return d;
}

double strict_ext_residual(const ProductState& s, const StabSeq& f,
                           const std::map<int, double>& x, int n, int depth,
                           const measures::QuadratureCfg& cfg) {
  if (n < 0) throw InvalidArgError("window index must be >= 0");
  if (depth < 1) throw InvalidArgError("tail depth must be >= 1");
  const ComplexDisk om = state_eval(s, x, cfg);
  int maxsupp = 0;
  for (const auto& [j, xj] : x)
    if (xj != 0.0) maxsupp = std::max(maxsupp, j);
  int D = std::max(n, maxsupp) + depth;
  if (f.materialized_depth() > 0) D = std::min(D, f.materialized_depth());

  ComplexDisk w = ComplexDisk::exact(Cplx{1.0, 0.0});
  for (int j = 1; j <= D; ++j) {
    const auto it = x.find(j);
    const bool insupp = it != x.end() && it->second != 0.0;
    const measures::Measure1D& mu = s.measure.at(j);
    if (j <= n) {
      if (!insupp) continue;  // identity slot against a unit integrand
      const double r =
          mu.kind() == measures::MKind::Density ? cfg.abs_tol : 2e-16;
      w = w * ComplexDisk{measures::char_fn(mu, it->second, cfg), r};
    } else {
      fnalg::ScalarFn slot = f.slot_fn(j);
      if (insupp) slot = fnalg::modulate(it->second, slot);
      const measures::IntegralValue iv = measures::integrate(slot, mu, cfg);
      w = w * ComplexDisk{iv.value, iv.err};
    }
  }

  const tensor::TailDeficit td = f.deficit_beyond(s.measure, D);
  RealBracket tb{0.0, 1.0};
  switch (td.kind) {
    case tensor::TailDeficit::Kind::Zero:
      tb = RealBracket::exact(1.0);
      break;
    case tensor::TailDeficit::Kind::Bounded:
      tb = RealBracket{std::max(0.0, 1.0 - td.bound), 1.0};
      break;
    case tensor::TailDeficit::Kind::Divergent:
      tb = RealBracket{0.0, 0.0};
      break;
    case tensor::TailDeficit::Kind::Unknown:
      tb = RealBracket{0.0, 1.0};
      break;
  }
  const double r1 = std::abs(w.value * tb.lo - om.value);
  const double r2 = std::abs(w.value * tb.hi - om.value);
  return std::max(r1, r2) +
         w.radius * std::max(std::abs(tb.lo), std::abs(tb.hi)) + om.radius;
}

namespace {

std::map<int, double> sparse_sub(const std::map<int, double>& a,
                                 const std::map<int, double>& b) {
  std::map<int, double> out = a;
  for (const auto& [n, v] : b) {
    auto [it, fresh] = out.try_emplace(n, -v);
    if (!fresh) it->second -= v;
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0.0; });
  return out;
}

}  // namespace

double psd_min_eig(
    const std::vector<std::map<int, double>>& pts,
    const std::function<Cplx(const std::map<int, double>&)>& omega) {
  const auto m = static_cast<std::int64_t>(pts.size());
  if (m < 1) throw InvalidArgError("psd check needs at least one point");
  std::vector<Cplx> vals(static_cast<std::size_t>(m * m));
  par::guarded_for(m * m, [&](std::int64_t idx) {
    const auto i = static_cast<std::size_t>(idx / m);
    const auto j = static_cast<std::size_t>(idx % m);
    vals[static_cast<std::size_t>(idx)] = omega(sparse_sub(pts[i], pts[j]));
  });
  Eigen::MatrixXcd g(m, m);
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t j = 0; j < m; ++j)
      g(i, j) = vals[static_cast<std::size_t>(i * m + j)];
  const Eigen::MatrixXcd h = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  return es.eigenvalues().minCoeff();
}

double psd_check(const ProductState& s,
                 const std::vector<std::map<int, double>>& pts,
                 const measures::QuadratureCfg& cfg) {
  return psd_min_eig(pts, [&](const std::map<int, double>& x) {
    return state_eval(s, x, cfg).value;
  });
}

Cplx box_indicator(const std::map<int, double>& x) {
  for (const auto& [n, v] : x)
    if (std::abs(v) > 1.0) return Cplx{0.0, 0.0};
  return Cplx{1.0, 0.0};
}

double char_sup_lower(const TensorElem& a, const std::vector<Character>& cs,
                      int depth) {
  if (a.is_zero() || cs.empty()) return 0.0;
  for (const auto& c : cs) {
    if (!c.base) throw InvalidArgError("character needs a base");
    const int md = c.base->materialized_depth();
    if (md > 0 && c.point.max_dev() > md)
      throw DepthExceededError(
          "point deviation lies beyond the materialized level sequence");
    for (const auto& t : a.terms()) {
      if (t.tail.is_unit()) continue;
      const tensor::TailFactor* s = t.tail.single();
      if (!s)
        throw BaseMismatchError(
            "character evaluation needs single-base tails");
      if (s->base->key() != c.base->key())
        throw BaseMismatchError(
            "tail base differs from the character base");
    }
  }
  const double m =
      par::blocked_max(static_cast<std::int64_t>(cs.size()),
                       [&](std::int64_t i) {
                         const CharEval e = char_eval(
                             cs[static_cast<std::size_t>(i)], a, depth);
                         const double v = std::abs(e.value) - e.radius;
                         return v > 0.0 ? v : 0.0;
                       });
  return std::max(m, 0.0);
}

}  // namespace itp::chars
