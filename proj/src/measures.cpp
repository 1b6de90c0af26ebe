#include "itp/measures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "itp/par.hpp"
#include "itp/rng.hpp"

namespace itp::measures {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
constexpr double kZeta4 = 1.0823232337111382;

double gaussian_pdf(double t, double sigma) {
  const double z = t / sigma;
  return kInvSqrt2Pi / sigma * std::exp(-0.5 * z * z);
}

// 15-point Kronrod extension of 7-point Gauss (positive half; symmetric).
constexpr double kXgk[8] = {0.991455371120813, 0.949107912342759,
                            0.864864423359769, 0.741531185599394,
                            0.586087235467691, 0.405845151377397,
                            0.207784955007898, 0.0};
constexpr double kWgk[8] = {0.022935322010529, 0.063092092629979,
                            0.104790010322250, 0.140653259715525,
                            0.169004726639267, 0.190350578064785,
                            0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                           0.381830050505119, 0.417959183673469};

struct Segment {
  double a, b;
  Cplx value;
  double err;
};

Segment gk15(const std::function<Cplx(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  Cplx kron{0.0, 0.0}, gauss{0.0, 0.0};
  for (int i = 0; i < 8; ++i) {
    const double dx = h * kXgk[i];
    const Cplx fv = i == 7 ? f(c) : f(c - dx) + f(c + dx);
    kron += kWgk[i] * fv;
    if (i % 2 == 1) gauss += kWg[i / 2] * fv;
  }
  Segment s;
  s.a = a;
  s.b = b;
  s.value = kron * h;
  const Cplx g = gauss * h;
  s.err = 2.0 * std::abs(s.value - g) + 1e-16 * (1.0 + std::abs(s.value));
  return s;
}

// Adaptive GK15 from a forced initial partition.  Splits the worst segment
// until the summed error estimate meets tol.
IntegralValue adaptive(const std::function<Cplx(double)>& f,
                       std::vector<double> cuts, double tol,
                       int max_segments) {
  std::vector<Segment> segs;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) segs.push_back(gk15(f, cuts[i], cuts[i + 1]));
  auto total = [&] {
    IntegralValue t;
    for (const auto& s : segs) {
      t.value += s.value;
      t.err += s.err;
    }
    return t;
  };
  while (true) {
    IntegralValue t = total();
    if (t.err <= tol) return t;
    if (static_cast<int>(segs.size()) >= max_segments)
      throw QuadratureFailureError(
          "quadrature tolerance unreachable within subdivision cap", t.value,
          t.err);
    std::size_t worst = 0;
    for (std::size_t i = 1; i < segs.size(); ++i)
      if (segs[i].err > segs[worst].err) worst = i;
    const Segment w = segs[worst];
    const double m = 0.5 * (w.a + w.b);
    segs[worst] = gk15(f, w.a, m);
    segs.push_back(gk15(f, m, w.b));
  }
}

// Exact integral of env(t) * weight(t) dt over [lo, hi] for polynomial
// weights (Uniform scale / Density pdf pieces).
double exact_weighted(const PiecewisePoly& env, const PiecewisePoly* pdf,
                      double scale, double lo, double hi) {
  if (env.empty()) return 0.0;
  std::vector<double> grid = env.breaks();
  if (pdf) {
    std::vector<double> merged;
    std::merge(grid.begin(), grid.end(), pdf->breaks().begin(),
               pdf->breaks().end(), std::back_inserter(merged));
    grid = std::move(merged);
  }
  grid.push_back(lo);
  grid.push_back(hi);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = std::max(grid[i], lo);
    const double b = std::min(grid[i + 1], hi);
    if (b <= a) continue;
    // local polynomials at a
    const auto piece = [&](const PiecewisePoly& pp) -> fnalg::Poly {
      const auto& br = pp.breaks();
      if (pp.empty() || b <= br.front() || a >= br.back()) return {};
      auto it = std::upper_bound(br.begin(), br.end(), 0.5 * (a + b));
      if (it == br.begin() || it == br.end()) return {};
      const std::size_t idx = static_cast<std::size_t>(it - br.begin()) - 1;
      return fnalg::poly_shift(pp.pieces()[idx], a - br[idx]);
    };
    fnalg::Poly p = piece(env);
    if (p.c.empty()) continue;
    if (pdf) {
      const fnalg::Poly w = piece(*pdf);
      if (w.c.empty()) continue;
      p = fnalg::poly_mul(p, w);
    }
    const fnalg::Poly A = fnalg::poly_antiderivative(p);
    acc += A.eval(b - a);
  }
  return scale * acc;
}

double sinc(double z) {
  if (std::abs(z) < 1e-4) {
    const double z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

}  // namespace

void QuadratureCfg::validate() const {
  if (!(abs_tol > 0.0) || !(sigma_radius >= 1.0) || max_segments < 8)
    throw InvalidArgError("quadrature config out of range");
}

Measure1D Measure1D::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgError("gaussian sigma must be > 0");
  Measure1D m;
  m.kind_ = MKind::Gaussian;
  m.sigma_ = sigma;
  char buf[48];
  std::snprintf(buf, sizeof buf, "G:%.17g", sigma);
  m.key_ = buf;
  return m;
}

Measure1D Measure1D::uniform(double a, double b) {
  if (!(a < b)) throw InvalidArgError("uniform requires a < b");
  Measure1D m;
  m.kind_ = MKind::Uniform;
  m.a_ = a;
  m.b_ = b;
  char buf[80];
  std::snprintf(buf, sizeof buf, "U:%.17g,%.17g", a, b);
  m.key_ = buf;
  return m;
}

Measure1D Measure1D::density(const PiecewisePoly& raw) {
  if (raw.empty()) throw InvalidArgError("density must have support");
  for (std::size_t i = 0; i + 1 < raw.breaks().size(); ++i) {
    const double a = raw.breaks()[i];
    const double b = raw.breaks()[i + 1];
    for (int s = 0; s <= 64; ++s) {
      const double t = a + (b - a) * s / 64.0;
      if (raw.eval(t) < -1e-12)
        throw InvalidArgError("density must be nonnegative on its support");
    }
  }
  const double mass =
      raw.definite_integral(raw.breaks().front(), raw.breaks().back());
  if (!(mass > 0.0)) throw InvalidArgError("density has zero total mass");
  Measure1D m;
  m.kind_ = MKind::Density;
  m.density_ = fnalg::pp_scale(raw, 1.0 / mass);
  m.a_ = m.density_.breaks().front();
  m.b_ = m.density_.breaks().back();
  m.key_ = "D:" + m.density_.canonical_key();
  return m;
}

IntegralValue integrate(const ScalarFn& f, const Measure1D& mu,
                        const QuadratureCfg& cfg) {
  cfg.validate();
  IntegralValue total;
  total.value = f.constant_part();  // unit total mass
  if (f.terms().empty()) return total;
  const double term_tol =
      cfg.abs_tol / static_cast<double>(f.terms().size());

  for (const auto& term : f.terms()) {
    if (term.env.empty()) continue;
    Cplx tv{0.0, 0.0};
    double terr = 0.0;
    switch (mu.kind()) {
      case MKind::Uniform: {
        const double scale = 1.0 / (mu.hi() - mu.lo());
        const double lo = std::max(mu.lo(), term.env.breaks().front());
        const double hi = std::min(mu.hi(), term.env.breaks().back());
        if (hi <= lo) break;
        if (term.freq == 0.0) {
          tv = exact_weighted(term.env, nullptr, scale, lo, hi);
          terr = 1e-15 * (1.0 + std::abs(tv));
        } else {
          std::vector<double> cuts{lo, hi};
          for (double b : term.env.breaks())
            if (b > lo && b < hi) cuts.push_back(b);
          std::sort(cuts.begin(), cuts.end());
          const double w = term.freq;
          const auto& env = term.env;
          IntegralValue r = adaptive(
              [&env, w, scale](double t) {
                return scale * env.eval(t) * std::polar(1.0, w * t);
              },
              cuts, term_tol, cfg.max_segments);
          tv = r.value;
          terr = r.err;
        }
        break;
      }
      case MKind::Density: {
        const double lo = std::max(mu.lo(), term.env.breaks().front());
        const double hi = std::min(mu.hi(), term.env.breaks().back());
        if (hi <= lo) break;
        if (term.freq == 0.0) {
          tv = exact_weighted(term.env, &mu.pdf(), 1.0, lo, hi);
          terr = 1e-15 * (1.0 + std::abs(tv));
        } else {
          std::vector<double> cuts{lo, hi};
          for (double b : term.env.breaks())
            if (b > lo && b < hi) cuts.push_back(b);
          for (double b : mu.pdf().breaks())
            if (b > lo && b < hi) cuts.push_back(b);
          std::sort(cuts.begin(), cuts.end());
          const double w = term.freq;
          const auto& env = term.env;
          const auto& pdf = mu.pdf();
          IntegralValue r = adaptive(
              [&env, &pdf, w](double t) {
                return env.eval(t) * pdf.eval(t) * std::polar(1.0, w * t);
              },
              cuts, term_tol, cfg.max_segments);
          tv = r.value;
          terr = r.err;
        }
        break;
      }
      case MKind::Gaussian: {
        const double R = cfg.sigma_radius * mu.sigma();
        const double lo = std::max(-R, term.env.breaks().front());
        const double hi = std::min(R, term.env.breaks().back());
        // Mass beyond the truncation radius, times a crude sup bound.
        double supb = 0.0;
        for (const auto& p : term.env.pieces()) {
          double bp = 0.0, u = 1.0;
          double len = 0.0;
          for (std::size_t i = 0; i + 1 < term.env.breaks().size(); ++i)
            len = std::max(len,
                           term.env.breaks()[i + 1] - term.env.breaks()[i]);
          for (std::size_t k = 0; k < p.c.size(); ++k, u *= len)
            bp += std::abs(p.c[k]) * u;
          supb = std::max(supb, bp);
        }
        terr += supb * std::erfc(cfg.sigma_radius / kSqrt2);
        if (hi > lo) {
          std::vector<double> cuts{lo, hi};
          for (double b : term.env.breaks())
            if (b > lo && b < hi) cuts.push_back(b);
          std::sort(cuts.begin(), cuts.end());
          const double w = term.freq;
          const double sg = mu.sigma();
          const auto& env = term.env;
          IntegralValue r = adaptive(
              [&env, w, sg](double t) {
                return env.eval(t) * gaussian_pdf(t, sg) *
                       std::polar(1.0, w * t);
              },
              cuts, term_tol, cfg.max_segments);
          tv = r.value;
          terr += r.err;
        }
        break;
      }
    }
    total.value += term.coeff * tv;
    total.err += std::abs(term.coeff) * terr;
  }
  return total;
}

Cplx char_fn(const Measure1D& mu, double x, const QuadratureCfg& cfg) {
  switch (mu.kind()) {
    case MKind::Gaussian: {
      const double s = mu.sigma() * x;
      return Cplx{std::exp(-0.5 * s * s), 0.0};
    }
    case MKind::Uniform: {
      const double m = 0.5 * (mu.lo() + mu.hi());
      const double h = 0.5 * (mu.hi() - mu.lo());
      return std::polar(sinc(x * h), x * m);
    }
    case MKind::Density: {
      cfg.validate();
      std::vector<double> cuts = mu.pdf().breaks();
      const auto& pdf = mu.pdf();
      IntegralValue r = adaptive(
          [&pdf, x](double t) { return pdf.eval(t) * std::polar(1.0, x * t); },
          cuts, cfg.abs_tol, cfg.max_segments);
      return r.value;
    }
  }
  return Cplx{0.0, 0.0};
}

double plateau_mass(const Measure1D& mu, double k) {
  if (k < 0.0) throw InvalidArgError("plateau_mass: k must be >= 0");
  switch (mu.kind()) {
    case MKind::Gaussian:
      return std::erf(k / (mu.sigma() * kSqrt2));
    case MKind::Uniform: {
      const double lo = std::max(-k, mu.lo());
      const double hi = std::min(k, mu.hi());
      return hi > lo ? (hi - lo) / (mu.hi() - mu.lo()) : 0.0;
    }
    case MKind::Density:
      return mu.pdf().definite_integral(-k, k);
  }
  return 0.0;
}

ProductMeasure ProductMeasure::iid(const Measure1D& m) {
  return of({}, {m});
}

ProductMeasure ProductMeasure::of(std::vector<Measure1D> prefix,
                                  std::vector<Measure1D> cycle) {
  if (cycle.empty())
    throw InvalidArgError("product measure needs a repeating cycle");
  ProductMeasure pm;
  pm.prefix_ = std::move(prefix);
  pm.cycle_ = std::move(cycle);
  pm.key_ = "P[";
  for (const auto& m : pm.prefix_) pm.key_ += m.key() + ";";
  pm.key_ += "|";
  for (const auto& m : pm.cycle_) pm.key_ += m.key() + ";";
  pm.key_ += "]";
  return pm;
}

const Measure1D& ProductMeasure::at(int n) const {
  if (n < 1) throw InvalidArgError("coordinates are 1-based");
  const int p = prefix_len();
  if (n <= p) return prefix_[static_cast<std::size_t>(n - 1)];
  return cycle_[static_cast<std::size_t>((n - p - 1) % cycle_len())];
}

double budget_value(BudgetKind kind, int n) {
  if (n < 1) throw InvalidArgError("budget index is 1-based");
  switch (kind) {
    case BudgetKind::Pow2:
      return std::ldexp(1.0, -n);
    case BudgetKind::Quartic: {
      const double d = static_cast<double>(n);
      return 1.0 / (d * d * d * d);
    }
  }
  return 0.0;
}

double budget_tail_sum(BudgetKind kind, int n) {
  if (n < 0) throw InvalidArgError("budget tail index must be >= 0");
  switch (kind) {
    case BudgetKind::Pow2:
      return std::ldexp(1.0, -n);
    case BudgetKind::Quartic: {
      if (n == 0) return kZeta4;
      const double d = static_cast<double>(n);
      return 1.0 / (3.0 * d * d * d);
    }
  }
  return 0.0;
}

std::vector<int> select_levels(const ProductMeasure& mu, BudgetKind budget,
                               int depth, long level_cap) {
  if (depth < 1) throw InvalidArgError("select_levels: depth must be >= 1");
  std::vector<int> levels;
  levels.reserve(static_cast<std::size_t>(depth));
  for (int n = 1; n <= depth; ++n) {
    const double b = budget_value(budget, n);
    long k = 1;
    while (1.0 - plateau_mass(mu.at(n), static_cast<double>(k)) > b) {
      if (++k > level_cap)
        throw HeavyTailError(
            "level search exceeded cap; tail too heavy for the budget");
    }
    levels.push_back(static_cast<int>(k));
  }
  return levels;
}

double sample_one(const Measure1D& mu, std::uint64_t seed,
                  std::uint64_t stream, std::uint64_t counter) {
  const double u = rng::uniform01(seed, stream, counter);
  switch (mu.kind()) {
    case MKind::Gaussian:
      return mu.sigma() * rng::normal_quantile(u);
    case MKind::Uniform:
      return mu.lo() + (mu.hi() - mu.lo()) * u;
    case MKind::Density: {
      // Invert the piecewise polynomial CDF by bisection per piece.
      const auto& pdf = mu.pdf();
      const auto& br = pdf.breaks();
      double cum = 0.0;
      for (std::size_t i = 0; i < pdf.pieces().size(); ++i) {
        const fnalg::Poly A = fnalg::poly_antiderivative(pdf.pieces()[i]);
        const double len = br[i + 1] - br[i];
        const double mass = A.eval(len);
        if (u <= cum + mass || i + 1 == pdf.pieces().size()) {
          const double target = std::clamp(u - cum, 0.0, mass);
          double lo = 0.0, hi = len;
          for (int it = 0; it < 64; ++it) {
            const double mid = 0.5 * (lo + hi);
            (A.eval(mid) < target ? lo : hi) = mid;
          }
          return br[i] + 0.5 * (lo + hi);
        }
        cum += mass;
      }
      return br.back();
    }
  }
  return 0.0;
}

std::vector<double> sample_matrix(const ProductMeasure& mu, int depth,
                                  int count, std::uint64_t seed) {
  if (depth < 1 || count < 1)
    throw InvalidArgError("sample_matrix: depth and count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(depth) *
                          static_cast<std::size_t>(count));
  par::parallel_for(static_cast<std::int64_t>(out.size()), [&](std::int64_t i) {
    const int r = static_cast<int>(i / depth);
    const int n = static_cast<int>(i % depth) + 1;
    out[static_cast<std::size_t>(i)] =
        sample_one(mu.at(n), seed, static_cast<std::uint64_t>(n),
                   static_cast<std::uint64_t>(r));
  });
  return out;
}

}  // namespace itp::measures
