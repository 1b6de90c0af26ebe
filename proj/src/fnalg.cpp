#include "itp/fnalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace itp::fnalg {

int& degree_cap() {
  static int cap = 16;
  return cap;
}

namespace {

constexpr double kZeroCoeff = 1e-300;  // strict-zero pruning threshold

void append_num(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

bool poly_is_zero(const Poly& p) {
  for (double c : p.c)
    if (c != 0.0) return false;
  return true;
}

bool poly_close(const Poly& a, const Poly& b, double tol) {
  const std::size_t n = std::max(a.c.size(), b.c.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double ca = i < a.c.size() ? a.c[i] : 0.0;
    const double cb = i < b.c.size() ? b.c[i] : 0.0;
    if (std::abs(ca - cb) > tol) return false;
  }
  return true;
}

// Merge two sorted breakpoint lists, identifying points closer than tol.
std::vector<double> merge_grids(const std::vector<double>& a,
                                const std::vector<double>& b,
                                double tol = kNormTol) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  auto push = [&](double v) {
    if (out.empty() || v - out.back() > tol) out.push_back(v);
  };
  while (i < a.size() || j < b.size()) {
    if (j >= b.size() || (i < a.size() && a[i] <= b[j]))
      push(a[i++]);
    else
      push(b[j++]);
  }
  return out;
}

// Piece of `pp` covering [lo, hi] (a subinterval of one original piece),
// rebased to local coordinate at `lo`.  Empty when outside the support.
Poly piece_over(const PiecewisePoly& pp, double lo, double hi) {
  const auto& br = pp.breaks();
  if (pp.empty() || hi <= br.front() + kNormTol || lo >= br.back() - kNormTol)
    return {};
  const double m = 0.5 * (lo + hi);
  auto it = std::upper_bound(br.begin(), br.end(), m);
  if (it == br.begin() || it == br.end()) return {};
  const std::size_t idx = static_cast<std::size_t>(it - br.begin()) - 1;
  return poly_shift(pp.pieces()[idx], lo - br[idx]);
}

}  // namespace

double Poly::eval(double u) const {
  double r = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) r = r * u + c[i];
  return r;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly r;
  r.c.resize(std::max(a.c.size(), b.c.size()), 0.0);
  for (std::size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
  for (std::size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
  poly_trim(r);
  return r;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.c.empty() || b.c.empty()) return {};
  Poly r;
  r.c.resize(a.c.size() + b.c.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c.size(); ++i)
    for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
  poly_trim(r);
  return r;
}

Poly poly_scale(const Poly& a, double s) {
  Poly r = a;
  for (double& c : r.c) c *= s;
  poly_trim(r);
  return r;
}

Poly poly_shift(const Poly& a, double s) {
  Poly r = a;
  const int n = static_cast<int>(r.c.size());
  for (int i = 0; i < n; ++i)
    for (int j = n - 2; j >= i; --j) r.c[j] += s * r.c[j + 1];
  return r;
}

Poly poly_derivative(const Poly& a) {
  Poly r;
  for (std::size_t i = 1; i < a.c.size(); ++i)
    r.c.push_back(a.c[i] * static_cast<double>(i));
  poly_trim(r);
  return r;
}

Poly poly_antiderivative(const Poly& a) {
  Poly r;
  r.c.push_back(0.0);
  for (std::size_t i = 0; i < a.c.size(); ++i)
    r.c.push_back(a.c[i] / static_cast<double>(i + 1));
  return r;
}

void poly_trim(Poly& a) {
  while (!a.c.empty() && a.c.back() == 0.0) a.c.pop_back();
}

PiecewisePoly PiecewisePoly::make(std::vector<double> breaks,
                                  std::vector<Poly> pieces) {
  if (breaks.empty() && pieces.empty()) return {};
  if (breaks.size() != pieces.size() + 1)
    throw InvalidArgError("piecewise polynomial: breakpoint/piece mismatch");
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    if (!(breaks[i + 1] > breaks[i]))
      throw InvalidArgError(
          "piecewise polynomial: breakpoints must be strictly increasing");
  for (auto& p : pieces) {
    poly_trim(p);
    if (p.degree() > degree_cap())
      throw DegreeOverflowError(
          "piecewise polynomial degree exceeds cap; refine pieces or raise "
          "the cap");
  }
  // Drop zero pieces at either end; the function is 0 outside anyway.
  std::size_t lo = 0, hi = pieces.size();
  while (lo < hi && poly_is_zero(pieces[lo])) ++lo;
  while (hi > lo && poly_is_zero(pieces[hi - 1])) --hi;
  if (lo == hi) return {};
  PiecewisePoly r;
  r.breaks_.assign(breaks.begin() + static_cast<std::ptrdiff_t>(lo),
                   breaks.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  r.pieces_.assign(pieces.begin() + static_cast<std::ptrdiff_t>(lo),
                   pieces.begin() + static_cast<std::ptrdiff_t>(hi));
  // Merge adjacent pieces that are restrictions of one polynomial.
  std::vector<double> mb{r.breaks_[0]};
  std::vector<Poly> mp{r.pieces_[0]};
  for (std::size_t i = 1; i < r.pieces_.size(); ++i) {
    const Poly cont = poly_shift(mp.back(), r.breaks_[i] - mb.back());
    if (poly_close(cont, r.pieces_[i], kNormTol)) {
      // extend the previous piece over this interval
    } else {
      mb.push_back(r.breaks_[i]);
      mp.push_back(r.pieces_[i]);
    }
  }
  mb.push_back(r.breaks_.back());
  r.breaks_ = std::move(mb);
  r.pieces_ = std::move(mp);
  return r;
}

double PiecewisePoly::eval(double t) const {
  if (empty() || t < breaks_.front() || t > breaks_.back()) return 0.0;
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  std::size_t idx = static_cast<std::size_t>(it - breaks_.begin());
  idx = idx == 0 ? 0 : idx - 1;
  if (idx >= pieces_.size()) idx = pieces_.size() - 1;
  return pieces_[idx].eval(t - breaks_[idx]);
}

double PiecewisePoly::definite_integral(double a, double b) const {
  if (empty()) return 0.0;
  const double lo = std::max(a, breaks_.front());
  const double hi = std::min(b, breaks_.back());
  if (hi <= lo) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const double pl = std::max(lo, breaks_[i]);
    const double ph = std::min(hi, breaks_[i + 1]);
    if (ph <= pl) continue;
    const Poly A = poly_antiderivative(pieces_[i]);
    acc += A.eval(ph - breaks_[i]) - A.eval(pl - breaks_[i]);
  }
  return acc;
}

PiecewisePoly PiecewisePoly::derivative() const {
  if (empty()) return {};
  std::vector<Poly> dp;
  dp.reserve(pieces_.size());
  for (const auto& p : pieces_) dp.push_back(poly_derivative(p));
  return make(breaks_, std::move(dp));
}

int PiecewisePoly::max_degree() const {
  int d = -1;
  for (const auto& p : pieces_) d = std::max(d, p.degree());
  return d;
}

std::string PiecewisePoly::canonical_key() const {
  std::string s = "b";
  for (double b : breaks_) {
    s += ';';
    append_num(s, b);
  }
  for (const auto& p : pieces_) {
    s += "|p";
    for (double c : p.c) {
      s += ';';
      append_num(s, c);
    }
  }
  return s;
}

PiecewisePoly pp_add(const PiecewisePoly& a, const PiecewisePoly& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  const auto grid = merge_grids(a.breaks_, b.breaks_);
  std::vector<Poly> pieces;
  pieces.reserve(grid.size());
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    pieces.push_back(poly_add(piece_over(a, grid[i], grid[i + 1]),
                              piece_over(b, grid[i], grid[i + 1])));
  return PiecewisePoly::make(grid, std::move(pieces));
}

PiecewisePoly pp_mul(const PiecewisePoly& a, const PiecewisePoly& b) {
  if (a.empty() || b.empty()) return {};
  const double lo = std::max(a.breaks_.front(), b.breaks_.front());
  const double hi = std::min(a.breaks_.back(), b.breaks_.back());
  if (hi <= lo + kNormTol) return {};
  auto grid = merge_grids(a.breaks_, b.breaks_);
  // Clip to the support intersection; products vanish outside it.
  std::vector<double> cg;
  for (double g : grid)
    if (g >= lo - kNormTol && g <= hi + kNormTol) cg.push_back(g);
  if (cg.size() < 2) return {};
  std::vector<Poly> pieces;
  pieces.reserve(cg.size());
  for (std::size_t i = 0; i + 1 < cg.size(); ++i) {
    Poly prod = poly_mul(piece_over(a, cg[i], cg[i + 1]),
                         piece_over(b, cg[i], cg[i + 1]));
    if (prod.degree() > degree_cap())
      throw DegreeOverflowError(
          "product degree exceeds cap; refine pieces or raise the cap");
    pieces.push_back(std::move(prod));
  }
  return PiecewisePoly::make(cg, std::move(pieces));
}

PiecewisePoly pp_scale(const PiecewisePoly& a, double s) {
  if (a.empty() || s == 0.0) return {};
  std::vector<Poly> pieces;
  pieces.reserve(a.pieces_.size());
  for (const auto& p : a.pieces_) pieces.push_back(poly_scale(p, s));
  return PiecewisePoly::make(a.breaks_, std::move(pieces));
}

bool pp_equal(const PiecewisePoly& a, const PiecewisePoly& b, double tol) {
  if (a.breaks().size() != b.breaks().size()) return false;
  for (std::size_t i = 0; i < a.breaks().size(); ++i)
    if (std::abs(a.breaks()[i] - b.breaks()[i]) > tol) return false;
  for (std::size_t i = 0; i < a.pieces().size(); ++i)
    if (!poly_close(a.pieces()[i], b.pieces()[i], tol)) return false;
  return true;
}

PiecewisePoly trapezoid(int level) {
  if (level < 1) throw InvalidLevelError("trapezoid level must be >= 1");
  const double n = static_cast<double>(level);
  return PiecewisePoly::make(
      {-n - 1.0, -n, n, n + 1.0},
      {Poly{{0.0, 1.0}}, Poly{{1.0}}, Poly{{1.0, -1.0}}});
}

ScalarFn ScalarFn::constant(Cplx c) {
  ScalarFn f;
  f.constant_ = c;
  return f;
}

ScalarFn ScalarFn::from_envelope(PiecewisePoly env, Cplx coeff, double freq) {
  return make(Cplx{0.0, 0.0}, {Term{freq, std::move(env), coeff}});
}

ScalarFn ScalarFn::make(Cplx constant, std::vector<Term> terms) {
  ScalarFn f;
  f.constant_ = constant;
  std::erase_if(terms, [](const Term& t) {
    return t.env.empty() || std::abs(t.coeff) < kZeroCoeff;
  });
  std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) {
    if (x.freq != y.freq) return x.freq < y.freq;
    return x.env.canonical_key() < y.env.canonical_key();
  });
  for (auto& t : terms) {
    if (!f.terms_.empty() &&
        std::abs(f.terms_.back().freq - t.freq) <= kNormTol &&
        pp_equal(f.terms_.back().env, t.env, kNormTol)) {
      f.terms_.back().coeff += t.coeff;
    } else {
      f.terms_.push_back(std::move(t));
    }
  }
  std::erase_if(f.terms_,
                [](const Term& t) { return std::abs(t.coeff) < kZeroCoeff; });
  return f;
}

bool ScalarFn::is_zero() const {
  return terms_.empty() && constant_ == Cplx{0.0, 0.0};
}

Cplx ScalarFn::eval(double t) const {
  Cplx acc = constant_;
  for (const auto& term : terms_) {
    const double e = term.env.eval(t);
    if (e != 0.0) acc += term.coeff * std::polar(e, term.freq * t);
  }
  return acc;
}

std::string ScalarFn::canonical_key() const {
  std::string s = "c";
  append_num(s, constant_.real());
  s += ',';
  append_num(s, constant_.imag());
  for (const auto& t : terms_) {
    s += "|f";
    append_num(s, t.freq);
    s += ",";
    append_num(s, t.coeff.real());
    s += ',';
    append_num(s, t.coeff.imag());
    s += ':';
    s += t.env.canonical_key();
  }
  return s;
}

ScalarFn sf_add(const ScalarFn& a, const ScalarFn& b) {
  std::vector<ScalarFn::Term> terms = a.terms();
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  return ScalarFn::make(a.constant_part() + b.constant_part(),
                        std::move(terms));
}

ScalarFn sf_sub(const ScalarFn& a, const ScalarFn& b) {
  return sf_add(a, sf_scale(b, Cplx{-1.0, 0.0}));
}

ScalarFn sf_scale(const ScalarFn& a, Cplx s) {
  std::vector<ScalarFn::Term> terms = a.terms();
  for (auto& t : terms) t.coeff *= s;
  return ScalarFn::make(a.constant_part() * s, std::move(terms));
}

ScalarFn multiply(const ScalarFn& a, const ScalarFn& b) {
  std::vector<ScalarFn::Term> terms;
  const Cplx ca = a.constant_part();
  const Cplx cb = b.constant_part();
  for (const auto& t : b.terms())
    terms.push_back(ScalarFn::Term{t.freq, t.env, ca * t.coeff});
  for (const auto& t : a.terms())
    terms.push_back(ScalarFn::Term{t.freq, t.env, cb * t.coeff});
  for (const auto& ta : a.terms())
    for (const auto& tb : b.terms())
      terms.push_back(ScalarFn::Term{ta.freq + tb.freq,
                                     pp_mul(ta.env, tb.env),
                                     ta.coeff * tb.coeff});
  return ScalarFn::make(ca * cb, std::move(terms));
}

ScalarFn conj_fn(const ScalarFn& a) {
  std::vector<ScalarFn::Term> terms;
  terms.reserve(a.terms().size());
  for (const auto& t : a.terms())
    terms.push_back(ScalarFn::Term{-t.freq, t.env, std::conj(t.coeff)});
  return ScalarFn::make(std::conj(a.constant_part()), std::move(terms));
}

ScalarFn modulate(double x, const ScalarFn& a) {
  if (a.constant_part() != Cplx{0.0, 0.0})
    throw UnsupportedModulationError(
        "cannot modulate a function with nonzero constant part");
  std::vector<ScalarFn::Term> terms = a.terms();
  for (auto& t : terms) t.freq += x;
  return ScalarFn::make(Cplx{0.0, 0.0}, std::move(terms));
}

ScalarFn sf_pow(const ScalarFn& a, int e) {
  if (e < 0) throw InvalidArgError("sf_pow: exponent must be >= 0");
  ScalarFn r = ScalarFn::constant(Cplx{1.0, 0.0});
  for (int i = 0; i < e; ++i) r = multiply(r, a);
  return r;
}

bool sf_equal(const ScalarFn& a, const ScalarFn& b, double tol) {
  if (std::abs(a.constant_part() - b.constant_part()) > tol) return false;
  if (a.terms().size() != b.terms().size()) return false;
  for (std::size_t i = 0; i < a.terms().size(); ++i) {
    const auto& x = a.terms()[i];
    const auto& y = b.terms()[i];
    if (std::abs(x.freq - y.freq) > tol) return false;
    if (std::abs(x.coeff - y.coeff) > tol) return false;
    if (!pp_equal(x.env, y.env, tol)) return false;
  }
  return true;
}

BumpFn make_bump(int level) {
  if (level < 1) throw InvalidLevelError("bump level must be >= 1");
  return BumpFn{level, ScalarFn::from_envelope(trapezoid(level))};
}

double bump_value(int level, double x) {
  if (level < 1) throw InvalidLevelError("bump level must be >= 1");
  const double a = std::abs(x);
  const double k = static_cast<double>(level);
  if (a <= k) return 1.0;
  if (a >= k + 1.0) return 0.0;
  return k + 1.0 - a;
}

RealBracket sup_norm_bound(const ScalarFn& f, int refinement) {
  if (refinement < 2)
    throw InvalidArgError("sup_norm_bound: refinement must be >= 2");
  const double cmag = std::abs(f.constant_part());
  if (f.terms().empty()) return RealBracket::exact(cmag);

  std::vector<double> grid;
  for (const auto& t : f.terms())
    grid = merge_grids(grid, t.env.breaks());

  double lower = cmag;
  double upper = cmag;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    const double width = grid[g + 1] - grid[g];
    const double h = width / refinement;
    lower = std::max(lower, std::abs(f.eval(grid[g])));
    for (int s = 0; s < refinement; ++s) {
      const double a = grid[g] + s * h;
      const double b = a + h;
      const double m = 0.5 * (a + b);
      const double vm = std::abs(f.eval(m));
      lower = std::max({lower, vm, std::abs(f.eval(b))});
      // Derivative bound of sum coeff e^{i freq t} p(t) over [a, b].
      double L = 0.0;
      for (const auto& t : f.terms()) {
        const auto& br = t.env.breaks();
        if (t.env.empty() || b <= br.front() + kNormTol ||
            a >= br.back() - kNormTol)
          continue;
        auto it = std::upper_bound(br.begin(), br.end(), m);
        if (it == br.begin() || it == br.end()) continue;
        const std::size_t idx = static_cast<std::size_t>(it - br.begin()) - 1;
        const Poly& p = t.env.pieces()[idx];
        const Poly dp = poly_derivative(p);
        const double umax = std::min(b, br[idx + 1]) - br[idx];
        double bp = 0.0, bdp = 0.0, u = 1.0;
        for (std::size_t k = 0; k < p.c.size(); ++k, u *= umax)
          bp += std::abs(p.c[k]) * u;
        u = 1.0;
        for (std::size_t k = 0; k < dp.c.size(); ++k, u *= umax)
          bdp += std::abs(dp.c[k]) * u;
        L += std::abs(t.coeff) * (std::abs(t.freq) * bp + bdp);
      }
      upper = std::max(upper, vm + 0.5 * h * L);
    }
  }
  upper = std::max(upper, lower);
  return RealBracket{lower, upper};
}

}  // namespace itp::fnalg
