#pragma once

#include <complex>
#include <string>
#include <vector>

#include "itp/bracket.hpp"
#include "itp/errors.hpp"

namespace itp::fnalg {

using Cplx = std::complex<double>;

// Coefficient-wise comparison tolerance for normal forms.
constexpr double kNormTol = 1e-12;

// Per-piece polynomial degree cap; products that would exceed it throw
// DegreeOverflowError.  Mutable so runs can raise it through config.
int& degree_cap();

// Real polynomial in the local coordinate u = t - (left breakpoint of the
// piece), ascending powers.  Local coordinates keep high powers of short
// ramps well conditioned; plateaus are plain constants.
struct Poly {
  std::vector<double> c;

  double eval(double u) const;
  int degree() const { return static_cast<int>(c.size()) - 1; }
};

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, double s);
Poly poly_shift(const Poly& a, double s);  // p(u) -> p(u + s)
Poly poly_derivative(const Poly& a);
Poly poly_antiderivative(const Poly& a);
void poly_trim(Poly& a);

// Compactly supported piecewise polynomial: value 0 outside
// [breaks.front(), breaks.back()], polynomial pieces[i] on
// [breaks[i], breaks[i+1]] in local coordinates.  Normal form: strictly
// increasing breakpoints, no identically-zero end pieces, adjacent pieces
// with identical polynomials merged.
class PiecewisePoly {
 public:
  PiecewisePoly() = default;
  // Normalizes; throws InvalidArgError on malformed input.
  static PiecewisePoly make(std::vector<double> breaks,
                            std::vector<Poly> pieces);

  bool empty() const { return pieces_.empty(); }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<Poly>& pieces() const { return pieces_; }

  double eval(double t) const;
  double definite_integral(double a, double b) const;  // exact
  PiecewisePoly derivative() const;
  int max_degree() const;
  std::string canonical_key() const;

  friend PiecewisePoly pp_add(const PiecewisePoly& a, const PiecewisePoly& b);
  friend PiecewisePoly pp_mul(const PiecewisePoly& a, const PiecewisePoly& b);
  friend PiecewisePoly pp_scale(const PiecewisePoly& a, double s);

 private:
  std::vector<double> breaks_;
  std::vector<Poly> pieces_;
};

PiecewisePoly pp_add(const PiecewisePoly& a, const PiecewisePoly& b);
PiecewisePoly pp_mul(const PiecewisePoly& a, const PiecewisePoly& b);
PiecewisePoly pp_scale(const PiecewisePoly& a, double s);
bool pp_equal(const PiecewisePoly& a, const PiecewisePoly& b,
              double tol = kNormTol);

// Canonical trapezoid of level n: 1 on [-n, n], linear ramps to 0 on
// [-(n+1), -n] and [n, n+1].
PiecewisePoly trapezoid(int level);

// Finite combination  constant + sum coeff_j * e^{i freq_j t} * env_j(t)
// with real compactly supported envelopes.  Normal form: terms sorted by
// (frequency, envelope key), equal-frequency terms on identical envelopes
// merged, zero terms pruned.
class ScalarFn {
 public:
  struct Term {
    double freq = 0.0;
    PiecewisePoly env;
    Cplx coeff{1.0, 0.0};
  };

  ScalarFn() = default;  // the zero function

  static ScalarFn constant(Cplx c);
  static ScalarFn from_envelope(PiecewisePoly env, Cplx coeff = Cplx{1.0, 0.0},
                                double freq = 0.0);
  static ScalarFn make(Cplx constant, std::vector<Term> terms);

  Cplx constant_part() const { return constant_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const;
  bool is_constant() const { return terms_.empty(); }

  Cplx eval(double t) const;
  std::string canonical_key() const;

 private:
  Cplx constant_{0.0, 0.0};
  std::vector<Term> terms_;
};

ScalarFn sf_add(const ScalarFn& a, const ScalarFn& b);
ScalarFn sf_sub(const ScalarFn& a, const ScalarFn& b);
ScalarFn sf_scale(const ScalarFn& a, Cplx s);
// Exact normal-form product; throws DegreeOverflowError past the cap.
ScalarFn multiply(const ScalarFn& a, const ScalarFn& b);
ScalarFn conj_fn(const ScalarFn& a);
// Pointwise multiplication by e^{i x t}; rejects nonzero constant parts.
ScalarFn modulate(double x, const ScalarFn& a);
ScalarFn sf_pow(const ScalarFn& a, int e);

bool sf_equal(const ScalarFn& a, const ScalarFn& b, double tol = kNormTol);

// Canonical bump: the level-n trapezoid as an algebra element.
struct BumpFn {
  int level = 1;
  ScalarFn fn;
};

// Throws InvalidLevelError for level < 1.
BumpFn make_bump(int level);

// make_bump(level).fn evaluated at x, allocation-free
double bump_value(int level, double x);

// Certified enclosure of sup_t |f(t)| over all of R.  `refinement` is the
// number of subintervals per breakpoint gap (>= 2).  Upper bound combines
// midpoint samples with a per-subinterval derivative bound; lower bound is
// the best sample.  Width shrinks as refinement grows.
RealBracket sup_norm_bound(const ScalarFn& f, int refinement);

}  // namespace itp::fnalg
