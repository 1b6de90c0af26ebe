#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "itp/fnalg.hpp"

namespace itp::measures {

using fnalg::Cplx;
using fnalg::PiecewisePoly;
using fnalg::ScalarFn;

enum class MKind { Gaussian, Uniform, Density };

// Probability measure on R: centered Gaussian, Uniform(a, b), or a
// normalized piecewise polynomial density.
class Measure1D {
 public:
  static Measure1D gaussian(double sigma);
  static Measure1D uniform(double a, double b);
  // Validates nonnegativity on a sample grid and normalizes total mass to 1.
  static Measure1D density(const PiecewisePoly& raw);

  MKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  double lo() const { return a_; }
  double hi() const { return b_; }
  const PiecewisePoly& pdf() const { return density_; }
  const std::string& key() const { return key_; }
  bool operator==(const Measure1D& o) const { return key_ == o.key_; }

 private:
  Measure1D() = default;
  MKind kind_ = MKind::Gaussian;
  double sigma_ = 1.0;
  double a_ = 0.0, b_ = 1.0;
  PiecewisePoly density_;
  std::string key_;
};

struct QuadratureCfg {
  double abs_tol = 1e-10;      // target total error bound per integral
  double sigma_radius = 8.0;   // Gaussian truncation at +- radius * sigma
  int max_segments = 4096;     // adaptive subdivision cap
  void validate() const;
};

// value together with a certified absolute error bound.
struct IntegralValue {
  Cplx value{0.0, 0.0};
  double err = 0.0;
};

// integral of f dmu with a certified bound.  Adaptive Gauss-Kronrod with
// subdivision forced at every envelope/density breakpoint; exact
// antiderivative path for frequency-0 terms against Uniform/Density.
// Throws QuadratureFailureError when abs_tol is unreachable.
IntegralValue integrate(const ScalarFn& f, const Measure1D& mu,
                        const QuadratureCfg& cfg = {});

// Characteristic function  integral of e^{i x t} dmu(t).  Closed forms for
// Gaussian (e^{-sigma^2 x^2 / 2}) and Uniform (shifted sinc); quadrature
// for Density.
Cplx char_fn(const Measure1D& mu, double x, const QuadratureCfg& cfg = {});

// mu([-k, k]); exact (erf / overlap / antiderivative).
double plateau_mass(const Measure1D& mu, double k);

// Coordinate measures: explicit prefix, then an eventually-repeating cycle.
class ProductMeasure {
 public:
  static ProductMeasure iid(const Measure1D& m);
  static ProductMeasure of(std::vector<Measure1D> prefix,
                           std::vector<Measure1D> cycle);

  const Measure1D& at(int n) const;  // coordinates are 1-based
  int prefix_len() const { return static_cast<int>(prefix_.size()); }
  int cycle_len() const { return static_cast<int>(cycle_.size()); }
  const std::string& key() const { return key_; }
  bool operator==(const ProductMeasure& o) const { return key_ == o.key_; }

 private:
  std::vector<Measure1D> prefix_;
  std::vector<Measure1D> cycle_;
  std::string key_;
};

enum class BudgetKind { Pow2, Quartic };

// 2^-n or n^-4.
double budget_value(BudgetKind kind, int n);
// Sum of budget values for all coordinates past n (closed-form bound).
double budget_tail_sum(BudgetKind kind, int n);

// Least level k with 1 - plateau_mass(mu_n, k) <= budget(n), per coordinate
// up to depth.  Throws HeavyTailError when the search passes level_cap.
std::vector<int> select_levels(const ProductMeasure& mu, BudgetKind budget,
                               int depth, long level_cap = 1000000);

// One draw from mu, keyed by (seed, stream, counter): inverse CDF of a
// counter-based uniform, so any evaluation order reproduces the matrix.
double sample_one(const Measure1D& mu, std::uint64_t seed,
                  std::uint64_t stream, std::uint64_t counter);

// count x depth row-major matrix; entry (r, n) uses stream n+1, counter r.
std::vector<double> sample_matrix(const ProductMeasure& mu, int depth,
                                  int count, std::uint64_t seed);

}  // namespace itp::measures
