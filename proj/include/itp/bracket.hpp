#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

namespace itp {

// Certified real enclosure [lo, hi].  Every number in this library that
// stands in for a limit or an integral travels inside one of these; test
// assertions consume the bracket, never a bare point estimate.
struct RealBracket {
  double lo = 0.0;
  double hi = 0.0;

  static RealBracket exact(double v) { return {v, v}; }
  static RealBracket around(double v, double err) {
    return {v - err, v + err};
  }

  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  bool contains(double v) const { return lo <= v && v <= hi; }

  RealBracket clamp01() const {
    return {std::clamp(lo, 0.0, 1.0), std::clamp(hi, 0.0, 1.0)};
  }

  // Valid for factors known to be nonnegative (our tail factors).
  RealBracket mul_nonneg(const RealBracket& o) const {
    return {lo * o.lo, hi * o.hi};
  }

  RealBracket intersect(const RealBracket& o) const {
    return {std::max(lo, o.lo), std::min(hi, o.hi)};
  }
};

// Certified complex enclosure: disk of given radius around value.
struct ComplexDisk {
  std::complex<double> value{0.0, 0.0};
  double radius = 0.0;

  static ComplexDisk exact(std::complex<double> v) { return {v, 0.0}; }

  bool contains(std::complex<double> v) const {
    return std::abs(v - value) <= radius;
  }

  ComplexDisk operator*(const ComplexDisk& o) const {
    // |ab' + a'b + a'b'| <= |a|r' + |b|r + r r'
    return {value * o.value,
            std::abs(value) * o.radius + std::abs(o.value) * radius +
                radius * o.radius};
  }

  ComplexDisk operator+(const ComplexDisk& o) const {
    return {value + o.value, radius + o.radius};
  }

  ComplexDisk scaled(std::complex<double> c) const {
    return {c * value, std::abs(c) * radius};
  }

  // Multiply by a real interval of nonnegative numbers (a tail product).
  ComplexDisk mul_interval(const RealBracket& iv) const {
    const double m = iv.mid();
    const double h = 0.5 * iv.width();
    return {value * m, radius * (std::abs(m) + h) + std::abs(value) * h};
  }
};

// Integer power by repeated multiplication; bit-for-bit reproducible and
// exact for the small exponents the calculus uses.
inline double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace itp
