#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <string>
#include <utility>

#include "errors.hpp"
#include "numerics.hpp"

namespace periodlab {

// ---------------------------------------------------------------------------
// Lattices and curves.

struct Lattice {
  Complex omega1;
  Complex omega2;
};

// Weierstrass coefficients: the curve y^2 = 4x^3 - 60 G4 x - 140 G6.
struct EllipticCurveQ {
  Complex G4;
  Complex G6;
};

inline void validate_lattice(const Lattice& lat) {
  const auto finite = [](Complex v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  };
  if (!finite(lat.omega1) || !finite(lat.omega2))
    throw UsageError("lattice: generators must be finite");
  if (std::abs(lat.omega1) == 0.0)
    throw DegenerateLattice("lattice: omega1 vanishes");
  const Complex ratio = lat.omega2 / lat.omega1;
  if (std::abs(ratio.imag()) <= 1e-12)
    throw DegenerateLattice("lattice: generators are linearly dependent over the reals");
  if (ratio.imag() < 0.0)
    throw UsageError("lattice: basis must satisfy Im(omega2/omega1) > 0");
}

// Normalizes the orientation by flipping omega2 when needed.
inline Lattice make_lattice(Complex omega1, Complex omega2) {
  Lattice lat{omega1, omega2};
  if (std::abs(omega1) > 0.0 && std::abs((omega2 / omega1).imag()) > 1e-12 &&
      (omega2 / omega1).imag() < 0.0)
    lat.omega2 = -omega2;
  validate_lattice(lat);
  return lat;
}

inline double lattice_covolume(const Lattice& lat) {
  validate_lattice(lat);
  return std::abs(std::imag(std::conj(lat.omega1) * lat.omega2));
}

namespace detail_elliptic {

struct KahanSum {
  Complex total{0.0, 0.0};
  Complex comp{0.0, 0.0};
  void add(Complex term) {
    const Complex y = term - comp;
    const Complex t = total + y;
    comp = (t - total) - y;
    total = t;
  }
};

// Shortest |x w1 + y w2| over the boundary of the sup-norm unit square; every
// lattice point with max(|m|,|n|) = s then has modulus at least s times this.
inline double min_unit_vector(const Lattice& lat) {
  const auto edge_min = [](Complex fixed, Complex sliding) {
    const double a = std::norm(sliding);
    const double b = std::real(std::conj(fixed) * sliding);
    double y = a > 0.0 ? -b / a : 0.0;
    y = std::clamp(y, -1.0, 1.0);
    return std::abs(fixed + y * sliding);
  };
  return std::min(edge_min(lat.omega1, lat.omega2), edge_min(lat.omega2, lat.omega1));
}

inline double max_unit_vector(const Lattice& lat) {
  return std::abs(lat.omega1) + std::abs(lat.omega2);
}

// Nearest lattice point to z, through the real coordinates of the basis.
inline Complex nearest_lattice_point(const Lattice& lat, Complex z) {
  const double det = std::imag(std::conj(lat.omega1) * lat.omega2);
  const double alpha =
      (z.real() * lat.omega2.imag() - z.imag() * lat.omega2.real()) / det;
  const double beta =
      (z.imag() * lat.omega1.real() - z.real() * lat.omega1.imag()) / det;
  return std::round(alpha) * lat.omega1 + std::round(beta) * lat.omega2;
}

}  // namespace detail_elliptic

// ---------------------------------------------------------------------------
// Eisenstein series and the Weierstrass functions as truncated lattice sums
// over the coordinate square |m|, |n| <= cutoff.

inline Complex eisenstein(const Lattice& lat, int k, long cutoff,
                          double* tail_estimate = nullptr) {
  validate_lattice(lat);
  if (k != 2 && k != 3) throw UsageError("eisenstein: only G4 (k = 2) and G6 (k = 3)");
  if (cutoff < 10) throw UsageError("eisenstein: cutoff must be at least 10");

  detail_elliptic::KahanSum sum;
  for (long m = -cutoff; m <= cutoff; ++m)
    for (long n = -cutoff; n <= cutoff; ++n) {
      if (m == 0 && n == 0) continue;
      const Complex w = static_cast<double>(m) * lat.omega1 +
                        static_cast<double>(n) * lat.omega2;
      const Complex iw = 1.0 / w;
      const Complex iw2 = iw * iw;
      const Complex iw4 = iw2 * iw2;
      sum.add(k == 2 ? iw4 : iw4 * iw2);
    }

  if (tail_estimate) {
    const double c = detail_elliptic::min_unit_vector(lat);
    const double N = static_cast<double>(cutoff);
    *tail_estimate = 8.0 * std::pow(c, -2.0 * k) * std::pow(N, 2.0 - 2.0 * k) /
                     (2.0 * k - 2.0);
  }
  return sum.total;
}

inline void require_off_lattice(const Lattice& lat, Complex z) {
  const Complex nearest = detail_elliptic::nearest_lattice_point(lat, z);
  if (std::abs(z - nearest) <= 1e-9 * detail_elliptic::min_unit_vector(lat))
    throw OnLattice("weierstrass evaluation: the point lies on the lattice");
}

// 1/z^2 + sum over +-omega pairs of (1/(z-w)^2 + 1/(z+w)^2 - 2/w^2); the
// symmetric pairing makes evenness exact and the summand O(w^-4).
inline Complex wp(const Lattice& lat, Complex z, long cutoff,
                  double* tail_estimate = nullptr) {
  validate_lattice(lat);
  if (cutoff < 10) throw UsageError("wp: cutoff must be at least 10");
  require_off_lattice(lat, z);

  detail_elliptic::KahanSum sum;
  sum.add(1.0 / (z * z));
  for (long m = 0; m <= cutoff; ++m) {
    const long n_lo = m == 0 ? 1 : -cutoff;
    for (long n = n_lo; n <= cutoff; ++n) {
      const Complex w = static_cast<double>(m) * lat.omega1 +
                        static_cast<double>(n) * lat.omega2;
      const Complex iw2 = 1.0 / (w * w);
      const Complex da = 1.0 / (z - w);
      const Complex db = 1.0 / (z + w);
      sum.add(da * da + db * db - 2.0 * iw2);
    }
  }

  if (tail_estimate) {
    const double c = detail_elliptic::min_unit_vector(lat);
    const double az = std::abs(z);
    if (c * static_cast<double>(cutoff + 1) <= 2.0 * az)
      *tail_estimate = std::numeric_limits<double>::infinity();
    else
      *tail_estimate = 128.0 * az * az / (std::pow(c, 4.0) * static_cast<double>(cutoff) *
                                          static_cast<double>(cutoff));
  }
  return sum.total;
}

inline Complex wp_prime(const Lattice& lat, Complex z, long cutoff,
                        double* tail_estimate = nullptr) {
  validate_lattice(lat);
  if (cutoff < 10) throw UsageError("wp_prime: cutoff must be at least 10");
  require_off_lattice(lat, z);

  detail_elliptic::KahanSum sum;
  sum.add(-2.0 / (z * z * z));
  for (long m = 0; m <= cutoff; ++m) {
    const long n_lo = m == 0 ? 1 : -cutoff;
    for (long n = n_lo; n <= cutoff; ++n) {
      const Complex w = static_cast<double>(m) * lat.omega1 +
                        static_cast<double>(n) * lat.omega2;
      const Complex da = 1.0 / (z - w);
      const Complex db = 1.0 / (z + w);
      sum.add(-2.0 * (da * da * da + db * db * db));
    }
  }

  if (tail_estimate) {
    const double c = detail_elliptic::min_unit_vector(lat);
    const double az = std::abs(z);
    if (c * static_cast<double>(cutoff + 1) <= 2.0 * az)
      *tail_estimate = std::numeric_limits<double>::infinity();
    else
      *tail_estimate = 160.0 * az / (std::pow(c, 4.0) * static_cast<double>(cutoff) *
                                     static_cast<double>(cutoff));
  }
  return sum.total;
}

inline EllipticCurveQ curve_from_lattice(const Lattice& lat, long cutoff) {
  return EllipticCurveQ{eisenstein(lat, 2, cutoff), eisenstein(lat, 3, cutoff)};
}

// ---------------------------------------------------------------------------
// Periods of the invariant differential dx/y.

inline void validate_curve(const EllipticCurveQ& curve) {
  const auto finite = [](Complex v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  };
  if (!finite(curve.G4) || !finite(curve.G6))
    throw UsageError("elliptic curve: coefficients must be finite");
  const Complex p = -15.0 * curve.G4;
  const Complex q = -35.0 * curve.G6;
  const Complex disc = -4.0 * p * p * p - 27.0 * q * q;
  const double scale = std::max({std::abs(p * p * p), std::abs(q * q), 1e-300});
  if (std::abs(disc) <= 1e-12 * scale)
    throw SingularCurve("elliptic curve: the cubic has a repeated root");
}

namespace detail_elliptic {

// Roots of x^3 + p x + q for real p, q with positive discriminant, by the
// trigonometric closed form, polished with two Newton steps.
inline std::array<double, 3> three_real_roots(double p, double q) {
  const double amp = 2.0 * std::sqrt(-p / 3.0);
  const double cosarg = std::clamp(3.0 * q / (p * amp), -1.0, 1.0);
  const double phi = std::acos(cosarg);
  std::array<double, 3> roots;
  for (int j = 0; j < 3; ++j) {
    double x = amp * std::cos((phi - kTwoPi * j) / 3.0);
    for (int it = 0; it < 2; ++it) {
      const double f = (x * x + p) * x + q;
      const double df = 3.0 * x * x + p;
      if (df != 0.0) x -= f / df;
    }
    roots[j] = x;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Branch of y on the upper half-plane: the product of principal square roots
// is analytic there, with cuts only on (-inf, e_min] and [e_mid, e_max].
inline Complex curve_sqrt_y(Complex x, const std::array<double, 3>& e) {
  return 2.0 * std::sqrt(x - e[0]) * std::sqrt(x - e[1]) * std::sqrt(x - e[2]);
}

// Integral of dx/y up the vertical leg from a root to root + i*delta. The
// substitution x = root + i*delta*u^2 cancels the inverse square root of the
// integrand against the Jacobian: dx/y = sqrt(i*delta) du / (sqrt(x-o1) sqrt(x-o2)),
// with the prefactor 2 of y absorbed by the Jacobian, leaving a smooth integrand.
inline Complex vertical_leg(double root, double other1, double other2, double delta,
                            const QuadratureConfig& cfg) {
  const Complex sqrt_idelta = std::sqrt(Complex(0.0, delta));
  return integrate_interval(
      [&](double u) {
        const Complex x(root, delta * u * u);
        return sqrt_idelta / (std::sqrt(x - other1) * std::sqrt(x - other2));
      },
      0.0, 1.0, cfg);
}

// Half-period integral of dx/y from root e[i] to e[j] along the segment
// lifted by a fixed imaginary shift, closed by vertical legs at the roots.
inline Complex half_period(const std::array<double, 3>& e, int i, int j, double delta,
                           const QuadratureConfig& cfg) {
  const double lo = e[static_cast<size_t>(i)];
  const double hi = e[static_cast<size_t>(j)];
  const auto others = [&](int skip) {
    std::array<double, 2> out{};
    size_t at = 0;
    for (int t = 0; t < 3; ++t)
      if (t != skip) out[at++] = e[static_cast<size_t>(t)];
    return out;
  };
  const auto [lo1, lo2] = others(i);
  const auto [hi1, hi2] = others(j);

  const Complex up_lo = vertical_leg(lo, lo1, lo2, delta, cfg);
  const Complex up_hi = vertical_leg(hi, hi1, hi2, delta, cfg);
  const Complex across = integrate_interval(
      [&](double u) {
        const Complex x(lo + (hi - lo) * u, delta);
        return (hi - lo) / curve_sqrt_y(x, e);
      },
      0.0, 1.0, cfg);
  return up_lo + across - up_hi;
}

}  // namespace detail_elliptic

inline Lattice periods_from_curve(const EllipticCurveQ& curve,
                                  const QuadratureConfig& cfg = {}) {
  validate_curve(curve);
  const Complex pc = -15.0 * curve.G4;
  const Complex qc = -35.0 * curve.G6;
  const bool real_coeffs = std::abs(pc.imag()) <= 1e-9 * (1.0 + std::abs(pc)) &&
                           std::abs(qc.imag()) <= 1e-9 * (1.0 + std::abs(qc));
  const double p = pc.real();
  const double q = qc.real();
  if (!real_coeffs || -4.0 * p * p * p - 27.0 * q * q <= 0.0)
    throw UnsupportedConfiguration(
        "periods_from_curve: contour placement needs three real roots");

  const std::array<double, 3> e = detail_elliptic::three_real_roots(p, q);
  const double delta = (e[2] - e[0]) / 20.0;

  const Complex half_a = detail_elliptic::half_period(e, 0, 1, delta, cfg);
  const Complex half_b = detail_elliptic::half_period(e, 1, 2, delta, cfg);
  Complex omega1 = 2.0 * half_a;
  Complex omega2 = 2.0 * half_b;
  if (std::abs(omega1) == 0.0 || !std::isfinite(std::abs(omega1)) ||
      !std::isfinite(std::abs(omega2)))
    throw NonConvergent("periods_from_curve: cycle integral failed");
  const double orient = (omega2 / omega1).imag();
  if (std::abs(orient) <= 1e-12)
    throw NonConvergent("periods_from_curve: recovered basis is degenerate");
  if (orient < 0.0) omega2 = -omega2;
  return Lattice{omega1, omega2};
}

// ---------------------------------------------------------------------------
// The tau invariant and its fundamental-domain representative.

inline Complex tau_invariant(Complex omega1, Complex omega2) {
  if (std::abs(omega1) == 0.0)
    throw DegenerateLattice("tau_invariant: omega1 vanishes");
  Complex tau = omega2 / omega1;
  if (std::abs(tau.imag()) <= 1e-12)
    throw DegenerateLattice("tau_invariant: periods are linearly dependent over the reals");
  if (tau.imag() < 0.0) tau = -tau;
  return tau;
}

// Standard generator moves until |Re tau| <= 1/2 and |tau| >= 1.
inline Complex fundamental_domain_tau(Complex tau) {
  if (!(tau.imag() > 1e-12))
    throw DegenerateLattice("fundamental_domain_tau: tau must lie in the upper half-plane");
  for (int step = 0; step < 256; ++step) {
    tau = Complex(tau.real() - std::round(tau.real()), tau.imag());
    if (std::norm(tau) < 1.0 - 1e-14)
      tau = -1.0 / tau;
    else
      return tau;
  }
  throw NonConvergent("fundamental_domain_tau: reduction did not terminate");
}

}  // namespace periodlab
