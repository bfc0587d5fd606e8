#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <periodlab/derham.hpp>
#include <periodlab/errors.hpp>
#include <periodlab/numerics.hpp>
#include <periodlab/polylog.hpp>
#include <periodlab/rational.hpp>

namespace periodlab {

// One summand of a relative homology cycle. Travel pieces are paths in the
// ambient space; point pieces record boundary corrections on a divisor
// component and pair only with that component's constant.
struct CyclePiece {
  std::string component;
  std::optional<Path> path;
  Complex point{0.0, 0.0};
  Rat weight{1};
};

struct Cycle {
  std::string label;
  std::vector<CyclePiece> pieces;
};

// entries[i][j] pairs cycle j (column) with cohomology class i (row).
struct PeriodMatrix {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::vector<Complex>> entries;
};

inline const Complex& matrix_entry(const PeriodMatrix& P, const std::string& row,
                                   const std::string& col) {
  const auto r = std::find(P.row_labels.begin(), P.row_labels.end(), row);
  const auto c = std::find(P.col_labels.begin(), P.col_labels.end(), col);
  if (r == P.row_labels.end() || c == P.col_labels.end())
    throw UsageError("matrix_entry: no entry labeled (" + row + ", " + col + ")");
  return P.entries[static_cast<size_t>(r - P.row_labels.begin())]
                  [static_cast<size_t>(c - P.col_labels.begin())];
}

inline Complex matrix_det(const PeriodMatrix& P) {
  const size_t n = P.row_labels.size();
  if (P.col_labels.size() != n || P.entries.size() != n)
    throw DimensionMismatch("matrix_det: period matrix is not square");
  std::vector<std::vector<Complex>> a = P.entries;
  for (const auto& row : a)
    if (row.size() != n) throw DimensionMismatch("matrix_det: ragged period matrix");
  Complex det(1.0, 0.0);
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) == 0.0) return Complex(0.0, 0.0);
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (size_t r = col + 1; r < n; ++r) {
      const Complex factor = a[r][col] / a[col][col];
      for (size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  return det;
}

inline Complex laurent_eval_complex(const LaurentPoly& f, Complex z) {
  Complex acc(0.0, 0.0);
  for (const auto& [e, c] : f.coeff) acc += c.to_complex() * std::pow(z, static_cast<double>(e));
  return acc;
}

namespace detail_periods {

inline int divisor_index(const std::string& component) {
  if (component == "ambient") return -1;
  if (component.size() >= 2 && component[0] == 'D') {
    const int k = std::atoi(component.c_str() + 1);
    if (k >= 1) return k - 1;
  }
  throw UnsupportedConfiguration("cycle piece: unknown component tag '" + component + "'");
}

inline std::string interval_label(const Rat& lo, const Rat& hi) {
  return "[" + rat_to_string(lo) + "," + rat_to_string(hi) + "]";
}

}  // namespace detail_periods

// Cycle basis for a punctured-line pair: the counterclockwise loop around the
// puncture first, then one corrected interval per consecutive divisor pair
// (or the difference of the two coincident points in the degenerate case).
// epsilon = 0 picks the default loop radius, a quarter of the distance from
// the puncture to the divisor.
inline std::vector<Cycle> homology_cycles_punctured_line(const PuncturedLinePair& pair,
                                                         double epsilon = 0.0) {
  const PairKind kind = classify_pair(pair);
  const auto& d = pair.divisor_points;
  double min_dist = std::numeric_limits<double>::infinity();
  for (const Rat& p : d) min_dist = std::min(min_dist, std::abs(rat_to_double(p)));
  if (epsilon == 0.0) epsilon = 0.25 * min_dist;
  if (!(epsilon > 0.0) || epsilon >= min_dist)
    throw UnsupportedConfiguration("homology cycles: loop radius must lie in (0, distance to divisor)");
  if (kind != PairKind::kDoublePoint) {
    for (size_t j = 0; j + 1 < d.size(); ++j) {
      if (d[j] >= d[j + 1])
        throw UnsupportedConfiguration("homology cycles: divisor points must increase strictly");
      if (d[j] < 0 && d[j + 1] > 0)
        throw UnsupportedConfiguration("homology cycles: interval would cross the puncture");
    }
  }

  std::vector<Cycle> cycles;
  Cycle sigma{"sigma", {}};
  sigma.pieces.push_back({"ambient", make_loop(Complex(0.0, 0.0), epsilon, true), Complex(), Rat(1)});
  cycles.push_back(std::move(sigma));

  if (kind == PairKind::kDoublePoint) {
    const Complex at(rat_to_double(d[0]), 0.0);
    Cycle diff{"D1 - D2", {}};
    diff.pieces.push_back({"D1", std::nullopt, at, Rat(1)});
    diff.pieces.push_back({"D2", std::nullopt, at, Rat(-1)});
    cycles.push_back(std::move(diff));
    return cycles;
  }

  for (size_t j = 0; j + 1 < d.size(); ++j) {
    const Complex lo(rat_to_double(d[j]), 0.0);
    const Complex hi(rat_to_double(d[j + 1]), 0.0);
    Cycle seg{detail_periods::interval_label(d[j], d[j + 1]), {}};
    seg.pieces.push_back({"ambient", segment_path(lo, hi), Complex(), Rat(1)});
    seg.pieces.push_back({"D" + std::to_string(j + 1), std::nullopt, lo, Rat(1)});
    seg.pieces.push_back({"D" + std::to_string(j + 2), std::nullopt, hi, Rat(-1)});
    cycles.push_back(std::move(seg));
  }
  return cycles;
}

// Representatives behind the labels of basis_punctured_line, in label order.
inline std::vector<RelativeOneForm> basis_elements_punctured_line(const PuncturedLinePair& pair) {
  const PairKind kind = classify_pair(pair);
  const size_t nd = pair.divisor_points.size();
  RelativeOneForm dlog;
  dlog.form.coeff[-1] = GaussRat(1);
  dlog.divisor_constants.assign(nd, GaussRat(0));
  switch (kind) {
    case PairKind::kTwoPoints: {
      RelativeOneForm scaled;
      scaled.form.coeff[0] = GaussRat(Rat(1) / (pair.divisor_points[1] - pair.divisor_points[0]));
      scaled.divisor_constants.assign(nd, GaussRat(0));
      return {dlog, scaled};
    }
    case PairKind::kDoublePoint: {
      RelativeOneForm fn;
      fn.divisor_constants = {GaussRat(1), GaussRat(0)};
      return {dlog, fn};
    }
    case PairKind::kThreePoints: {
      RelativeOneForm dt;
      dt.form.coeff[0] = GaussRat(1);
      dt.divisor_constants.assign(nd, GaussRat(0));
      RelativeOneForm twotdt;
      twotdt.form.coeff[1] = GaussRat(2);
      twotdt.divisor_constants.assign(nd, GaussRat(0));
      return {dlog, dt, twotdt};
    }
  }
  throw InvalidPair("punctured-line pair: unrecognized configuration");
}

// Numeric pairing of a relative cycle with a degree-1 element: path pieces
// integrate the form part, point pieces read off the matching component's
// constant. Point pieces must sit on their component within 1e-10.
inline Complex pair_cycle_with_element(const Cycle& cycle, const RelativeOneForm& elem,
                                       const PuncturedLinePair& pair,
                                       const QuadratureConfig& cfg = {}) {
  classify_pair(pair);
  Complex total(0.0, 0.0);
  for (const CyclePiece& piece : cycle.pieces) {
    const int di = detail_periods::divisor_index(piece.component);
    const double w = rat_to_double(piece.weight);
    if (piece.path) {
      if (di >= 0)
        throw UnsupportedConfiguration("cycle piece: divisor components carry points, not paths");
      total += w * integrate_path([&elem](Complex z) { return laurent_eval_complex(elem.form, z); },
                                  *piece.path, cfg);
    } else {
      if (di < 0)
        throw UnsupportedConfiguration("cycle piece: ambient pieces must be paths");
      if (static_cast<size_t>(di) >= elem.divisor_constants.size() ||
          static_cast<size_t>(di) >= pair.divisor_points.size())
        throw UnsupportedConfiguration("cycle piece: component index exceeds the divisor");
      const double residual =
          std::abs(piece.point - Complex(rat_to_double(pair.divisor_points[static_cast<size_t>(di)]), 0.0));
      if (residual > 1e-10)
        throw UnsupportedConfiguration("cycle piece: point is off its divisor component");
      total += w * elem.divisor_constants[static_cast<size_t>(di)].to_complex();
    }
  }
  return total;
}

inline PeriodMatrix period_matrix_punctured_line(const PuncturedLinePair& pair,
                                                 const QuadratureConfig& cfg = {},
                                                 double epsilon = 0.0) {
  const CohomologyBasis basis = basis_punctured_line(pair);
  const std::vector<RelativeOneForm> elems = basis_elements_punctured_line(pair);
  const std::vector<Cycle> cycles = homology_cycles_punctured_line(pair, epsilon);
  PeriodMatrix P;
  P.row_labels = basis.labels;
  for (const Cycle& c : cycles) P.col_labels.push_back(c.label);
  for (const RelativeOneForm& e : elems) {
    std::vector<Complex> row;
    for (const Cycle& c : cycles) row.push_back(pair_cycle_with_element(c, e, pair, cfg));
    P.entries.push_back(std::move(row));
  }
  return P;
}

// Period of y dx over the oval of ax^2 + by^2 = 1, computed on the
// complexified curve: u = sqrt(a)x - i sqrt(b)y parameterizes it by the unit
// circle, and the pullback picks out the residue at u = 0.
inline Complex period_quadric(const QuadricRing& ring, const QuadratureConfig& cfg = {}) {
  validate_ring(ring);
  const double a = rat_to_double(ring.a);
  const double b = rat_to_double(ring.b);
  if (a <= 0.0 || b <= 0.0)
    throw UnsupportedConfiguration("period_quadric: both coefficients must be positive");
  const double sa = std::sqrt(a);
  const double sb = std::sqrt(b);
  const Path circle = make_loop(Complex(0.0, 0.0), 1.0, true);
  auto g = [sa, sb](Complex u) {
    const Complex x_vel = (Complex(1.0, 0.0) - 1.0 / (u * u)) / (2.0 * sa);
    const Complex y_val = (1.0 / u - u) / (Complex(0.0, 2.0) * sb);
    return y_val * x_vel;
  };
  return integrate_path(g, circle, cfg);
}

// Base path 0 -> 1 detouring above every singular letter of the dilogarithm
// configuration that sits inside the unit interval.
inline BranchSpec dlog_default_branch(Complex a, Complex b) {
  std::vector<double> bumps;
  for (const Complex letter : {a, b, a / b}) {
    if (std::abs(letter.imag()) <= 1e-9 && letter.real() > 1e-9 && letter.real() < 1.0 - 1e-9)
      bumps.push_back(letter.real());
  }
  if (bumps.empty()) return principal_branch();
  std::sort(bumps.begin(), bumps.end());
  std::vector<PathPiece> pieces;
  double cursor = 0.0;
  for (size_t i = 0; i < bumps.size(); ++i) {
    double clear = std::min(bumps[i], 1.0 - bumps[i]);
    if (i > 0) clear = std::min(clear, (bumps[i] - bumps[i - 1]) / 2.0);
    if (i + 1 < bumps.size()) clear = std::min(clear, (bumps[i + 1] - bumps[i]) / 2.0);
    const double r = 0.25 * clear;
    if (bumps[i] - r > cursor + 1e-12)
      pieces.push_back(LineSegment{Complex(cursor, 0.0), Complex(bumps[i] - r, 0.0)});
    pieces.push_back(Arc{Complex(bumps[i], 0.0), r, kPi, 0.0});
    cursor = bumps[i] + r;
  }
  pieces.push_back(LineSegment{Complex(cursor, 0.0), Complex(1.0, 0.0)});
  BranchSpec branch;
  branch.base_path = make_path(std::move(pieces));
  return branch;
}

// 4x4 period matrix of the plane minus {x=a, y=b} relative to
// {x=0, y=1, x=y}. Rows omega_0..omega_3, columns Gamma_0 (triangle),
// Gamma_1, Gamma_2 (tubes), Gamma_3 (torus). All entries except the torus
// one come from logarithm and double-logarithm evaluations on the given
// branch; the torus entry is a genuine iterated contour integral.
inline PeriodMatrix period_matrix_dlog(Complex a, Complex b, const BranchSpec& branch,
                                       const QuadratureConfig& cfg = {}) {
  validate_branch(branch);
  const double tol = 1e-12;
  if (std::abs(a) < tol || std::abs(a - Complex(1.0, 0.0)) < tol || std::abs(b) < tol ||
      std::abs(b - Complex(1.0, 0.0)) < tol || std::abs(a - b) < tol)
    throw OnSingularDivisor("period_matrix_dlog: (a, b) meets the divisor or the removed lines");

  const Complex one(1.0, 0.0);
  auto li1 = [&](Complex x) { return li_via_integral(IndexWord{{1}}, {x}, branch, cfg); };

  double eps = std::min({std::abs(a), std::abs(b), std::abs(a - one), std::abs(b - one),
                         std::abs(a - b)});
  eps *= 0.25;
  // Offset charts u = x - a, v = y - b: circle points around the original
  // centers lose the offset digits to the center magnitude once eps is small,
  // and the integrand cannot be evaluated past that cancellation. The inner
  // tolerance is budgeted against the outer circle measure, since the inner
  // value grows like 1/eps while its weight in the outer sum shrinks like eps.
  const Path xcircle = make_loop(Complex(0.0, 0.0), eps, true);
  const Path ycircle = make_loop(Complex(0.0, 0.0), eps, true);
  QuadratureConfig inner_cfg = cfg;
  inner_cfg.abs_tol = std::max(cfg.abs_tol, cfg.abs_tol / (kTwoPi * eps));
  auto torus = integrate_path(
      [&](Complex u) {
        return integrate_path([&, u](Complex v) { return one / (u * v); }, ycircle, inner_cfg);
      },
      xcircle, cfg);

  // Principal log, with the imaginary part of a real negative ratio pinned to
  // +0 so the value does not depend on the sign of a rounding zero. This
  // branch pairs with the monodromy convention of a counterclockwise loop
  // whose access path passes below the collision point a = b.
  Complex ratio = (a - b) / (one - b);
  if (ratio.imag() == 0.0) ratio = Complex(ratio.real(), 0.0);

  PeriodMatrix P;
  P.row_labels = {"omega_0", "omega_1", "omega_2", "omega_3"};
  P.col_labels = {"Gamma_0", "Gamma_1", "Gamma_2", "Gamma_3"};
  const Complex zero(0.0, 0.0);
  P.entries = {
      {one, zero, zero, zero},
      {li1(one / b), kTwoPiI, zero, zero},
      {li1(one / a), zero, kTwoPiI, zero},
      {li11(b / a, one / b, branch, cfg), kTwoPiI * li1(b / a), kTwoPiI * std::log(ratio), torus},
  };
  return P;
}

inline PeriodMatrix period_matrix_dlog(Complex a, Complex b, const QuadratureConfig& cfg = {}) {
  return period_matrix_dlog(a, b, dlog_default_branch(a, b), cfg);
}

// Best rational approximation by continued fractions, rejected when no
// denominator up to max_den lands within tol.
inline Rat recognize_rational(double x, double tol = 1e-6, long max_den = 1000000) {
  if (!std::isfinite(x)) throw RecognitionFailed("recognize_rational: value is not finite");
  BigInt h_prev(1), h(static_cast<long long>(std::floor(x)));
  BigInt k_prev(0), k(1);
  double frac = x - std::floor(x);
  for (int iter = 0; iter < 64; ++iter) {
    const double approx = h.convert_to<double>() / k.convert_to<double>();
    if (std::abs(x - approx) <= tol) return Rat(h, k);
    if (frac < 1e-15) break;
    const double inv = 1.0 / frac;
    const double digit = std::floor(inv);
    if (digit > 1e15) break;
    frac = inv - digit;
    const BigInt d(static_cast<long long>(digit));
    BigInt h_next = d * h + h_prev;
    BigInt k_next = d * k + k_prev;
    h_prev = h;
    k_prev = k;
    h = h_next;
    k = k_next;
    if (k > max_den) break;
  }
  throw RecognitionFailed("recognize_rational: no small rational within tolerance");
}

// Recognizes (det P / (2 pi i)^n)^2 as a rational number. The square clears
// the leftover power of 2 pi i, so the result measures the algebraic part of
// the determinant.
inline Rat det_shape_check(const PeriodMatrix& P, int n, double tol = 1e-6) {
  Complex z = matrix_det(P);
  for (int i = 0; i < n; ++i) z /= kTwoPiI;
  for (int i = 0; i > n; --i) z *= kTwoPiI;
  const Complex sq = z * z;
  if (std::abs(sq.imag()) > tol * std::max(1.0, std::abs(sq.real())))
    throw RecognitionFailed("det_shape_check: squared ratio is not real");
  return recognize_rational(sq.real(), tol);
}

}  // namespace periodlab
