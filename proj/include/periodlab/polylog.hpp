#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "extrapolate.hpp"
#include "numerics.hpp"

namespace periodlab {

struct IndexWord {
  std::vector<int> m;
};

struct HyperlogWord {
  std::vector<Complex> a;
};

// A branch of a hyperlogarithm is a homotopy class of integration paths:
// the base path from 0 to 1 plus closed loops prepended at the basepoint.
struct BranchSpec {
  Path base_path = segment_path(Complex(0.0, 0.0), Complex(1.0, 0.0));
  std::vector<Path> loops;
};

inline BranchSpec principal_branch() { return BranchSpec{}; }

inline void validate_branch(const BranchSpec& branch) {
  validate_path(branch.base_path);
  if (std::abs(path_start(branch.base_path)) > kEndpointTol)
    throw EndpointMismatch("BranchSpec: base path must start at 0");
  if (std::abs(path_end(branch.base_path) - Complex(1.0, 0.0)) > kEndpointTol)
    throw EndpointMismatch("BranchSpec: base path must end at 1");
  for (const auto& loop : branch.loops) {
    validate_path(loop);
    if (std::abs(path_start(loop) - path_end(loop)) > kEndpointTol)
      throw EndpointMismatch("BranchSpec: continuation loops must be closed");
    if (std::abs(path_start(loop)) > kEndpointTol)
      throw EndpointMismatch("BranchSpec: continuation loops must be based at 0");
  }
}

// ---------------------------------------------------------------------------
// Multiple polylogarithm power series.
//
// Li_{m_1..m_n}(x_1..x_n) sums x_1^{k_1}..x_n^{k_n} / (k_1^{m_1}..k_n^{m_n})
// over 0 < k_1 < ... < k_n. The recursion h_j(K) = h_j(K-1) +
// x_j^K/K^{m_j} h_{j-1}(K-1) advances all depths one outer index at a time.

namespace detail_polylog {

// Tail of sum_{k>K} k^{-m} by Euler-Maclaurin, for the |x_n| = 1 boundary.
inline double zeta_tail(long K, int m) {
  const double A = static_cast<double>(K) + 1.0;
  const double md = static_cast<double>(m);
  return std::pow(A, 1.0 - md) / (md - 1.0) + 0.5 * std::pow(A, -md) +
         md / 12.0 * std::pow(A, -md - 1.0) -
         md * (md + 1.0) * (md + 2.0) / 720.0 * std::pow(A, -md - 3.0);
}

}  // namespace detail_polylog

inline Complex li_series(const IndexWord& m, const std::vector<Complex>& x, double tol) {
  const size_t n = m.m.size();
  if (n == 0) throw DimensionMismatch("li_series: index word must be non-empty");
  if (x.size() != n) throw DimensionMismatch("li_series: index and argument lengths differ");
  if (!(tol > 0.0)) throw PeriodlabError("li_series: tolerance must be positive");
  for (int mi : m.m)
    if (mi < 1) throw PeriodlabError("li_series: indices must be positive integers");
  for (const Complex& xi : x) {
    if (std::abs(xi) == 0.0) return Complex(0.0, 0.0);
    if (std::abs(xi) > 1.0 + 1e-14) throw Divergent("li_series: an argument lies outside the closed unit disc");
  }
  for (size_t i = 0; i < n; ++i)
    if (std::abs(x[i]) > 1.0 - 1e-12 && m.m[i] < 2)
      throw Divergent("li_series: boundary arguments need index at least 2");

  const Complex topx = x[n - 1];
  const double atop = std::abs(topx);
  const int topm = m.m[n - 1];
  const bool top_interior = atop <= 1.0 - 1e-12;
  const bool top_at_one = std::abs(topx - Complex(1.0, 0.0)) <= 1e-13;

  std::vector<Complex> h(n + 1, Complex(0.0, 0.0));
  h[0] = Complex(1.0, 0.0);
  std::vector<Complex> pw(n + 1, Complex(1.0, 0.0));
  double inner_bound = 1.0;
  Complex last_candidate{0.0, 0.0};
  bool have_candidate = false;

  const long cap = 1000000;
  for (long K = 1; K <= cap; ++K) {
    for (size_t j = n; j >= 1; --j) {
      pw[j] *= x[j - 1];
      double km = 1.0;
      for (int t = 0; t < m.m[j - 1]; ++t) km *= static_cast<double>(K);
      h[j] += pw[j] / km * h[j - 1];
    }
    inner_bound = std::max(inner_bound, std::abs(h[n - 1]));

    if (K < 8) continue;
    if (top_interior) {
      double km = 1.0;
      for (int t = 0; t < topm; ++t) km *= static_cast<double>(K + 1);
      const double tail = inner_bound * std::pow(atop, static_cast<double>(K + 1)) /
                          ((1.0 - atop) * km);
      if (tail <= 0.5 * tol) return h[n];
    } else if (top_at_one) {
      if (K >= 256 && (K & (K - 1)) == 0) {
        const Complex candidate = h[n] + h[n - 1] * detail_polylog::zeta_tail(K, topm);
        if (have_candidate && std::abs(candidate - last_candidate) <= 0.5 * tol)
          return candidate;
        last_candidate = candidate;
        have_candidate = true;
      }
    } else {
      double km = 1.0;
      for (int t = 0; t < topm; ++t) km *= static_cast<double>(K + 1);
      const double tail = 2.0 * inner_bound / (std::abs(Complex(1.0, 0.0) - topx) * km);
      if (tail <= 0.5 * tol) return h[n];
    }
  }
  throw NonConvergent("li_series: term cap reached before the tail bound was met");
}

// ---------------------------------------------------------------------------
// Hyperlogarithms: iterated integrals of dt/(t - a_i) along a path, computed
// by advancing the vector of partial iterated integrals across Chebyshev
// panels. Panels are sized by distance to the nearest word letter, which
// keeps the 32-term expansions at full double precision.

namespace detail_polylog {

inline constexpr int kChebOrder = 32;

struct ChebTables {
  std::array<double, kChebOrder> theta{};
  std::array<double, kChebOrder> node{};
  // cosk[k][m] = cos(k * theta_m), k up to kChebOrder inclusive.
  std::array<std::array<double, kChebOrder>, kChebOrder + 1> cosk{};
};

inline const ChebTables& cheb_tables() {
  static const ChebTables tables = [] {
    ChebTables t;
    for (int m = 0; m < kChebOrder; ++m) {
      t.theta[static_cast<size_t>(m)] = kPi * (m + 0.5) / kChebOrder;
      t.node[static_cast<size_t>(m)] = std::cos(t.theta[static_cast<size_t>(m)]);
    }
    for (int k = 0; k <= kChebOrder; ++k)
      for (int m = 0; m < kChebOrder; ++m)
        t.cosk[static_cast<size_t>(k)][static_cast<size_t>(m)] =
            std::cos(k * t.theta[static_cast<size_t>(m)]);
    return t;
  }();
  return tables;
}

struct Panel {
  PathPiece piece;
  double u0;
  double u1;
};

inline double piece_arc_length(const PathPiece& p) {
  if (const auto* seg = std::get_if<LineSegment>(&p)) return std::abs(seg->end - seg->start);
  const auto& arc = std::get<Arc>(p);
  return arc.radius * std::abs(arc.angle_end - arc.angle_start);
}

inline std::vector<Panel> panelize(const std::vector<PathPiece>& pieces,
                                   const std::vector<Complex>& letters, Complex start) {
  std::vector<Complex> active;
  for (const Complex& a : letters)
    if (std::abs(a - start) > 1e-13) active.push_back(a);

  std::vector<Panel> out;
  for (const auto& piece : pieces) {
    const double full_len = piece_arc_length(piece);
    const bool is_arc = std::holds_alternative<Arc>(piece);
    const double sweep = is_arc ? std::abs(std::get<Arc>(piece).angle_end -
                                           std::get<Arc>(piece).angle_start)
                                : 0.0;
    const auto emit = [&](const auto& self, double u0, double u1) -> void {
      const double len = full_len * (u1 - u0);
      double dist = std::numeric_limits<double>::infinity();
      for (double u : {u0, 0.5 * (u0 + u1), u1}) {
        const Complex z = piece_point(piece, u);
        for (const Complex& a : active) dist = std::min(dist, std::abs(z - a));
      }
      const bool small_enough = len <= 0.5 * dist && (!is_arc || sweep * (u1 - u0) <= kPi / 2.0);
      if (small_enough) {
        out.push_back(Panel{piece, u0, u1});
        return;
      }
      if (len < 1e-12)
        throw SingularOnPath("hyperlog: a word letter lies on the integration path");
      if (out.size() > 20000)
        throw SingularOnPath("hyperlog: panel budget exhausted near a word letter");
      const double mid = 0.5 * (u0 + u1);
      self(self, u0, mid);
      self(self, mid, u1);
    };
    emit(emit, 0.0, 1.0);
  }
  return out;
}

// Advance the partial iterated integrals F_1..F_n across one panel; F[0] = 1.
inline void advance_panel(const Panel& panel, const std::vector<Complex>& letters,
                          std::vector<Complex>& F) {
  const auto& T = cheb_tables();
  constexpr int M = kChebOrder;
  const double du = 0.5 * (panel.u1 - panel.u0);

  std::array<Complex, M> z, v;
  for (int i = 0; i < M; ++i) {
    const double u = panel.u0 + (T.node[static_cast<size_t>(i)] + 1.0) * du;
    z[static_cast<size_t>(i)] = piece_point(panel.piece, u);
    v[static_cast<size_t>(i)] = piece_velocity(panel.piece, u) * du;
  }

  std::array<Complex, M> prev;
  prev.fill(F[0]);
  std::array<Complex, M> g, next;
  std::array<Complex, M + 1> c{}, b{};

  for (size_t j = 1; j < F.size(); ++j) {
    const Complex a = letters[j - 1];
    for (int i = 0; i < M; ++i)
      g[static_cast<size_t>(i)] =
          prev[static_cast<size_t>(i)] * v[static_cast<size_t>(i)] /
          (z[static_cast<size_t>(i)] - a);

    for (int k = 0; k < M; ++k) {
      Complex acc{0.0, 0.0};
      for (int i = 0; i < M; ++i)
        acc += g[static_cast<size_t>(i)] * T.cosk[static_cast<size_t>(k)][static_cast<size_t>(i)];
      c[static_cast<size_t>(k)] = acc * ((k == 0 ? 1.0 : 2.0) / M);
    }
    c[M] = Complex(0.0, 0.0);

    b[1] = c[0] - 0.5 * c[2];
    for (int k = 2; k <= M; ++k)
      b[static_cast<size_t>(k)] =
          (c[static_cast<size_t>(k - 1)] - (k + 1 <= M ? c[static_cast<size_t>(k + 1)]
                                                       : Complex(0.0, 0.0))) /
          (2.0 * k);

    Complex at_minus_one{0.0, 0.0};
    Complex at_plus_one{0.0, 0.0};
    for (int k = 1; k <= M; ++k) {
      at_minus_one += b[static_cast<size_t>(k)] * (k % 2 == 0 ? 1.0 : -1.0);
      at_plus_one += b[static_cast<size_t>(k)];
    }
    const Complex b0 = F[j] - at_minus_one;

    for (int i = 0; i < M; ++i) {
      Complex acc = b0;
      for (int k = 1; k <= M; ++k)
        acc += b[static_cast<size_t>(k)] * T.cosk[static_cast<size_t>(k)][static_cast<size_t>(i)];
      next[static_cast<size_t>(i)] = acc;
    }
    F[j] = b0 + at_plus_one;
    prev = next;
  }
}

// Run the word along concatenated pieces, starting from the germ in F.
inline Complex run_word(const std::vector<Complex>& letters,
                        const std::vector<PathPiece>& pieces, std::vector<Complex>& F) {
  const Complex start = piece_start(pieces.front());
  if (!letters.empty() && std::abs(letters.front() - start) <= 1e-13)
    throw SingularOnPath("hyperlog: the first word letter sits at the basepoint");
  const std::vector<Panel> panels = panelize(pieces, letters, start);
  for (const auto& panel : panels) advance_panel(panel, letters, F);
  return F.back();
}

}  // namespace detail_polylog

inline Complex hyperlog(const HyperlogWord& word, const BranchSpec& branch,
                        const QuadratureConfig& cfg) {
  validate(cfg);
  validate_branch(branch);
  if (word.a.empty()) return Complex(1.0, 0.0);

  std::vector<PathPiece> pieces;
  for (const auto& loop : branch.loops) {
    const auto tp = traversal_pieces(loop);
    pieces.insert(pieces.end(), tp.begin(), tp.end());
  }
  const auto base = traversal_pieces(branch.base_path);
  pieces.insert(pieces.end(), base.begin(), base.end());

  if (!branch.loops.empty())
    for (const Complex& a : word.a)
      if (std::abs(a - piece_start(pieces.front())) <= 1e-13)
        throw SingularOnPath("hyperlog: continuation loops through a letter at the basepoint");

  std::vector<Complex> F(word.a.size() + 1, Complex(0.0, 0.0));
  F[0] = Complex(1.0, 0.0);
  return detail_polylog::run_word(word.a, pieces, F);
}

// Li via the iterated integral: letters a_k = 1/(x_k...x_n) followed by
// m_k - 1 zeros, overall sign (-1)^depth.
inline Complex li_via_integral(const IndexWord& m, const std::vector<Complex>& x,
                               const BranchSpec& branch, const QuadratureConfig& cfg = {}) {
  const size_t n = m.m.size();
  if (n == 0) throw DimensionMismatch("li_via_integral: index word must be non-empty");
  if (x.size() != n)
    throw DimensionMismatch("li_via_integral: index and argument lengths differ");
  for (const Complex& xi : x)
    if (std::abs(xi) == 0.0) return Complex(0.0, 0.0);

  std::vector<Complex> a(n);
  Complex suffix{1.0, 0.0};
  for (size_t k = n; k >= 1; --k) {
    suffix *= x[k - 1];
    a[k - 1] = Complex(1.0, 0.0) / suffix;
  }

  HyperlogWord word;
  for (size_t k = 0; k < n; ++k) {
    word.a.push_back(a[k]);
    for (int t = 1; t < m.m[k]; ++t) word.a.push_back(Complex(0.0, 0.0));
  }
  const Complex value = hyperlog(word, branch, cfg);
  return (n % 2 == 1) ? -value : value;
}

// ---------------------------------------------------------------------------
// The dilogarithm and double logarithm with dispatch between the series,
// the iterated integral, and special charts.

inline Complex li2(Complex x, const BranchSpec& branch = principal_branch(),
                   const QuadratureConfig& cfg = {}) {
  if (std::abs(x) <= 1e-14) return Complex(0.0, 0.0);
  if (std::abs(x - Complex(1.0, 0.0)) <= 1e-12) {
    // Radial Abel limit: approach 1 along the real axis and extrapolate. The
    // error ladder is delta^k and delta^k*log(delta) jointly, so each power
    // is eliminated twice: once to strip the log factor, once to remove it.
    std::vector<Complex> row;
    for (int j = 0; j < 9; ++j) {
      const double delta = 0.1 * std::pow(0.5, j);
      row.push_back(li_via_integral(IndexWord{{2}}, {Complex(1.0 - delta, 0.0)}, branch, cfg));
    }
    for (int step = 0; step < 8 && row.size() > 1; ++step) {
      const double factor = std::pow(2.0, 1 + step / 2);
      std::vector<Complex> next;
      for (size_t j = 0; j + 1 < row.size(); ++j)
        next.push_back((factor * row[j + 1] - row[j]) / (factor - 1.0));
      row = std::move(next);
    }
    return row.front();
  }
  if (std::abs(x) <= 0.6) return li_series(IndexWord{{2}}, {x}, 1e-13);
  return li_via_integral(IndexWord{{2}}, {x}, branch, cfg);
}

inline Complex li11(Complex x, Complex y, const BranchSpec& branch = principal_branch(),
                    const QuadratureConfig& cfg = {}) {
  if (std::abs(x) <= 1e-14 || std::abs(y) <= 1e-14) return Complex(0.0, 0.0);
  if (std::abs(y - Complex(1.0, 0.0)) <= 1e-12)
    throw OnSingularDivisor("li11: the divisor y = 1 is outside the domain");
  if (std::abs(x * y - Complex(1.0, 0.0)) <= 1e-12) {
    // On the divisor xy = 1 the reordered series sum_d y^d H_d / d converges
    // for |y| < 1 and realizes the analytic continuation from the chart.
    if (std::abs(y) >= 1.0 - 1e-9)
      throw OnSingularDivisor("li11: the point on xy = 1 lies outside the convergent chart");
    const double ay = std::abs(y);
    Complex total{0.0, 0.0};
    Complex pw{1.0, 0.0};
    double harmonic = 0.0;
    for (long d = 1; d <= 1000000; ++d) {
      harmonic += 1.0 / static_cast<double>(d);
      pw *= y;
      total += pw * (harmonic / static_cast<double>(d));
      const double tail = std::pow(ay, static_cast<double>(d + 1)) / (1.0 - ay);
      if (d >= 8 && tail <= 1e-14) return total;
    }
    throw NonConvergent("li11: divisor series cap reached");
  }
  if (std::abs(x) <= 0.6 && std::abs(y) <= 0.6)
    return li_series(IndexWord{{1, 1}}, {x, y}, 1e-13);
  return li_via_integral(IndexWord{{1, 1}}, {x, y}, branch, cfg);
}

// ---------------------------------------------------------------------------
// Monodromy increments: the change of a function germ after continuation
// around a closed parameter loop.

enum class MonodromyFunction {
  kLi1OverA,  // Li_1(1/a) as a function of a
  kLi2,       // Li_2(c) as a function of c
  kLi11,      // Li_{1,1}(b/a, 1/b) as a function of a, b held
};

namespace detail_polylog {

struct AxisCrossing {
  double u;
  double xi;
  int sigma;  // +1 when crossing from the upper to the lower half plane
};

inline void crossings_of_unit_interval(const PathPiece& piece,
                                       std::vector<AxisCrossing>& out) {
  const auto classify = [&](double u, double xi, int sigma) {
    if (xi > 1e-9 && xi < 1.0 - 1e-9) {
      out.push_back(AxisCrossing{u, xi, sigma});
      return;
    }
    if (xi > -1e-9 && xi < 1.0 + 1e-9)
      throw SingularOnPath("monodromy_increment: loop passes through 0 or 1");
  };

  if (const auto* seg = std::get_if<LineSegment>(&piece)) {
    const double y0 = seg->start.imag(), y1 = seg->end.imag();
    if (y0 == 0.0 && y1 == 0.0) {
      const double lo = std::min(seg->start.real(), seg->end.real());
      const double hi = std::max(seg->start.real(), seg->end.real());
      if (hi > 1e-9 && lo < 1.0 - 1e-9)
        throw SingularOnPath("monodromy_increment: loop runs along the singular interval");
      return;
    }
    if (y0 == 0.0 || y1 == 0.0) {
      const double xi = (y0 == 0.0 ? seg->start : seg->end).real();
      if (xi > 1e-9 && xi < 1.0 - 1e-9)
        throw SingularOnPath("monodromy_increment: loop touches the singular interval");
      return;
    }
    if ((y0 > 0.0) == (y1 > 0.0)) return;
    const double u = y0 / (y0 - y1);
    const double xi = seg->start.real() + u * (seg->end.real() - seg->start.real());
    classify(u, xi, y0 > 0.0 ? 1 : -1);
    return;
  }

  const auto& arc = std::get<Arc>(piece);
  const double v = -arc.center.imag() / arc.radius;
  if (std::abs(v) > 1.0) return;
  const double sweep = arc.angle_end - arc.angle_start;
  const double s1 = std::asin(std::clamp(v, -1.0, 1.0));
  const double s2 = kPi - s1;
  const double lo = std::min(arc.angle_start, arc.angle_end);
  const double hi = std::max(arc.angle_start, arc.angle_end);
  std::vector<double> hits;
  for (double base : {s1, s2}) {
    const double kmin = std::floor((lo - base) / kTwoPi) - 1.0;
    const double kmax = std::ceil((hi - base) / kTwoPi) + 1.0;
    for (double k = kmin; k <= kmax; k += 1.0) {
      const double theta = base + k * kTwoPi;
      if (theta > lo + 1e-12 && theta < hi - 1e-12) hits.push_back(theta);
    }
  }
  std::sort(hits.begin(), hits.end());
  for (double theta : hits) {
    const double xi = arc.center.real() + arc.radius * std::cos(theta);
    const double dimdt = arc.radius * std::cos(theta) * sweep;
    if (std::abs(std::cos(theta)) < 1e-9) {
      if (xi > 1e-9 && xi < 1.0 - 1e-9)
        throw SingularOnPath("monodromy_increment: loop is tangent to the singular interval");
      continue;
    }
    const double u = (theta - arc.angle_start) / sweep;
    classify(u, xi, dimdt < 0.0 ? 1 : -1);
  }
  std::sort(out.begin(), out.end(),
            [](const AxisCrossing& a, const AxisCrossing& b) { return a.u < b.u; });
}

}  // namespace detail_polylog

inline Complex monodromy_increment(MonodromyFunction fn, const Path& loop,
                                   const std::vector<Complex>& held_params = {},
                                   const QuadratureConfig& cfg = {}) {
  validate(cfg);
  validate_path(loop);
  if (std::abs(path_start(loop) - path_end(loop)) > kEndpointTol)
    throw EndpointMismatch("monodromy_increment: loop must be closed");

  switch (fn) {
    case MonodromyFunction::kLi1OverA: {
      if (!held_params.empty())
        throw DimensionMismatch("monodromy_increment: Li_1(1/a) holds no parameters");
      return integrate_path(
          [](Complex a) { return 1.0 / a - 1.0 / (a - Complex(1.0, 0.0)); }, loop, cfg);
    }
    case MonodromyFunction::kLi2: {
      if (!held_params.empty())
        throw DimensionMismatch("monodromy_increment: Li_2(c) holds no parameters");
      const Complex base = path_start(loop);
      if (std::abs(base) < 1e-6 || std::abs(base - Complex(1.0, 0.0)) < 1e-6)
        throw SingularOnPath("monodromy_increment: loop basepoint too close to 0 or 1");
      // Li_2(c) = -F_2 for the fixed word (1, 0); continue the germ along the
      // loop with the principal log(1 - base) seeded into F_1.
      std::vector<Complex> F{Complex(1.0, 0.0), std::log(Complex(1.0, 0.0) - base),
                             Complex(0.0, 0.0)};
      const std::vector<Complex> letters{Complex(1.0, 0.0), Complex(0.0, 0.0)};
      const auto pieces = traversal_pieces(loop);
      detail_polylog::run_word(letters, pieces, F);
      return -F[2];
    }
    case MonodromyFunction::kLi11: {
      if (held_params.size() != 1)
        throw DimensionMismatch("monodromy_increment: Li_{1,1} holds exactly one parameter");
      const Complex b = held_params[0];
      const double df = std::abs(Complex(std::clamp(b.real(), 0.0, 1.0), 0.0) - b);
      if (df < 1e-6)
        throw SingularOnPath("monodromy_increment: held parameter sits on the t path");
      const Complex base = path_start(loop);
      if (std::abs(base.imag()) <= 1e-12 && base.real() > 1e-9 && base.real() < 1.0 - 1e-9)
        throw SingularOnPath("monodromy_increment: loop basepoint on the singular interval");

      // Each transversal crossing of (0,1) at xi pinches the inner contour
      // and adds sigma * 2*pi*i times the remaining suffix integral
      // H(xi) = int_xi^1 dt/(t-b), continued along the rest of the loop.
      const auto pieces = traversal_pieces(loop);
      Complex total{0.0, 0.0};
      for (size_t i = 0; i < pieces.size(); ++i) {
        std::vector<detail_polylog::AxisCrossing> crossings;
        detail_polylog::crossings_of_unit_interval(pieces[i], crossings);
        for (const auto& cr : crossings) {
          const Complex h_at_xi = integrate_interval(
              [&](double t) { return 1.0 / (Complex(t, 0.0) - b); }, cr.xi, 1.0, cfg);
          Complex rem = integrate_interval(
              [&](double u) {
                return piece_velocity(pieces[i], u) / (piece_point(pieces[i], u) - b);
              },
              cr.u, 1.0, cfg);
          for (size_t k = i + 1; k < pieces.size(); ++k)
            rem += integrate_interval(
                [&](double u) {
                  return piece_velocity(pieces[k], u) / (piece_point(pieces[k], u) - b);
                },
                0.0, 1.0, cfg);
          total += static_cast<double>(cr.sigma) * kTwoPiI * (h_at_xi - rem);
        }
      }
      return total;
    }
  }
  throw PeriodlabError("monodromy_increment: unknown function kind");
}

}  // namespace periodlab
