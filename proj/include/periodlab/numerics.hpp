#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace periodlab {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline const Complex kTwoPiI{0.0, kTwoPi};

// Consecutive path pieces must meet within this distance. Construction is
// exact in intent; the slack only absorbs rounding.
inline constexpr double kEndpointTol = 1e-12;

struct QuadratureConfig {
  double abs_tol = 1e-11;
  double rel_tol = 1e-11;
  int max_subdivisions = 4000;
  int singular_shrink_levels = 0;
};

inline void validate(const QuadratureConfig& cfg) {
  if (!(cfg.abs_tol >= 1e-15))
    throw PeriodlabError("QuadratureConfig: abs_tol must be >= 1e-15");
  if (!(cfg.rel_tol >= 1e-15))
    throw PeriodlabError("QuadratureConfig: rel_tol must be >= 1e-15");
  if (cfg.max_subdivisions < 1)
    throw PeriodlabError("QuadratureConfig: max_subdivisions must be >= 1");
  if (cfg.singular_shrink_levels < 0)
    throw PeriodlabError("QuadratureConfig: singular_shrink_levels must be >= 0");
}

// ---------------------------------------------------------------------------
// Paths: piecewise contours made of line segments and circular arcs.
// Arcs are first-class so loop integrals around poles are exact in geometry.

struct LineSegment {
  Complex start;
  Complex end;
};

struct Arc {
  Complex center;
  double radius;
  double angle_start;
  double angle_end;
};

using PathPiece = std::variant<LineSegment, Arc>;

inline Complex piece_start(const PathPiece& p) {
  if (const auto* seg = std::get_if<LineSegment>(&p)) return seg->start;
  const auto& arc = std::get<Arc>(p);
  return arc.center + arc.radius * std::exp(Complex(0.0, arc.angle_start));
}

inline Complex piece_end(const PathPiece& p) {
  if (const auto* seg = std::get_if<LineSegment>(&p)) return seg->end;
  const auto& arc = std::get<Arc>(p);
  return arc.center + arc.radius * std::exp(Complex(0.0, arc.angle_end));
}

// Point on the piece at parameter s in [0,1].
inline Complex piece_point(const PathPiece& p, double s) {
  if (const auto* seg = std::get_if<LineSegment>(&p))
    return seg->start + s * (seg->end - seg->start);
  const auto& arc = std::get<Arc>(p);
  const double theta = arc.angle_start + s * (arc.angle_end - arc.angle_start);
  return arc.center + arc.radius * std::exp(Complex(0.0, theta));
}

// d(point)/ds at parameter s.
inline Complex piece_velocity(const PathPiece& p, double s) {
  if (const auto* seg = std::get_if<LineSegment>(&p)) return seg->end - seg->start;
  const auto& arc = std::get<Arc>(p);
  const double sweep = arc.angle_end - arc.angle_start;
  const double theta = arc.angle_start + s * sweep;
  return Complex(0.0, sweep) * arc.radius * std::exp(Complex(0.0, theta));
}

inline PathPiece piece_flipped(const PathPiece& p) {
  if (const auto* seg = std::get_if<LineSegment>(&p))
    return LineSegment{seg->end, seg->start};
  const auto& arc = std::get<Arc>(p);
  return Arc{arc.center, arc.radius, arc.angle_end, arc.angle_start};
}

// A path stores its geometry in forward order plus an orientation sign.
// sign = -1 means the stored geometry is traversed backwards; integration
// applies the sign analytically, so reversal negates integrals exactly.
struct Path {
  std::vector<PathPiece> pieces;
  int sign = 1;
};

inline void validate_path(const Path& path) {
  if (path.pieces.empty()) throw PeriodlabError("Path: must have at least one piece");
  if (path.sign != 1 && path.sign != -1) throw PeriodlabError("Path: sign must be +1 or -1");
  for (const auto& p : path.pieces) {
    if (const auto* arc = std::get_if<Arc>(&p)) {
      if (!(arc->radius > 0.0)) throw PeriodlabError("Arc: radius must be positive");
    }
  }
  for (size_t i = 0; i + 1 < path.pieces.size(); ++i) {
    const Complex gap = piece_start(path.pieces[i + 1]) - piece_end(path.pieces[i]);
    if (std::abs(gap) > kEndpointTol)
      throw EndpointMismatch("Path: pieces " + std::to_string(i) + " and " +
                             std::to_string(i + 1) + " do not meet");
  }
}

inline Path make_path(std::vector<PathPiece> pieces) {
  Path path{std::move(pieces), 1};
  validate_path(path);
  return path;
}

inline Path segment_path(Complex from, Complex to) {
  return make_path({LineSegment{from, to}});
}

inline Path make_loop(Complex center, double radius, bool counterclockwise) {
  if (!(radius > 0.0)) throw PeriodlabError("make_loop: radius must be positive");
  const double sweep = counterclockwise ? kTwoPi : -kTwoPi;
  return make_path({Arc{center, radius, 0.0, sweep}});
}

// Pieces in actual traversal order, with the orientation sign materialized.
inline std::vector<PathPiece> traversal_pieces(const Path& path) {
  if (path.sign == 1) return path.pieces;
  std::vector<PathPiece> out;
  out.reserve(path.pieces.size());
  for (auto it = path.pieces.rbegin(); it != path.pieces.rend(); ++it)
    out.push_back(piece_flipped(*it));
  return out;
}

inline Complex path_start(const Path& path) {
  if (path.pieces.empty()) throw PeriodlabError("path_start: empty path");
  return path.sign == 1 ? piece_start(path.pieces.front())
                        : piece_end(path.pieces.back());
}

inline Complex path_end(const Path& path) {
  if (path.pieces.empty()) throw PeriodlabError("path_end: empty path");
  return path.sign == 1 ? piece_end(path.pieces.back())
                        : piece_start(path.pieces.front());
}

inline Path reverse(const Path& path) {
  return Path{path.pieces, -path.sign};
}

inline Path concat(const Path& p, const Path& q) {
  std::vector<PathPiece> pieces = traversal_pieces(p);
  std::vector<PathPiece> tail = traversal_pieces(q);
  if (pieces.empty() || tail.empty()) throw PeriodlabError("concat: empty path");
  if (std::abs(path_end(p) - path_start(q)) > kEndpointTol)
    throw EndpointMismatch("concat: end of first path does not meet start of second");
  pieces.insert(pieces.end(), tail.begin(), tail.end());
  return Path{std::move(pieces), 1};
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature (7-15 pair) with bisection.

namespace detail {

// Kronrod abscissae on [0,1]; the even-indexed entries extend the embedded
// 7-point Gauss rule (odd indices plus the midpoint).
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};

inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};

inline constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Cell {
  double a;
  double b;
  Complex value;
  double error;
};

template <class F>
Cell gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  Complex fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[2 * i] = f(c - h * kXgk[i]);
    fv[2 * i + 1] = f(c + h * kXgk[i]);
  }
  fv[14] = f(c);

  Complex resk{0.0, 0.0};
  double resabs = 0.0;
  for (int i = 0; i < 7; ++i) {
    resk += kWgk[i] * (fv[2 * i] + fv[2 * i + 1]);
    resabs += kWgk[i] * (std::abs(fv[2 * i]) + std::abs(fv[2 * i + 1]));
  }
  resk += kWgk[7] * fv[14];
  resabs += kWgk[7] * std::abs(fv[14]);

  Complex resg{0.0, 0.0};
  for (int i = 0; i < 3; ++i)
    resg += kWg[i] * (fv[2 * (2 * i + 1)] + fv[2 * (2 * i + 1) + 1]);
  resg += kWg[3] * fv[14];

  const Complex mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fv[14] - mean);
  for (int i = 0; i < 7; ++i)
    resasc += kWgk[i] * (std::abs(fv[2 * i] - mean) + std::abs(fv[2 * i + 1] - mean));

  const double ah = std::abs(h);
  resabs *= ah;
  resasc *= ah;
  double err = std::abs(resk - resg) * ah;
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / eps50)
    err = std::max(err, eps50 * resabs);

  return Cell{a, b, resk * h, err};
}

inline bool worse(const Cell& x, const Cell& y) {
  if (x.error != y.error) return x.error > y.error;
  return x.a < y.a;
}

}  // namespace detail

// Integrates a complex-valued function of one real variable over [a,b].
// Deterministic for a fixed config; the claimed error of the result is at
// most max(abs_tol, rel_tol * |value|).
template <class F>
Complex integrate_interval(F&& f, double a, double b, const QuadratureConfig& cfg) {
  validate(cfg);
  if (a == b) return Complex{0.0, 0.0};
  if (b < a) return -integrate_interval(f, b, a, cfg);

  const double span = b - a;
  const auto heap_cmp = [](const detail::Cell& x, const detail::Cell& y) {
    return detail::worse(y, x);
  };
  const auto check_finite = [](const detail::Cell& c) {
    if (!std::isfinite(c.value.real()) || !std::isfinite(c.value.imag()) ||
        !std::isfinite(c.error))
      throw SingularOnPath("integrate_interval: integrand evaluated non-finite");
  };

  std::vector<detail::Cell> cells;
  cells.push_back(detail::gk15(f, a, b));
  check_finite(cells[0]);

  Complex total = cells[0].value;
  double total_err = cells[0].error;
  int splits = 0;

  const auto resum = [&]() {
    total = Complex{0.0, 0.0};
    total_err = 0.0;
    for (const auto& c : cells) {
      total += c.value;
      total_err += c.error;
    }
  };
  const auto tolerance = [&]() { return std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)); };

  while (true) {
    while (total_err > tolerance()) {
      if (splits >= cfg.max_subdivisions)
        throw NonConvergent("integrate_interval: subdivision budget exhausted, error " +
                            std::to_string(total_err));
      std::pop_heap(cells.begin(), cells.end(), heap_cmp);
      const detail::Cell cell = cells.back();
      cells.pop_back();
      if (cell.b - cell.a < 1e-15 * span)
        throw NonConvergent("integrate_interval: interval shrank below rounding width");
      const double mid = 0.5 * (cell.a + cell.b);
      for (const auto& half : {detail::gk15(f, cell.a, mid), detail::gk15(f, mid, cell.b)}) {
        check_finite(half);
        total += half.value;
        total_err += half.error;
        cells.push_back(half);
        std::push_heap(cells.begin(), cells.end(), heap_cmp);
      }
      total -= cell.value;
      total_err -= cell.error;
      ++splits;
    }

    // The estimates alone can converge while a feature narrower than the gap
    // between quadrature nodes hides from every sampled point (the gap is
    // widest next to a cell endpoint). Halve each cell once and accept only
    // if the refined total stays put; a revealed feature inflates the error
    // and sends the loop back to adaptive refinement.
    resum();
    const Complex before = total;
    std::vector<detail::Cell> coarse;
    coarse.swap(cells);
    for (const auto& cell : coarse) {
      if (cell.b - cell.a < 64.0 * 1e-15 * span) {
        cells.push_back(cell);
        continue;
      }
      if (splits >= cfg.max_subdivisions)
        throw NonConvergent("integrate_interval: subdivision budget exhausted, error " +
                            std::to_string(total_err));
      const double mid = 0.5 * (cell.a + cell.b);
      for (const auto& half : {detail::gk15(f, cell.a, mid), detail::gk15(f, mid, cell.b)}) {
        check_finite(half);
        cells.push_back(half);
      }
      ++splits;
    }
    std::make_heap(cells.begin(), cells.end(), heap_cmp);
    resum();
    if (total_err <= tolerance() && std::abs(total - before) <= tolerance()) break;
  }

  // Re-sum in position order; the incremental total carries the cancellation
  // noise of every split performed.
  std::sort(cells.begin(), cells.end(),
            [](const detail::Cell& x, const detail::Cell& y) { return x.a < y.a; });
  Complex result{0.0, 0.0};
  for (const auto& cell : cells) result += cell.value;
  return result;
}

// Integrates g(z) dz along a path. The orientation sign is applied to the
// final value, so reverse(p) yields exactly the negated result.
template <class G>
Complex integrate_path(G&& g, const Path& path, const QuadratureConfig& cfg) {
  validate(cfg);
  validate_path(path);
  QuadratureConfig piece_cfg = cfg;
  piece_cfg.abs_tol = std::max(1e-15, cfg.abs_tol / static_cast<double>(path.pieces.size()));

  Complex forward{0.0, 0.0};
  for (const auto& piece : path.pieces) {
    forward += integrate_interval(
        [&](double s) { return g(piece_point(piece, s)) * piece_velocity(piece, s); }, 0.0,
        1.0, piece_cfg);
  }
  return static_cast<double>(path.sign) * forward;
}

}  // namespace periodlab
