#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace periodlab {

// Laurent polynomial over Q(i): exponent -> coefficient, zeros pruned.
struct LaurentPoly {
  std::map<long, GaussRat> coeff;
};

inline void laurent_add(LaurentPoly& f, long e, const GaussRat& c) {
  if (c.is_zero()) return;
  auto it = f.coeff.find(e);
  if (it == f.coeff.end()) {
    f.coeff.emplace(e, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) f.coeff.erase(it);
}

inline LaurentPoly laurent_derivative(const LaurentPoly& f) {
  LaurentPoly out;
  for (const auto& [e, c] : f.coeff)
    if (e != 0) laurent_add(out, e - 1, GaussRat(Rat(e)) * c);
  return out;
}

inline GaussRat laurent_eval(const LaurentPoly& f, const Rat& p) {
  GaussRat out;
  for (const auto& [e, c] : f.coeff) out += c * GaussRat(rat_pow(p, static_cast<int>(e)));
  return out;
}

// Multiply by the linear factor (t - p).
inline LaurentPoly laurent_mul_linear(const LaurentPoly& f, const Rat& p) {
  LaurentPoly out;
  const GaussRat gp{p};
  for (const auto& [e, c] : f.coeff) {
    laurent_add(out, e + 1, c);
    laurent_add(out, e, -(gp * c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// The pair family: the punctured affine line Spec Q[t, 1/t] relative to a
// divisor of two or three rational points, with the double point {c, c}
// allowed as the degenerate configuration.

struct PuncturedLinePair {
  std::vector<Rat> punctures{Rat(0)};
  std::vector<Rat> divisor_points;
};

enum class PairKind { kTwoPoints, kDoublePoint, kThreePoints };

inline PairKind classify_pair(const PuncturedLinePair& pair) {
  if (pair.punctures.size() != 1 || pair.punctures[0] != 0)
    throw InvalidPair("punctured-line pair: the supported puncture set is {0}");
  const auto& d = pair.divisor_points;
  for (const Rat& p : d)
    if (p == 0) throw InvalidPair("punctured-line pair: divisor points must avoid the puncture");
  if (d.size() == 2) return d[0] == d[1] ? PairKind::kDoublePoint : PairKind::kTwoPoints;
  if (d.size() == 3) {
    if (d[0] == d[1] || d[0] == d[2] || d[1] == d[2])
      throw InvalidPair("punctured-line pair: three divisor points must be distinct");
    return PairKind::kThreePoints;
  }
  throw InvalidPair("punctured-line pair: divisor must consist of two or three points");
}

struct CohomologyBasis {
  std::vector<std::string> labels;
};

struct ReducedClass {
  CohomologyBasis basis;
  std::vector<GaussRat> coordinates;
};

inline CohomologyBasis basis_punctured_line(const PuncturedLinePair& pair) {
  switch (classify_pair(pair)) {
    case PairKind::kTwoPoints: {
      const Rat s = pair.divisor_points[1] - pair.divisor_points[0];
      return {{"dt/t", s == 1 ? std::string("dt")
                              : "(" + rat_to_string(Rat(1) / s) + ") dt"}};
    }
    case PairKind::kDoublePoint:
      return {{"dt/t", "1_{D1} + 0_{D2}"}};
    case PairKind::kThreePoints:
      return {{"dt/t", "dt", "2t dt"}};
  }
  throw InvalidPair("punctured-line pair: unrecognized configuration");
}

// Degree-1 element of the relative complex: a Laurent 1-form plus one
// constant per divisor component.
struct RelativeOneForm {
  LaurentPoly form;
  std::vector<GaussRat> divisor_constants;
};

// d f = (f' dt, f restricted to the divisor components).
inline RelativeOneForm pair_differential(const PuncturedLinePair& pair, const LaurentPoly& f) {
  classify_pair(pair);
  RelativeOneForm out;
  out.form = laurent_derivative(f);
  for (const Rat& p : pair.divisor_points) out.divisor_constants.push_back(laurent_eval(f, p));
  return out;
}

inline ReducedClass reduce_punctured_line(const PuncturedLinePair& pair,
                                          const RelativeOneForm& element) {
  const PairKind kind = classify_pair(pair);
  const auto& d = pair.divisor_points;
  if (element.divisor_constants.size() != d.size())
    throw InvalidElement("reduce_punctured_line: one constant per divisor component required");

  LaurentPoly w = element.form;
  for (auto it = w.coeff.begin(); it != w.coeff.end();)
    it = it->second.is_zero() ? w.coeff.erase(it) : std::next(it);
  GaussRat pair_coordinate;

  if (kind == PairKind::kDoublePoint) {
    // The image of evaluation is the diagonal; the complement coordinate on
    // the function pair 1_{D1} + 0_{D2} survives, the diagonal part is d of
    // a constant and contributes nothing to the form.
    pair_coordinate = element.divisor_constants[0] - element.divisor_constants[1];
  } else {
    // Subtract d of the Lagrange polynomial matching the divisor constants.
    LaurentPoly interp;
    for (size_t j = 0; j < d.size(); ++j) {
      LaurentPoly node;
      node.coeff[0] = GaussRat(1);
      Rat denom = 1;
      for (size_t l = 0; l < d.size(); ++l) {
        if (l == j) continue;
        node = laurent_mul_linear(node, d[l]);
        denom *= d[j] - d[l];
      }
      const GaussRat scale = element.divisor_constants[j] / GaussRat(denom);
      for (const auto& [e, c] : node.coeff) laurent_add(interp, e, scale * c);
    }
    const LaurentPoly dinterp = laurent_derivative(interp);
    for (const auto& [e, c] : dinterp.coeff) laurent_add(w, e, -c);
  }

  // Exact forms are spanned by d(t^n K) with K the product of (t - p) over
  // the reduced divisor points. Sweep the top exponents down to deg K - 2
  // and the bottom exponents up to -1; no nonzero combination of relations
  // is supported inside that window, so the residual is the class.
  LaurentPoly kernel_gen;
  kernel_gen.coeff[0] = GaussRat(1);
  const size_t reduced_count = kind == PairKind::kDoublePoint ? 1 : d.size();
  for (size_t j = 0; j < reduced_count; ++j) kernel_gen = laurent_mul_linear(kernel_gen, d[j]);
  const long deg_k = static_cast<long>(reduced_count);
  const long top_keep = deg_k - 2;

  const auto subtract_relation = [&](long n, const GaussRat& scale) {
    for (const auto& [e, ke] : kernel_gen.coeff)
      laurent_add(w, n + e - 1, -(scale * GaussRat(Rat(n + e)) * ke));
  };
  while (!w.coeff.empty()) {
    const long top = w.coeff.rbegin()->first;
    if (top <= top_keep) break;
    const long n = top + 1 - deg_k;
    subtract_relation(n, w.coeff.rbegin()->second / GaussRat(Rat(top + 1)));
  }
  while (!w.coeff.empty()) {
    const long bottom = w.coeff.begin()->first;
    if (bottom >= -1) break;
    const long n = bottom + 1;
    const GaussRat trailing = GaussRat(Rat(n)) * kernel_gen.coeff.at(0);
    subtract_relation(n, w.coeff.begin()->second / trailing);
  }

  const auto coeff_at = [&](long e) {
    const auto it = w.coeff.find(e);
    return it == w.coeff.end() ? GaussRat() : it->second;
  };
  switch (kind) {
    case PairKind::kTwoPoints:
      return {basis_punctured_line(pair),
              {coeff_at(-1), coeff_at(0) * GaussRat(d[1] - d[0])}};
    case PairKind::kDoublePoint:
      return {basis_punctured_line(pair), {coeff_at(-1), pair_coordinate}};
    case PairKind::kThreePoints:
      return {basis_punctured_line(pair), {coeff_at(-1), coeff_at(0), coeff_at(1) / GaussRat(2)}};
  }
  throw InvalidPair("punctured-line pair: unrecognized configuration");
}

// ---------------------------------------------------------------------------
// The affine conic a x^2 + b y^2 = 1.

struct QuadricRing {
  Rat a{1};
  Rat b{1};
};

inline void validate_ring(const QuadricRing& ring) {
  if (ring.a == 0 || ring.b == 0) throw InvalidPair("quadric ring: a and b must be nonzero");
}

// Polynomial in x, y: (x-exponent, y-exponent) -> coefficient.
using QuadricPoly = std::map<std::pair<long, long>, GaussRat>;

inline void quadric_add(QuadricPoly& p, long n, long m, const GaussRat& c) {
  if (c.is_zero()) return;
  auto it = p.find({n, m});
  if (it == p.end()) {
    p.emplace(std::make_pair(n, m), c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) p.erase(it);
}

struct QuadricForm {
  QuadricPoly dx;
  QuadricPoly dy;
};

inline QuadricForm quadric_differential(const QuadricPoly& f) {
  QuadricForm out;
  for (const auto& [nm, c] : f) {
    const auto [n, m] = nm;
    if (n < 0 || m < 0)
      throw InvalidElement("quadric_differential: exponents must be non-negative");
    if (n != 0) quadric_add(out.dx, n - 1, m, GaussRat(Rat(n)) * c);
    if (m != 0) quadric_add(out.dy, n, m - 1, GaussRat(Rat(m)) * c);
  }
  return out;
}

inline CohomologyBasis basis_quadric(const QuadricRing& ring) {
  validate_ring(ring);
  return {{"y dx"}};
}

inline ReducedClass reduce_quadric(const QuadricRing& ring, const QuadricForm& form) {
  validate_ring(ring);
  for (const auto& part : {form.dx, form.dy})
    for (const auto& [nm, c] : part)
      if (nm.first < 0 || nm.second < 0)
        throw InvalidElement("reduce_quadric: exponents must be non-negative");

  // x^n y^m dy: exact for n = 0, otherwise -n/(m+1) x^{n-1} y^{m+1} dx.
  QuadricPoly dx = form.dx;
  for (const auto& [nm, c] : form.dy) {
    const auto [n, m] = nm;
    if (n == 0) continue;
    quadric_add(dx, n - 1, m + 1, c * GaussRat(Rat(-n)) / GaussRat(Rat(m + 1)));
  }

  // Even y-powers become pure x-forms via y^2 = (1 - a x^2)/b, hence exact;
  // odd powers expand to combinations of x^k y dx.
  std::map<long, GaussRat> xy;
  for (const auto& [nm, c] : dx) {
    const auto [n, m] = nm;
    if (m % 2 == 0) continue;
    const long r = (m - 1) / 2;
    Rat binom = 1;
    for (long i = 0; i <= r; ++i) {
      const GaussRat term =
          GaussRat(binom * rat_pow(-ring.a, static_cast<int>(i)) / rat_pow(ring.b, static_cast<int>(r)));
      if (auto it = xy.find(n + 2 * i); it != xy.end()) {
        it->second += c * term;
        if (it->second.is_zero()) xy.erase(it);
      } else if (!(c * term).is_zero()) {
        xy.emplace(n + 2 * i, c * term);
      }
      binom = binom * Rat(r - i) / Rat(i + 1);
    }
  }

  // x^k y dx ~ (k-1)/((k+2)a) x^{k-2} y dx; odd k drain to xy dx ~ 0.
  GaussRat coordinate;
  while (!xy.empty()) {
    const long k = xy.rbegin()->first;
    const GaussRat c = xy.rbegin()->second;
    xy.erase(std::prev(xy.end()));
    if (k >= 2) {
      const GaussRat factor = GaussRat(Rat(k - 1) / (Rat(k + 2) * ring.a));
      if (auto it = xy.find(k - 2); it != xy.end()) {
        it->second += c * factor;
        if (it->second.is_zero()) xy.erase(it);
      } else if (!(c * factor).is_zero()) {
        xy.emplace(k - 2, c * factor);
      }
    } else if (k == 0) {
      coordinate = c;
    }
  }
  return {basis_quadric(ring), {coordinate}};
}

}  // namespace periodlab
