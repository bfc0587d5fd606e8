#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "extrapolate.hpp"
#include "semialg.hpp"

namespace periodlab {

namespace detail_naive {

// Double-coefficient mirror of PolynomialQ used inside the quadrature loops,
// where exact arithmetic would dominate the runtime.
struct DPoly {
  int nv = 0;
  std::vector<std::pair<std::vector<int>, Complex>> terms;
};

inline DPoly compile_dpoly(const PolynomialQ& p) {
  DPoly out;
  out.nv = p.n_vars;
  out.terms.reserve(p.terms.size());
  for (const auto& [e, c] : p.terms) out.terms.emplace_back(e, c.to_complex());
  return out;
}

// Substitute the first variable; the result lives in the remaining ones.
inline DPoly restrict_first(const DPoly& p, double x) {
  DPoly out;
  out.nv = p.nv - 1;
  std::map<std::vector<int>, Complex> acc;
  for (const auto& [e, c] : p.terms) {
    double mono = 1.0;
    for (int k = 0; k < e[0]; ++k) mono *= x;
    std::vector<int> rest(e.begin() + 1, e.end());
    acc[std::move(rest)] += c * mono;
  }
  out.terms.assign(acc.begin(), acc.end());
  return out;
}

// Dense coefficient vector of a univariate DPoly, constant term first.
inline std::vector<Complex> univariate_coeffs(const DPoly& p) {
  if (p.nv == 0) {
    Complex c{0.0, 0.0};
    for (const auto& [e, v] : p.terms) c += v;
    return {c};
  }
  int deg = 0;
  for (const auto& [e, c] : p.terms) deg = std::max(deg, e[0]);
  std::vector<Complex> coeffs(static_cast<size_t>(deg) + 1, Complex(0.0, 0.0));
  for (const auto& [e, c] : p.terms) coeffs[static_cast<size_t>(e[0])] += c;
  return coeffs;
}

inline Complex horner(const std::vector<Complex>& c, double x) {
  Complex acc{0.0, 0.0};
  for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
  return acc;
}

inline double horner_scale(const std::vector<Complex>& c, double x) {
  const double ax = std::abs(x);
  double acc = 0.0;
  for (size_t i = c.size(); i-- > 0;) acc = acc * ax + std::abs(c[i]);
  return acc;
}

// Real roots of sum(c_k x^k) inside [lo, hi] by dense sampling plus
// bisection. Tangential (even-multiplicity) contacts can be missed; kept
// slices are decided by membership midpoints, which tolerates that.
inline void real_roots(const std::vector<double>& c, double lo, double hi,
                       std::vector<double>& out) {
  int deg = static_cast<int>(c.size()) - 1;
  double cmax = 0.0;
  for (double x : c) cmax = std::max(cmax, std::abs(x));
  if (cmax == 0.0) return;
  while (deg > 0 && std::abs(c[static_cast<size_t>(deg)]) <= 1e-14 * cmax) --deg;
  if (deg <= 0) return;

  auto f = [&](double x) {
    double acc = 0.0;
    for (int i = deg; i >= 0; --i) acc = acc * x + c[static_cast<size_t>(i)];
    return acc;
  };

  const int samples = std::max(48, 24 * deg);
  double prev_x = lo;
  double prev_v = f(lo);
  for (int i = 1; i <= samples; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / samples;
    const double v = f(x);
    if (prev_v == 0.0) {
      out.push_back(prev_x);
    } else if (v != 0.0 && ((prev_v < 0.0) != (v < 0.0))) {
      double a = prev_x, b = x, fa = prev_v;
      for (int it = 0; it < 100 && b - a > 1e-16 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if ((fa < 0.0) != (fm < 0.0)) {
          b = m;
        } else {
          a = m;
          fa = fm;
        }
      }
      out.push_back(0.5 * (a + b));
    }
    prev_x = x;
    prev_v = v;
  }
  if (prev_v == 0.0) out.push_back(hi);
}

// Boolean skeleton referencing leaves by index so the polynomial payload can
// be restacked per quadrature node.
struct Skel {
  SetExpr::Kind kind = SetExpr::Kind::Leaf;
  Rel rel = Rel::Ge;
  int leaf = -1;
  std::vector<Skel> kids;
};

inline Skel build_skel(const SetExpr& e, std::vector<PolynomialQ>& leaves) {
  Skel s;
  s.kind = e.kind;
  if (e.kind == SetExpr::Kind::Leaf) {
    s.rel = e.rel;
    s.leaf = static_cast<int>(leaves.size());
    leaves.push_back(e.poly);
    return s;
  }
  for (const auto& k : e.kids) s.kids.push_back(build_skel(k, leaves));
  return s;
}

inline bool member_univariate(const Skel& s, const std::vector<std::vector<Complex>>& leafc,
                              double y) {
  switch (s.kind) {
    case SetExpr::Kind::Leaf: {
      const double v = horner(leafc[static_cast<size_t>(s.leaf)], y).real();
      const double scale = horner_scale(leafc[static_cast<size_t>(s.leaf)], y);
      switch (s.rel) {
        case Rel::Ge: return v >= -1e-12 * (1.0 + scale);
        case Rel::Gt: return v > 0.0;
        case Rel::Eq: return std::abs(v) <= 1e-12 * (1.0 + scale);
      }
      return false;
    }
    case SetExpr::Kind::Not:
      return !member_univariate(s.kids[0], leafc, y);
    case SetExpr::Kind::And:
      for (const auto& k : s.kids)
        if (!member_univariate(k, leafc, y)) return false;
      return true;
    case SetExpr::Kind::Or:
      for (const auto& k : s.kids)
        if (member_univariate(k, leafc, y)) return true;
      return false;
  }
  return false;
}

struct ScanSetup {
  Skel skel;
  std::vector<DPoly> leaves;
  DPoly num;
  DPoly den;
  std::vector<double> lo;
  std::vector<double> hi;
  bool pole_checks = true;
};

// One level of the scanline: outer variables integrate adaptively, the
// innermost variable is decomposed into exact slices between polynomial
// roots, with membership decided at slice midpoints.
inline Complex scan(const ScanSetup& setup, const std::vector<DPoly>& leaves, const DPoly& num,
                    const DPoly& den, int level, double abs_tol, double rel_tol,
                    const QuadratureConfig& cfg, bool probe) {
  const int remaining = static_cast<int>(setup.lo.size()) - level;
  const double lo = remaining > 0 ? setup.lo[static_cast<size_t>(level)] : 0.0;
  const double hi = remaining > 0 ? setup.hi[static_cast<size_t>(level)] : 0.0;

  if (remaining == 0) {
    std::vector<std::vector<Complex>> leafc;
    leafc.reserve(leaves.size());
    for (const auto& l : leaves) leafc.push_back(univariate_coeffs(l));
    if (!member_univariate(setup.skel, leafc, 0.0)) return Complex(0.0, 0.0);
    const Complex d = horner(univariate_coeffs(den), 0.0);
    if (std::abs(d) <= 1e-300) throw PoleOnRegion("naive_period: denominator vanishes at the point");
    return probe ? Complex(0.0, 0.0) : horner(univariate_coeffs(num), 0.0) / d;
  }

  if (remaining == 1) {
    std::vector<std::vector<Complex>> leafc;
    leafc.reserve(leaves.size());
    for (const auto& l : leaves) leafc.push_back(univariate_coeffs(l));
    const std::vector<Complex> numc = univariate_coeffs(num);
    const std::vector<Complex> denc = univariate_coeffs(den);

    std::vector<double> breaks{lo, hi};
    auto add_roots = [&](const std::vector<Complex>& coeffs) {
      std::vector<double> part(coeffs.size());
      bool any = false;
      for (size_t i = 0; i < coeffs.size(); ++i) {
        part[i] = coeffs[i].real();
        if (part[i] != 0.0) any = true;
      }
      if (any) real_roots(part, lo, hi, breaks);
      any = false;
      for (size_t i = 0; i < coeffs.size(); ++i) {
        part[i] = coeffs[i].imag();
        if (part[i] != 0.0) any = true;
      }
      if (any) real_roots(part, lo, hi, breaks);
    };
    for (const auto& c : leafc) add_roots(c);
    add_roots(denc);

    std::sort(breaks.begin(), breaks.end());
    const double merge_tol = 1e-12 * (1.0 + hi - lo);
    std::vector<double> pts;
    for (double b : breaks) {
      if (b < lo - merge_tol || b > hi + merge_tol) continue;
      if (pts.empty() || b - pts.back() > merge_tol) pts.push_back(b);
    }

    std::vector<std::pair<double, double>> slices;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
      const double a = pts[i], b = pts[i + 1];
      if (b - a <= merge_tol) continue;
      if (member_univariate(setup.skel, leafc, 0.5 * (a + b))) slices.emplace_back(a, b);
    }
    if (slices.empty()) return Complex(0.0, 0.0);

    if (setup.pole_checks) {
      // A denominator zero on (or at the edge of) a kept closed slice means
      // the form has a pole on the region.
      std::vector<double> den_roots;
      {
        std::vector<double> part(denc.size());
        bool any = false;
        for (size_t i = 0; i < denc.size(); ++i) {
          part[i] = denc[i].real();
          if (part[i] != 0.0) any = true;
        }
        std::vector<double> cand;
        if (any) real_roots(part, lo, hi, cand);
        any = false;
        for (size_t i = 0; i < denc.size(); ++i) {
          part[i] = denc[i].imag();
          if (part[i] != 0.0) any = true;
        }
        if (any) real_roots(part, lo, hi, cand);
        for (double r : cand) {
          const double m = std::abs(horner(denc, r));
          if (m <= 1e-9 * (1.0 + horner_scale(denc, r))) den_roots.push_back(r);
        }
      }
      for (const auto& [a, b] : slices) {
        const double edge = 1e-10 * (1.0 + std::abs(a) + std::abs(b));
        for (double r : den_roots)
          if (r >= a - edge && r <= b + edge)
            throw PoleOnRegion("naive_period: form pole meets the closed region");
        const double dm = std::abs(horner(denc, 0.5 * (a + b)));
        if (dm <= 1e-300)
          throw PoleOnRegion("naive_period: denominator vanishes inside the region");
      }
    }

    if (probe) return Complex(0.0, 0.0);

    QuadratureConfig slice_cfg = cfg;
    slice_cfg.abs_tol = std::max(1e-15, abs_tol / static_cast<double>(slices.size()));
    slice_cfg.rel_tol = std::max(1e-15, rel_tol);
    Complex total{0.0, 0.0};
    for (const auto& [a, b] : slices)
      total += integrate_interval([&](double y) { return horner(numc, y) / horner(denc, y); }, a,
                                  b, slice_cfg);
    return total;
  }

  auto descend = [&](double x, bool sub_probe) {
    std::vector<DPoly> rl;
    rl.reserve(leaves.size());
    for (const auto& l : leaves) rl.push_back(restrict_first(l, x));
    return scan(setup, rl, restrict_first(num, x), restrict_first(den, x), level + 1,
                abs_tol * 0.1, rel_tol, cfg, sub_probe);
  };

  if (setup.pole_checks && !probe) {
    descend(lo, true);
    descend(hi, true);
  }
  if (probe) {
    descend(lo, true);
    descend(hi, true);
    return Complex(0.0, 0.0);
  }

  QuadratureConfig level_cfg = cfg;
  level_cfg.abs_tol = std::max(1e-15, abs_tol);
  level_cfg.rel_tol = std::max(1e-15, rel_tol);
  return integrate_interval([&](double x) { return descend(x, false); }, lo, hi, level_cfg);
}

struct Component {
  SetExpr tree;
  std::map<int, Rat> pins;
};

inline void flatten_unions(const SetExpr& e, std::vector<SetExpr>& out) {
  if (e.kind == SetExpr::Kind::Or) {
    for (const auto& k : e.kids) flatten_unions(k, out);
    return;
  }
  out.push_back(e);
}

// Equality leaves of the shape a*x_j + b = 0 pin coordinates; any other
// equality constraint cannot be integrated over and is membership-only.
// Pins inside a nested union would make the pin value ambiguous per branch,
// so unions over pinned slices must sit at the top level of the tree.
inline void collect_pins(const SetExpr& e, bool positive, bool inside_or,
                         std::map<int, Rat>& pins) {
  switch (e.kind) {
    case SetExpr::Kind::Leaf: {
      if (e.rel != Rel::Eq) return;
      if (!positive)
        throw UnsupportedRegion("naive_period: negated equality constraints are not integrable");
      if (inside_or)
        throw UnsupportedRegion(
            "naive_period: equality pins inside nested unions are not supported");
      int var = -1;
      GaussRat coeff, constant;
      for (const auto& [exps, c] : e.poly.terms) {
        int nz = 0, where = -1, deg = 0;
        for (size_t i = 0; i < exps.size(); ++i)
          if (exps[i] != 0) {
            ++nz;
            where = static_cast<int>(i);
            deg = exps[i];
          }
        if (nz == 0) {
          constant = c;
        } else if (nz == 1 && deg == 1) {
          if (var != -1 && var != where)
            throw UnsupportedRegion("naive_period: equality constraint is not a coordinate pin");
          var = where;
          coeff = c;
        } else {
          throw UnsupportedRegion("naive_period: equality constraint is not a coordinate pin");
        }
      }
      if (var == -1)
        throw UnsupportedRegion("naive_period: constant equality constraint");
      const GaussRat value = -constant / coeff;
      if (!value.is_real())
        throw UnsupportedRegion("naive_period: coordinate pin value must be real");
      auto it = pins.find(var);
      if (it == pins.end()) pins.emplace(var, value.re);
      // A conflicting second pin leaves the substituted leaf false, so the
      // component contributes zero without special handling.
      return;
    }
    case SetExpr::Kind::Not:
      collect_pins(e.kids[0], !positive, inside_or, pins);
      return;
    case SetExpr::Kind::And:
      for (const auto& k : e.kids) collect_pins(k, positive, inside_or, pins);
      return;
    case SetExpr::Kind::Or:
      for (const auto& k : e.kids) collect_pins(k, positive, true, pins);
      return;
  }
}

inline SetExpr substitute_tree(const SetExpr& e, int var, const Rat& value) {
  if (e.kind == SetExpr::Kind::Leaf) {
    SetExpr out;
    out.kind = SetExpr::Kind::Leaf;
    out.rel = e.rel;
    out.poly = e.poly.substitute(var, value);
    return out;
  }
  SetExpr out;
  out.kind = e.kind;
  for (const auto& k : e.kids) out.kids.push_back(substitute_tree(k, var, value));
  return out;
}

inline int permutation_sign(std::vector<int> order) {
  int sign = 1;
  for (size_t i = 0; i < order.size(); ++i)
    for (size_t j = i + 1; j < order.size(); ++j)
      if (order[i] > order[j]) sign = -sign;
  return sign;
}

inline Complex integrate_region(const IntegrationRegion& region, const RationalForm& form,
                                const QuadratureConfig& cfg, bool pole_checks) {
  const int n = region.set.n_vars;
  const int d = region.dimension;

  std::vector<SetExpr> components;
  flatten_unions(region.set.tree, components);

  Complex total{0.0, 0.0};
  for (const auto& comp : components) {
    std::map<int, Rat> pins;
    collect_pins(comp, true, false, pins);

    std::vector<int> free_vars;
    for (int v = 0; v < n; ++v)
      if (!pins.count(v)) free_vars.push_back(v);
    if (static_cast<int>(free_vars.size()) != d)
      throw UnsupportedRegion(
          "naive_period: free variable count does not match the region dimension");

    std::vector<int> order_sorted = form.var_order;
    std::sort(order_sorted.begin(), order_sorted.end());
    if (order_sorted != free_vars)
      throw UnsupportedRegion(
          "naive_period: form differentials must match the free variables of each component");
    const int wedge_sign = permutation_sign(form.var_order);

    SetExpr tree = comp;
    PolynomialQ num = form.num;
    PolynomialQ den = form.den;
    std::vector<int> pinned;
    for (const auto& [v, value] : pins) pinned.push_back(v);
    std::sort(pinned.rbegin(), pinned.rend());
    for (int v : pinned) {
      const Rat& value = pins.at(v);
      tree = substitute_tree(tree, v, value);
      num = num.substitute(v, value);
      den = den.substitute(v, value);
    }
    if (den.is_zero()) throw PoleOnRegion("naive_period: denominator vanishes identically on a component");

    ScanSetup setup;
    std::vector<PolynomialQ> leaf_polys;
    setup.skel = build_skel(tree, leaf_polys);
    for (const auto& p : leaf_polys) setup.leaves.push_back(compile_dpoly(p));
    setup.num = compile_dpoly(num);
    setup.den = compile_dpoly(den);
    for (int v : free_vars) {
      setup.lo.push_back(rat_to_double(region.box[static_cast<size_t>(v)].first));
      setup.hi.push_back(rat_to_double(region.box[static_cast<size_t>(v)].second));
    }
    setup.pole_checks = pole_checks;

    total += static_cast<double>(wedge_sign) *
             scan(setup, setup.leaves, setup.num, setup.den, 0, cfg.abs_tol, cfg.rel_tol, cfg,
                  false);
  }
  return static_cast<double>(region.orientation) * total;
}

}  // namespace detail_naive

// Integral of a rational top-form over a semi-algebraic region. In proper
// mode the pole set must avoid the closed region (checked at every sampled
// slice). With singular_shrink_levels > 0 the region is intersected with
// den^2 >= eps^2 for a halving eps sequence and the results are
// Richardson-extrapolated, which handles boundary poles with convergent
// improper integrals.
inline Complex naive_period(const IntegrationRegion& region, const RationalForm& form,
                            const QuadratureConfig& cfg) {
  validate(cfg);
  validate_form(form);
  if (form.num.n_vars != region.set.n_vars)
    throw DimensionMismatch("naive_period: form and region variable counts differ");
  if (form.degree != region.dimension)
    throw DimensionMismatch("naive_period: form degree must equal the region dimension");
  if (region.dimension > 4)
    throw UnsupportedRegion("naive_period: dimension exceeds the supported maximum of 4");

  if (cfg.singular_shrink_levels == 0)
    return detail_naive::integrate_region(region, form, cfg, true);

  if (!form.den.is_real())
    throw UnsupportedRegion("naive_period: improper mode needs a real-coefficient denominator");

  std::vector<Complex> values;
  for (int j = 0; j < cfg.singular_shrink_levels; ++j) {
    const Rat eps(1, 10 * (1LL << j));
    PolynomialQ gap = form.den * form.den -
                      PolynomialQ::constant(form.den.n_vars, GaussRat(eps * eps));
    IntegrationRegion shrunk = region;
    shrunk.set.tree =
        SetExpr::land({region.set.tree, SetExpr::leaf(std::move(gap), Rel::Ge)});
    values.push_back(detail_naive::integrate_region(shrunk, form, cfg, false));
  }
  if (values.size() >= 3 && !differences_decreasing(values, 1e-12))
    throw NonConvergent("naive_period: shrink sequence is not settling");
  return richardson_limit(values, 0.5).value;
}

}  // namespace periodlab
