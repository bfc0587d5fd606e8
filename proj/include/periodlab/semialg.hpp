#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "polynomial.hpp"

namespace periodlab {

enum class Rel { Ge, Gt, Eq };

// Boolean combination of polynomial sign conditions. Leaf polynomials have
// rational (real) coefficients.
struct SetExpr {
  enum class Kind { Leaf, Not, And, Or };
  Kind kind = Kind::Leaf;
  Rel rel = Rel::Ge;
  PolynomialQ poly;
  std::vector<SetExpr> kids;

  static SetExpr leaf(PolynomialQ p, Rel r) {
    if (!p.is_real()) throw PeriodlabError("SetExpr: leaf polynomials must have real coefficients");
    SetExpr e;
    e.kind = Kind::Leaf;
    e.rel = r;
    e.poly = std::move(p);
    return e;
  }
  static SetExpr lnot(SetExpr a) {
    SetExpr e;
    e.kind = Kind::Not;
    e.kids.push_back(std::move(a));
    return e;
  }
  static SetExpr land(std::vector<SetExpr> kids) {
    SetExpr e;
    e.kind = Kind::And;
    e.kids = std::move(kids);
    return e;
  }
  static SetExpr lor(std::vector<SetExpr> kids) {
    SetExpr e;
    e.kind = Kind::Or;
    e.kids = std::move(kids);
    return e;
  }
};

struct SemiAlgebraicSet {
  int n_vars = 0;
  SetExpr tree;
};

namespace detail {

inline int leaf_nvars_check(const SetExpr& e, int n_vars) {
  if (e.kind == SetExpr::Kind::Leaf) {
    if (e.poly.n_vars != n_vars)
      throw DimensionMismatch("SemiAlgebraicSet: leaf polynomial variable count mismatch");
    return 0;
  }
  for (const auto& k : e.kids) leaf_nvars_check(k, n_vars);
  return 0;
}

inline bool eval_tree_float(const SetExpr& e, const std::vector<double>& pt) {
  switch (e.kind) {
    case SetExpr::Kind::Leaf: {
      const auto [v, scale] = e.poly.eval_with_scale(pt);
      const double x = v.real();
      switch (e.rel) {
        case Rel::Ge: return x >= -1e-12 * (1.0 + scale);
        case Rel::Gt: return x > 0.0;
        case Rel::Eq: return std::abs(x) <= 1e-12 * (1.0 + scale);
      }
      return false;
    }
    case SetExpr::Kind::Not:
      return !eval_tree_float(e.kids[0], pt);
    case SetExpr::Kind::And:
      for (const auto& k : e.kids)
        if (!eval_tree_float(k, pt)) return false;
      return true;
    case SetExpr::Kind::Or:
      for (const auto& k : e.kids)
        if (eval_tree_float(k, pt)) return true;
      return false;
  }
  return false;
}

inline bool eval_tree_exact(const SetExpr& e, const std::vector<Rat>& pt) {
  switch (e.kind) {
    case SetExpr::Kind::Leaf: {
      const GaussRat v = e.poly.eval_exact(pt);
      switch (e.rel) {
        case Rel::Ge: return v.re >= 0;
        case Rel::Gt: return v.re > 0;
        case Rel::Eq: return v.re == 0;
      }
      return false;
    }
    case SetExpr::Kind::Not:
      return !eval_tree_exact(e.kids[0], pt);
    case SetExpr::Kind::And:
      for (const auto& k : e.kids)
        if (!eval_tree_exact(k, pt)) return false;
      return true;
    case SetExpr::Kind::Or:
      for (const auto& k : e.kids)
        if (eval_tree_exact(k, pt)) return true;
      return false;
  }
  return false;
}

}  // namespace detail

// Membership with floating evaluation. Equality leaves get a scaled
// tolerance so points like (1, sqrt(2)) land on s^2 = t^3 + 1.
inline bool contains(const SemiAlgebraicSet& set, const std::vector<double>& point) {
  if (static_cast<int>(point.size()) != set.n_vars)
    throw DimensionMismatch("contains: point length does not match variable count");
  detail::leaf_nvars_check(set.tree, set.n_vars);
  return detail::eval_tree_float(set.tree, point);
}

// Membership with exact sign evaluation at rational points.
inline bool contains(const SemiAlgebraicSet& set, const std::vector<Rat>& point) {
  if (static_cast<int>(point.size()) != set.n_vars)
    throw DimensionMismatch("contains: point length does not match variable count");
  detail::leaf_nvars_check(set.tree, set.n_vars);
  return detail::eval_tree_exact(set.tree, point);
}

struct IntegrationRegion {
  SemiAlgebraicSet set;
  std::vector<std::pair<Rat, Rat>> box;  // per-variable closed interval
  int orientation = 1;
  int dimension = 0;
};

// Top-degree rational differential form f dx_{o_1} ^ ... ^ dx_{o_d} on the
// ambient variables; var_order lists the differential directions in wedge
// order. Pinned ambient variables may still appear in the coefficients.
struct RationalForm {
  int degree = 0;
  PolynomialQ num;
  PolynomialQ den;
  std::vector<int> var_order;
};

inline void validate_form(const RationalForm& form) {
  if (form.num.n_vars != form.den.n_vars)
    throw DimensionMismatch("RationalForm: numerator and denominator variable counts differ");
  if (form.den.is_zero()) throw PeriodlabError("RationalForm: denominator is identically zero");
  if (static_cast<int>(form.var_order.size()) != form.degree)
    throw DimensionMismatch("RationalForm: variable order length must equal the degree");
  for (int v : form.var_order)
    if (v < 0 || v >= form.num.n_vars)
      throw PeriodlabError("RationalForm: variable order index out of range");
}

// Directly constructed regions stay low-dimensional; products may go higher
// (see product_region).
inline IntegrationRegion make_region(SemiAlgebraicSet set, std::vector<std::pair<Rat, Rat>> box,
                                     int orientation, int dimension) {
  if (static_cast<int>(box.size()) != set.n_vars)
    throw DimensionMismatch("make_region: box entries must match variable count");
  for (const auto& [lo, hi] : box)
    if (lo > hi) throw PeriodlabError("make_region: empty box interval");
  if (orientation != 1 && orientation != -1)
    throw PeriodlabError("make_region: orientation must be +1 or -1");
  if (dimension < 0 || dimension > set.n_vars)
    throw DimensionMismatch("make_region: dimension out of range");
  if (dimension > 2)
    throw UnsupportedRegion("make_region: directly constructed regions are capped at dimension 2");
  detail::leaf_nvars_check(set.tree, set.n_vars);
  return IntegrationRegion{std::move(set), std::move(box), orientation, dimension};
}

namespace detail {

inline PolynomialQ embed_poly(const PolynomialQ& p, int total, int offset) {
  PolynomialQ out(total);
  for (const auto& [e, c] : p.terms) {
    std::vector<int> ee(static_cast<size_t>(total), 0);
    for (size_t i = 0; i < e.size(); ++i) ee[i + static_cast<size_t>(offset)] = e[i];
    out.terms[std::move(ee)] = c;
  }
  return out;
}

inline SetExpr embed_tree(const SetExpr& e, int total, int offset) {
  if (e.kind == SetExpr::Kind::Leaf) {
    SetExpr out;
    out.kind = SetExpr::Kind::Leaf;
    out.rel = e.rel;
    out.poly = embed_poly(e.poly, total, offset);
    return out;
  }
  SetExpr out;
  out.kind = e.kind;
  for (const auto& k : e.kids) out.kids.push_back(embed_tree(k, total, offset));
  return out;
}

}  // namespace detail

// Cartesian product with the factors embedded side by side. Products are the
// one place dimensions above 2 arise; they stay capped at 4.
inline IntegrationRegion product_region(const IntegrationRegion& g1, const IntegrationRegion& g2) {
  const int n1 = g1.set.n_vars, n2 = g2.set.n_vars;
  const int total = n1 + n2;
  const int dim = g1.dimension + g2.dimension;
  if (dim > 4) throw UnsupportedRegion("product_region: product dimension exceeds 4");
  SemiAlgebraicSet set;
  set.n_vars = total;
  set.tree = SetExpr::land(
      {detail::embed_tree(g1.set.tree, total, 0), detail::embed_tree(g2.set.tree, total, n1)});
  std::vector<std::pair<Rat, Rat>> box = g1.box;
  box.insert(box.end(), g2.box.begin(), g2.box.end());
  return IntegrationRegion{std::move(set), std::move(box), g1.orientation * g2.orientation, dim};
}

// Pullback form p1*w1 ^ p2*w2 on the product ambient space.
inline RationalForm product_form(const RationalForm& w1, const RationalForm& w2) {
  validate_form(w1);
  validate_form(w2);
  const int n1 = w1.num.n_vars, n2 = w2.num.n_vars;
  const int total = n1 + n2;
  RationalForm out;
  out.degree = w1.degree + w2.degree;
  out.num = detail::embed_poly(w1.num, total, 0) * detail::embed_poly(w2.num, total, n1);
  out.den = detail::embed_poly(w1.den, total, 0) * detail::embed_poly(w2.den, total, n1);
  out.var_order = w1.var_order;
  for (int v : w2.var_order) out.var_order.push_back(v + n1);
  return out;
}

}  // namespace periodlab
