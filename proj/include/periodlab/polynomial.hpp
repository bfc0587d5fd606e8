#pragma once

#include <map>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace periodlab {

// Multivariate polynomial with Q(i) coefficients, stored sparsely as
// exponent-tuple -> coefficient. Exponent tuples always have length n_vars.
struct PolynomialQ {
  int n_vars = 0;
  std::map<std::vector<int>, GaussRat> terms;

  PolynomialQ() = default;
  explicit PolynomialQ(int nv) : n_vars(nv) {}

  static PolynomialQ constant(int nv, GaussRat c) {
    PolynomialQ p(nv);
    if (!c.is_zero()) p.terms[std::vector<int>(static_cast<size_t>(nv), 0)] = std::move(c);
    return p;
  }

  static PolynomialQ variable(int nv, int i) {
    if (i < 0 || i >= nv) throw PeriodlabError("PolynomialQ::variable: index out of range");
    PolynomialQ p(nv);
    std::vector<int> e(static_cast<size_t>(nv), 0);
    e[static_cast<size_t>(i)] = 1;
    p.terms[std::move(e)] = GaussRat(1);
    return p;
  }

  static PolynomialQ from_terms(int nv,
                                const std::vector<std::pair<std::vector<int>, GaussRat>>& ts) {
    PolynomialQ p(nv);
    for (const auto& [e, c] : ts) {
      if (static_cast<int>(e.size()) != nv)
        throw PeriodlabError("PolynomialQ::from_terms: exponent tuple length mismatch");
      p.add_term(e, c);
    }
    return p;
  }

  void add_term(const std::vector<int>& e, const GaussRat& c) {
    if (c.is_zero()) return;
    auto it = terms.find(e);
    if (it == terms.end()) {
      terms.emplace(e, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms.erase(it);
    }
  }

  bool is_zero() const { return terms.empty(); }

  bool is_real() const {
    for (const auto& [e, c] : terms)
      if (!c.is_real()) return false;
    return true;
  }

  int degree_in(int var) const {
    int d = 0;
    for (const auto& [e, c] : terms) d = std::max(d, e[static_cast<size_t>(var)]);
    return d;
  }

  int total_degree() const {
    int d = 0;
    for (const auto& [e, c] : terms) {
      int s = 0;
      for (int x : e) s += x;
      d = std::max(d, s);
    }
    return d;
  }

  friend PolynomialQ operator+(const PolynomialQ& a, const PolynomialQ& b) {
    if (a.n_vars != b.n_vars) throw PeriodlabError("PolynomialQ: variable count mismatch");
    PolynomialQ out = a;
    for (const auto& [e, c] : b.terms) out.add_term(e, c);
    return out;
  }

  friend PolynomialQ operator-(const PolynomialQ& a, const PolynomialQ& b) {
    if (a.n_vars != b.n_vars) throw PeriodlabError("PolynomialQ: variable count mismatch");
    PolynomialQ out = a;
    for (const auto& [e, c] : b.terms) out.add_term(e, -c);
    return out;
  }

  friend PolynomialQ operator-(const PolynomialQ& a) {
    PolynomialQ out(a.n_vars);
    for (const auto& [e, c] : a.terms) out.terms[e] = -c;
    return out;
  }

  friend PolynomialQ operator*(const PolynomialQ& a, const PolynomialQ& b) {
    if (a.n_vars != b.n_vars) throw PeriodlabError("PolynomialQ: variable count mismatch");
    PolynomialQ out(a.n_vars);
    for (const auto& [ea, ca] : a.terms)
      for (const auto& [eb, cb] : b.terms) {
        std::vector<int> e(ea.size());
        for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    return out;
  }

  friend PolynomialQ operator*(const GaussRat& s, const PolynomialQ& a) {
    PolynomialQ out(a.n_vars);
    if (s.is_zero()) return out;
    for (const auto& [e, c] : a.terms) out.terms[e] = s * c;
    return out;
  }

  GaussRat eval_exact(const std::vector<Rat>& pt) const {
    if (static_cast<int>(pt.size()) != n_vars)
      throw DimensionMismatch("PolynomialQ::eval_exact: point length mismatch");
    GaussRat acc(0);
    for (const auto& [e, c] : terms) {
      GaussRat t = c;
      for (size_t i = 0; i < e.size(); ++i)
        if (e[i] != 0) t *= GaussRat(rat_pow(pt[i], e[i]));
      acc += t;
    }
    return acc;
  }

  // Floating evaluation; also reports the sum of term magnitudes so callers
  // can scale equality tolerances.
  std::pair<Complex, double> eval_with_scale(const std::vector<double>& pt) const {
    if (static_cast<int>(pt.size()) != n_vars)
      throw DimensionMismatch("PolynomialQ::eval: point length mismatch");
    Complex acc{0.0, 0.0};
    double scale = 0.0;
    for (const auto& [e, c] : terms) {
      double mono = 1.0;
      for (size_t i = 0; i < e.size(); ++i)
        for (int k = 0; k < e[i]; ++k) mono *= pt[i];
      const Complex t = c.to_complex() * mono;
      acc += t;
      scale += std::abs(t);
    }
    return {acc, scale};
  }

  Complex eval(const std::vector<double>& pt) const { return eval_with_scale(pt).first; }

  // Pins one variable to an exact rational value; the result lives in the
  // remaining variables (indices above `var` shift down by one).
  PolynomialQ substitute(int var, const Rat& value) const {
    if (var < 0 || var >= n_vars) throw PeriodlabError("PolynomialQ::substitute: bad index");
    PolynomialQ out(n_vars - 1);
    for (const auto& [e, c] : terms) {
      std::vector<int> rest;
      rest.reserve(e.size() - 1);
      for (size_t i = 0; i < e.size(); ++i)
        if (static_cast<int>(i) != var) rest.push_back(e[i]);
      out.add_term(rest, c * GaussRat(rat_pow(value, e[static_cast<size_t>(var)])));
    }
    return out;
  }
};

}  // namespace periodlab
