#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "semialg.hpp"

namespace periodlab {

// JSON schemas (see README for worked examples):
//   region: {schema, vars, tree, box, orientation, dim}
//   form:   {schema, vars, degree, order, num, den}
// Rational coefficients travel as "p/q" strings so round trips are lossless.

namespace detail_io {

inline nlohmann::json poly_to_json(const PolynomialQ& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [e, c] : p.terms) {
    nlohmann::json t;
    t["c"] = rat_to_string(c.re);
    if (c.im != 0) t["ci"] = rat_to_string(c.im);
    t["e"] = e;
    terms.push_back(std::move(t));
  }
  return terms;
}

inline PolynomialQ poly_from_json(const nlohmann::json& j, int n_vars) {
  PolynomialQ p(n_vars);
  if (!j.is_array()) throw PeriodlabError("poly_from_json: expected an array of terms");
  for (const auto& t : j) {
    GaussRat c(rat_from_string(t.at("c").get<std::string>()));
    if (t.contains("ci")) c.im = rat_from_string(t["ci"].get<std::string>());
    std::vector<int> e = t.at("e").get<std::vector<int>>();
    if (static_cast<int>(e.size()) != n_vars)
      throw PeriodlabError("poly_from_json: exponent tuple length mismatch");
    p.add_term(e, c);
  }
  return p;
}

inline nlohmann::json tree_to_json(const SetExpr& e) {
  nlohmann::json j;
  switch (e.kind) {
    case SetExpr::Kind::Leaf:
      j["op"] = "leaf";
      j["rel"] = e.rel == Rel::Ge ? ">=" : (e.rel == Rel::Gt ? ">" : "==");
      j["poly"] = poly_to_json(e.poly);
      return j;
    case SetExpr::Kind::Not:
      j["op"] = "not";
      j["args"] = nlohmann::json::array({tree_to_json(e.kids[0])});
      return j;
    case SetExpr::Kind::And:
    case SetExpr::Kind::Or: {
      j["op"] = e.kind == SetExpr::Kind::And ? "and" : "or";
      nlohmann::json args = nlohmann::json::array();
      for (const auto& k : e.kids) args.push_back(tree_to_json(k));
      j["args"] = std::move(args);
      return j;
    }
  }
  return j;
}

inline SetExpr tree_from_json(const nlohmann::json& j, int n_vars) {
  const std::string op = j.at("op").get<std::string>();
  if (op == "leaf") {
    const std::string rel = j.at("rel").get<std::string>();
    Rel r;
    if (rel == ">=")
      r = Rel::Ge;
    else if (rel == ">")
      r = Rel::Gt;
    else if (rel == "==")
      r = Rel::Eq;
    else
      throw PeriodlabError("tree_from_json: unknown relation '" + rel + "'");
    return SetExpr::leaf(poly_from_json(j.at("poly"), n_vars), r);
  }
  std::vector<SetExpr> kids;
  for (const auto& a : j.at("args")) kids.push_back(tree_from_json(a, n_vars));
  if (op == "not") {
    if (kids.size() != 1) throw PeriodlabError("tree_from_json: 'not' takes one argument");
    return SetExpr::lnot(std::move(kids[0]));
  }
  if (op == "and") return SetExpr::land(std::move(kids));
  if (op == "or") return SetExpr::lor(std::move(kids));
  throw PeriodlabError("tree_from_json: unknown op '" + op + "'");
}

}  // namespace detail_io

inline nlohmann::json region_to_json(const IntegrationRegion& region,
                                     const std::vector<std::string>& var_names = {}) {
  nlohmann::json j;
  j["schema"] = "periodlab/region/v1";
  nlohmann::json vars = nlohmann::json::array();
  for (int i = 0; i < region.set.n_vars; ++i)
    vars.push_back(static_cast<size_t>(i) < var_names.size() ? var_names[static_cast<size_t>(i)]
                                                             : "x" + std::to_string(i));
  j["vars"] = std::move(vars);
  j["tree"] = detail_io::tree_to_json(region.set.tree);
  nlohmann::json box = nlohmann::json::array();
  for (const auto& [lo, hi] : region.box)
    box.push_back(nlohmann::json::array({rat_to_string(lo), rat_to_string(hi)}));
  j["box"] = std::move(box);
  j["orientation"] = region.orientation;
  j["dim"] = region.dimension;
  return j;
}

inline IntegrationRegion region_from_json(const nlohmann::json& j) {
  const int n_vars = static_cast<int>(j.at("vars").size());
  SemiAlgebraicSet set;
  set.n_vars = n_vars;
  set.tree = detail_io::tree_from_json(j.at("tree"), n_vars);
  std::vector<std::pair<Rat, Rat>> box;
  for (const auto& b : j.at("box"))
    box.emplace_back(rat_from_string(b.at(0).get<std::string>()),
                     rat_from_string(b.at(1).get<std::string>()));
  return make_region(std::move(set), std::move(box), j.at("orientation").get<int>(),
                     j.at("dim").get<int>());
}

inline nlohmann::json form_to_json(const RationalForm& form,
                                   const std::vector<std::string>& var_names = {}) {
  nlohmann::json j;
  j["schema"] = "periodlab/form/v1";
  nlohmann::json vars = nlohmann::json::array();
  for (int i = 0; i < form.num.n_vars; ++i)
    vars.push_back(static_cast<size_t>(i) < var_names.size() ? var_names[static_cast<size_t>(i)]
                                                             : "x" + std::to_string(i));
  j["vars"] = std::move(vars);
  j["degree"] = form.degree;
  j["order"] = form.var_order;
  j["num"] = detail_io::poly_to_json(form.num);
  j["den"] = detail_io::poly_to_json(form.den);
  return j;
}

inline RationalForm form_from_json(const nlohmann::json& j) {
  const int n_vars = static_cast<int>(j.at("vars").size());
  RationalForm form;
  form.degree = j.at("degree").get<int>();
  form.var_order = j.at("order").get<std::vector<int>>();
  form.num = detail_io::poly_from_json(j.at("num"), n_vars);
  form.den = detail_io::poly_from_json(j.at("den"), n_vars);
  validate_form(form);
  return form;
}

}  // namespace periodlab
