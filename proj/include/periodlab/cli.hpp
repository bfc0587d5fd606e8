#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "derham.hpp"
#include "elliptic.hpp"
#include "errors.hpp"
#include "hodge.hpp"
#include "naive.hpp"
#include "numerics.hpp"
#include "periods.hpp"
#include "polylog.hpp"
#include "semialg.hpp"
#include "semialg_io.hpp"

namespace periodlab {

// Tolerances and output shape shared by every subcommand.  The default
// absolute tolerance can be overridden by the PERIODLAB_TOL environment
// variable, and by --tol on the command line.
struct RunConfig {
  QuadratureConfig quad;
  std::string format = "json";
};

// ---------------------------------------------------------------------------
// Subcommand registry.  Each library operation is owned by exactly one
// subcommand; the coverage test in the suite checks that this table is a
// partition of the module operation inventory.

struct SubcommandInfo {
  std::string name;
  std::vector<std::string> operations;
};

inline const std::vector<SubcommandInfo>& subcommand_registry() {
  static const std::vector<SubcommandInfo> table = {
      {"naive",
       {"naive_period", "contains", "product_region", "product_form", "integrate_interval"}},
      {"polylog", {"li_series", "li2", "li11"}},
      {"hyperlog", {"hyperlog", "li_via_integral", "integrate_path"}},
      {"monodromy", {"monodromy_increment", "make_loop", "concat", "reverse"}},
      {"reduce",
       {"basis_punctured_line", "reduce_punctured_line", "basis_quadric", "reduce_quadric"}},
      {"periods",
       {"homology_cycles_punctured_line", "period_matrix_punctured_line", "period_quadric",
        "period_matrix_dlog", "det_shape_check"}},
      {"coproduct", {"triple_coproduct"}},
      {"limit-mhs", {"build_vmhs", "limit_mhs", "monodromy_logarithm", "limit_period_matrix"}},
      {"elliptic", {"eisenstein", "wp", "wp_prime", "periods_from_curve", "tau_invariant"}},
  };
  return table;
}

inline const std::vector<std::string>& module_operations() {
  static const std::vector<std::string> ops = {
      // numerics
      "integrate_interval", "integrate_path", "make_loop", "concat", "reverse",
      // semialg
      "contains", "naive_period", "product_region", "product_form",
      // polylog
      "li_series", "hyperlog", "li_via_integral", "monodromy_increment", "li11", "li2",
      // derham
      "basis_punctured_line", "reduce_punctured_line", "basis_quadric", "reduce_quadric",
      // periods
      "homology_cycles_punctured_line", "period_matrix_punctured_line", "period_quadric",
      "period_matrix_dlog", "det_shape_check",
      // hodge
      "triple_coproduct", "monodromy_logarithm", "limit_period_matrix", "build_vmhs",
      "limit_mhs",
      // elliptic
      "eisenstein", "wp", "wp_prime", "periods_from_curve", "tau_invariant"};
  return ops;
}

namespace detail_cli {

// ---------------------------------------------------------------------------
// Scalar parsing.

inline double parse_double(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw UsageError(what + ": trailing characters in '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw UsageError(what + ": cannot parse number '" + s + "'");
  }
}

// Accepts "1.5", "-2e-3", "i", "-i", "0.5i", "1+2i", "1.5-0.25i".
inline Complex parse_complex(std::string s, const std::string& what) {
  std::string t;
  for (char c : s)
    if (c != ' ') t += c;
  if (t.empty()) throw UsageError(what + ": empty complex literal");
  if (t.back() != 'i' && t.back() != 'I') return Complex(parse_double(t, what), 0.0);

  const std::string body = t.substr(0, t.size() - 1);
  size_t split = std::string::npos;
  for (size_t k = body.size(); k-- > 1;) {
    const char c = body[k];
    if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  const auto unit_or = [&](const std::string& part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    return parse_double(part, what);
  };
  if (split == std::string::npos) return Complex(0.0, unit_or(body));
  return Complex(parse_double(body.substr(0, split), what), unit_or(body.substr(split)));
}

inline std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::vector<Complex> parse_complex_list(const std::string& s, const std::string& what) {
  std::vector<Complex> out;
  for (const std::string& item : split_csv(s)) out.push_back(parse_complex(item, what));
  return out;
}

inline std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<int> out;
  for (const std::string& item : split_csv(s)) {
    try {
      size_t pos = 0;
      out.push_back(std::stoi(item, &pos));
      if (pos != item.size()) throw UsageError(what + ": trailing characters in '" + item + "'");
    } catch (const std::logic_error&) {
      throw UsageError(what + ": cannot parse integer '" + item + "'");
    }
  }
  return out;
}

inline std::vector<Rat> parse_rat_list(const std::string& s, const std::string& what) {
  std::vector<Rat> out;
  for (const std::string& item : split_csv(s)) {
    try {
      out.push_back(rat_from_string(item));
    } catch (const PeriodlabError&) {
      throw UsageError(what + ": cannot parse rational '" + item + "'");
    }
  }
  return out;
}

inline Rat parse_rat(const std::string& s, const std::string& what) {
  const std::vector<Rat> one = parse_rat_list(s, what);
  if (one.size() != 1) throw UsageError(what + ": expected a single rational");
  return one[0];
}

// ---------------------------------------------------------------------------
// Deterministic emission: 15 significant digits, object keys sorted (the
// underlying JSON object is map-backed), no locale dependence.

inline std::string fmt15(double v) {
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::string(buf);
}

inline void write_json(std::ostream& os, const nlohmann::json& j) {
  if (j.is_object()) {
    os << '{';
    bool first = true;
    for (const auto& [key, value] : j.items()) {
      if (!first) os << ',';
      first = false;
      os << nlohmann::json(key).dump() << ':';
      write_json(os, value);
    }
    os << '}';
    return;
  }
  if (j.is_array()) {
    os << '[';
    for (size_t i = 0; i < j.size(); ++i) {
      if (i) os << ',';
      write_json(os, j[i]);
    }
    os << ']';
    return;
  }
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v))
      os << fmt15(v);
    else
      os << "null";
    return;
  }
  os << j.dump();
}

inline void write_csv(std::ostream& os, const nlohmann::json& j, const std::string& prefix) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items())
      write_csv(os, value, prefix.empty() ? key : prefix + "." + key);
    return;
  }
  if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i) write_csv(os, j[i], prefix + "." + std::to_string(i));
    return;
  }
  os << prefix << ',';
  if (j.is_number_float()) {
    const double v = j.get<double>();
    os << (std::isfinite(v) ? fmt15(v) : "null");
  } else if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s.find(',') != std::string::npos || s.find('"') != std::string::npos) {
      os << '"';
      for (char c : s) {
        if (c == '"') os << '"';
        os << c;
      }
      os << '"';
    } else {
      os << s;
    }
  } else {
    os << j.dump();
  }
  os << '\n';
}

inline void emit(std::ostream& os, const nlohmann::json& j, const std::string& format) {
  if (format == "json") {
    write_json(os, j);
    os << '\n';
    return;
  }
  if (format == "csv") {
    os << "key,value\n";
    write_csv(os, j, "");
    return;
  }
  throw UsageError("unknown output format '" + format + "'");
}

inline nlohmann::json complex_json(Complex v) {
  nlohmann::json j;
  j["im"] = v.imag();
  j["re"] = v.real();
  return j;
}

inline nlohmann::json value_json(Complex v, double tol) {
  nlohmann::json j;
  j["schema"] = "periodlab/value/v1";
  j["tol"] = tol;
  j["value"] = complex_json(v);
  return j;
}

inline nlohmann::json matrix_json(const PeriodMatrix& P, double tol,
                                  const std::string& branch) {
  nlohmann::json j;
  j["schema"] = "periodlab/matrix/v1";
  j["branch"] = branch;
  j["rows"] = P.row_labels;
  j["cols"] = P.col_labels;
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (const auto& row : P.entries) {
    nlohmann::json rr = nlohmann::json::array();
    nlohmann::json ri = nlohmann::json::array();
    for (const Complex& v : row) {
      rr.push_back(v.real());
      ri.push_back(v.imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  j["tol"] = tol;
  return j;
}

inline nlohmann::json gauss_json(const GaussRat& c) {
  nlohmann::json j;
  j["im"] = rat_to_string(c.im);
  j["re"] = rat_to_string(c.re);
  return j;
}

inline nlohmann::json mhs_json(const MHS& m) {
  nlohmann::json j;
  j["schema"] = "periodlab/mhs/v1";
  j["a"] = complex_json(m.a);
  j["b"] = complex_json(m.b);
  j["generators"] = m.generator_labels;
  nlohmann::json cols_re = nlohmann::json::array();
  nlohmann::json cols_im = nlohmann::json::array();
  for (const auto& col : m.lattice) {
    nlohmann::json cr = nlohmann::json::array();
    nlohmann::json ci = nlohmann::json::array();
    for (const Complex& v : col) {
      cr.push_back(v.real());
      ci.push_back(v.imag());
    }
    cols_re.push_back(std::move(cr));
    cols_im.push_back(std::move(ci));
  }
  j["columns_re"] = std::move(cols_re);
  j["columns_im"] = std::move(cols_im);
  nlohmann::json w;
  for (const auto& [k, idx] : m.weight) w[std::to_string(k)] = idx;
  nlohmann::json f;
  for (const auto& [k, idx] : m.hodge) f[std::to_string(k)] = idx;
  j["weight"] = std::move(w);
  j["hodge"] = std::move(f);
  j["steps"] = m.steps;
  return j;
}

inline nlohmann::json tensor_json(const TripleTensor& t) {
  nlohmann::json j;
  j["schema"] = "periodlab/tensor/v1";
  nlohmann::json terms = nlohmann::json::array();
  for (const TensorTerm& term : t.terms()) {
    nlohmann::json tj;
    tj["c"] = rat_to_string(term.coeff);
    tj["f0"] = monomial_to_string(term.f0);
    tj["f1"] = monomial_to_string(term.f1);
    tj["f2"] = monomial_to_string(term.f2);
    terms.push_back(std::move(tj));
  }
  j["terms"] = std::move(terms);
  j["text"] = t.to_string();
  return j;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open input file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("cannot parse '" + path + "': " + e.what());
  }
}

inline GaussRat gauss_from_json(const nlohmann::json& j, const std::string& what) {
  try {
    GaussRat c(rat_from_string(j.at("re").get<std::string>()));
    if (j.contains("im")) c.im = rat_from_string(j["im"].get<std::string>());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(what + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Subcommand runners.

inline nlohmann::json run_naive(const std::string& region_path, const std::string& form_path,
                                const std::string& region2_path, const std::string& form2_path,
                                const std::string& probe, const RunConfig& run) {
  IntegrationRegion region = region_from_json(load_json_file(region_path));
  RationalForm form = form_from_json(load_json_file(form_path));
  if (region2_path.empty() != form2_path.empty())
    throw UsageError("naive: --region2 and --form2 must be given together");
  if (!region2_path.empty()) {
    const IntegrationRegion second = region_from_json(load_json_file(region2_path));
    const RationalForm second_form = form_from_json(load_json_file(form2_path));
    region = product_region(region, second);
    form = product_form(form, second_form);
  }
  nlohmann::json out = value_json(naive_period(region, form, run.quad), run.quad.abs_tol);
  if (!probe.empty()) {
    std::vector<double> pt;
    for (const std::string& c : split_csv(probe)) pt.push_back(parse_double(c, "--probe"));
    out["probe_inside"] = contains(region.set, pt);
  }
  return out;
}

inline nlohmann::json run_polylog(const std::string& mode, const std::string& word,
                                  const std::string& args, const std::string& x,
                                  const std::string& y, const RunConfig& run) {
  if (mode == "series") {
    if (word.empty() || args.empty())
      throw UsageError("polylog series: --word and --args are required");
    const IndexWord m{parse_int_list(word, "--word")};
    const std::vector<Complex> xs = parse_complex_list(args, "--args");
    return value_json(li_series(m, xs, run.quad.abs_tol), run.quad.abs_tol);
  }
  if (mode == "li2") {
    if (x.empty()) throw UsageError("polylog li2: --x is required");
    return value_json(li2(parse_complex(x, "--x"), principal_branch(), run.quad),
                      run.quad.abs_tol);
  }
  if (mode == "li11") {
    if (x.empty() || y.empty()) throw UsageError("polylog li11: --x and --y are required");
    return value_json(li11(parse_complex(x, "--x"), parse_complex(y, "--y"),
                           principal_branch(), run.quad),
                      run.quad.abs_tol);
  }
  throw UsageError("polylog: unknown --mode '" + mode + "'");
}

inline nlohmann::json run_hyperlog(const std::string& letters, const std::string& word,
                                   const std::string& args, const RunConfig& run) {
  if (!letters.empty()) {
    if (!word.empty() || !args.empty())
      throw UsageError("hyperlog: --letters excludes --word/--args");
    const HyperlogWord w{parse_complex_list(letters, "--letters")};
    return value_json(hyperlog(w, principal_branch(), run.quad), run.quad.abs_tol);
  }
  if (word.empty() || args.empty())
    throw UsageError("hyperlog: give --letters, or --word with --args");
  const IndexWord m{parse_int_list(word, "--word")};
  const std::vector<Complex> xs = parse_complex_list(args, "--args");
  return value_json(li_via_integral(m, xs, principal_branch(), run.quad), run.quad.abs_tol);
}

inline nlohmann::json run_monodromy(const std::string& function, const std::string& center,
                                    double radius, bool clockwise, const std::string& base,
                                    const std::string& held, const RunConfig& run) {
  MonodromyFunction fn;
  if (function == "li1-over-a")
    fn = MonodromyFunction::kLi1OverA;
  else if (function == "li2")
    fn = MonodromyFunction::kLi2;
  else if (function == "li11")
    fn = MonodromyFunction::kLi11;
  else
    throw UsageError("monodromy: unknown --function '" + function + "'");

  if (!(radius > 0.0)) throw UsageError("monodromy: --radius must be positive");
  const Complex c = parse_complex(center, "--center");
  Path loop = make_loop(c, radius, !clockwise);
  std::string description = std::string(clockwise ? "clockwise" : "counterclockwise") +
                            " circle of radius " + fmt15(radius) + " around " +
                            fmt15(c.real()) + "+" + fmt15(c.imag()) + "i";
  if (!base.empty()) {
    const Path tail = segment_path(parse_complex(base, "--base"), c + Complex(radius, 0.0));
    loop = concat(concat(tail, loop), reverse(tail));
    description = "lasso from " + base + ": " + description;
  }
  const std::vector<Complex> held_params =
      held.empty() ? std::vector<Complex>{} : parse_complex_list(held, "--held");

  nlohmann::json out = value_json(monodromy_increment(fn, loop, held_params, run.quad),
                                  run.quad.abs_tol);
  out["function"] = function;
  out["loop"] = description;
  return out;
}

inline LaurentPoly laurent_from_json(const nlohmann::json& j) {
  LaurentPoly f;
  if (!j.is_array()) throw UsageError("element: 'form' must be an array of terms");
  for (const auto& t : j) {
    try {
      GaussRat c(rat_from_string(t.at("c").get<std::string>()));
      if (t.contains("ci")) c.im = rat_from_string(t["ci"].get<std::string>());
      laurent_add(f, t.at("e").get<long>(), c);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("element term: ") + e.what());
    }
  }
  return f;
}

inline QuadricPoly quadric_from_json(const nlohmann::json& j, const std::string& what) {
  QuadricPoly p;
  if (!j.is_array()) throw UsageError(what + " must be an array of terms");
  for (const auto& t : j) {
    try {
      GaussRat c(rat_from_string(t.at("c").get<std::string>()));
      if (t.contains("ci")) c.im = rat_from_string(t["ci"].get<std::string>());
      quadric_add(p, t.at("ex").get<long>(), t.at("ey").get<long>(), c);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(what + " term: " + e.what());
    }
  }
  return p;
}

inline nlohmann::json reduced_json(const ReducedClass& rc, const std::string& family) {
  nlohmann::json j;
  j["schema"] = "periodlab/reduced/v1";
  j["family"] = family;
  j["basis"] = rc.basis.labels;
  nlohmann::json coords = nlohmann::json::array();
  for (const GaussRat& c : rc.coordinates) coords.push_back(gauss_json(c));
  j["coordinates"] = std::move(coords);
  return j;
}

inline nlohmann::json run_reduce(const std::string& family, const std::string& points,
                                 const std::string& qa, const std::string& qb,
                                 const std::string& element_path) {
  const nlohmann::json ej = load_json_file(element_path);
  if (family == "punctured-line") {
    if (points.empty()) throw UsageError("reduce punctured-line: --points is required");
    PuncturedLinePair pair;
    pair.divisor_points = parse_rat_list(points, "--points");
    RelativeOneForm elem;
    if (ej.contains("form")) elem.form = laurent_from_json(ej["form"]);
    if (ej.contains("constants"))
      for (const auto& c : ej["constants"])
        elem.divisor_constants.push_back(gauss_from_json(c, "element constants"));
    return reduced_json(reduce_punctured_line(pair, elem), family);
  }
  if (family == "quadric") {
    if (qa.empty() || qb.empty()) throw UsageError("reduce quadric: --a and --b are required");
    const QuadricRing ring{parse_rat(qa, "--a"), parse_rat(qb, "--b")};
    QuadricForm form;
    if (ej.contains("dx")) form.dx = quadric_from_json(ej["dx"], "element 'dx'");
    if (ej.contains("dy")) form.dy = quadric_from_json(ej["dy"], "element 'dy'");
    return reduced_json(reduce_quadric(ring, form), family);
  }
  throw UsageError("reduce: unknown family '" + family + "'");
}

inline nlohmann::json run_periods(const std::string& family, const std::string& points,
                                  const std::string& alpha, const std::string& qa,
                                  const std::string& qb, const std::string& a,
                                  const std::string& b, std::optional<int> det_check,
                                  const RunConfig& run) {
  if (family == "punctured-line") {
    if (points.empty() == alpha.empty())
      throw UsageError("periods punctured-line: give exactly one of --points, --alpha");
    PuncturedLinePair pair;
    pair.divisor_points = points.empty()
                              ? std::vector<Rat>{Rat(1), parse_rat(alpha, "--alpha")}
                              : parse_rat_list(points, "--points");
    const std::vector<Cycle> cycles = homology_cycles_punctured_line(pair);
    nlohmann::json out =
        matrix_json(period_matrix_punctured_line(pair, run.quad), run.quad.abs_tol,
                    "intervals on the real axis; counterclockwise circle around 0");
    nlohmann::json labels = nlohmann::json::array();
    for (const Cycle& c : cycles) labels.push_back(c.label);
    out["cycles"] = std::move(labels);
    return out;
  }
  if (family == "quadric") {
    if (qa.empty() || qb.empty()) throw UsageError("periods quadric: --a and --b are required");
    const QuadricRing ring{parse_rat(qa, "--a"), parse_rat(qb, "--b")};
    return value_json(period_quadric(ring, run.quad), run.quad.abs_tol);
  }
  if (family == "dlog") {
    if (a.empty() || b.empty()) throw UsageError("periods dlog: --a and --b are required");
    const Complex av = parse_complex(a, "--a");
    const Complex bv = parse_complex(b, "--b");
    const PeriodMatrix P = period_matrix_dlog(av, bv, run.quad);
    nlohmann::json out = matrix_json(
        P, run.quad.abs_tol,
        "principal logarithms continued along straight segments from the base point");
    if (det_check) {
      nlohmann::json dj;
      dj["n"] = *det_check;
      dj["ratio_squared"] = rat_to_string(det_shape_check(P, *det_check));
      out["det_check"] = std::move(dj);
    }
    return out;
  }
  throw UsageError("periods: unknown family '" + family + "'");
}

inline nlohmann::json run_coproduct(const std::string& alpha, const std::string& beta, int i,
                                    int j, int n) {
  const Rat a = parse_rat(alpha, "--alpha");
  if (a <= 0 || a == 1)
    throw UsageError("coproduct: --alpha must be a positive rational different from 1");
  const double av = rat_to_double(a);

  ExactMatrix P;
  if (beta.empty()) {
    const AtomBasis basis{{{"2pii", kTwoPiI}, {"ln(a)", Complex(std::log(av), 0.0)}}};
    const AtomExpr one = AtomExpr::rational(Rat(1), basis);
    const AtomExpr zero = AtomExpr::rational(Rat(0), basis);
    P = {{one, AtomExpr::atom("ln(a)", basis)}, {zero, AtomExpr::atom("2pii", basis)}};
  } else {
    const Rat bq = parse_rat(beta, "--beta");
    if (bq <= 0 || bq == 1 || bq == a)
      throw UsageError("coproduct: --beta must be positive, different from 1 and --alpha");
    const double bv = rat_to_double(bq);
    const AtomBasis basis{{{"2pii", kTwoPiI},
                           {"ln(a)", Complex(std::log(av), 0.0)},
                           {"ln(b)", Complex(std::log(bv), 0.0)}}};
    const AtomExpr zero = AtomExpr::rational(Rat(0), basis);
    const AtomExpr lna = AtomExpr::atom("ln(a)", basis);
    const AtomExpr lnb = AtomExpr::atom("ln(b)", basis);
    P = {{AtomExpr::atom("2pii", basis), zero, zero},
         {lna, AtomExpr::rational(a - 1, basis), AtomExpr::rational(a * a - 1, basis)},
         {lnb - lna, AtomExpr::rational(bq - a, basis),
          AtomExpr::rational(bq * bq - a * a, basis)}};
  }
  nlohmann::json out = tensor_json(triple_coproduct(P, static_cast<size_t>(i),
                                                    static_cast<size_t>(j), n));
  out["entry"] = nlohmann::json::array({i, j});
  out["twist"] = n;
  return out;
}

inline nlohmann::json run_limit_mhs(const std::string& a, const std::string& b,
                                    const std::string& steps, const RunConfig& run) {
  const Complex av = parse_complex(a, "--a");
  const Complex bv = parse_complex(b, "--b");
  MHS m = build_vmhs(av, bv, run.quad);
  if (!steps.empty())
    for (const std::string& tok : split_csv(steps)) {
      if (tok == "a1")
        m = limit_mhs(m, LimitStep::kAEqualsOne, run.quad);
      else if (tok == "origin")
        m = limit_mhs(m, LimitStep::kOrigin, run.quad);
      else
        throw UsageError("limit-mhs: unknown step '" + tok + "' (expected a1, origin)");
    }
  return mhs_json(m);
}

inline nlohmann::json run_elliptic(const std::string& op, const std::string& omega1,
                                   const std::string& omega2, int k, long cutoff,
                                   const std::string& z, const std::string& g4,
                                   const std::string& g6, const RunConfig& run) {
  const auto lattice = [&]() {
    if (omega1.empty() || omega2.empty())
      throw UsageError("elliptic " + op + ": --omega1 and --omega2 are required");
    return Lattice{parse_complex(omega1, "--omega1"), parse_complex(omega2, "--omega2")};
  };
  if (op == "eisenstein") {
    double tail = 0.0;
    const Complex v = eisenstein(lattice(), k, cutoff, &tail);
    nlohmann::json out = value_json(v, run.quad.abs_tol);
    out["tail"] = tail;
    out["cutoff"] = cutoff;
    out["k"] = k;
    return out;
  }
  if (op == "wp" || op == "wp-prime") {
    if (z.empty()) throw UsageError("elliptic " + op + ": --z is required");
    const Complex zv = parse_complex(z, "--z");
    double tail = 0.0;
    const Complex v = op == "wp" ? wp(lattice(), zv, cutoff, &tail)
                                 : wp_prime(lattice(), zv, cutoff, &tail);
    nlohmann::json out = value_json(v, run.quad.abs_tol);
    out["tail"] = tail;
    out["cutoff"] = cutoff;
    return out;
  }
  if (op == "curve-periods") {
    if (g4.empty() || g6.empty())
      throw UsageError("elliptic curve-periods: --g4 and --g6 are required");
    const EllipticCurveQ curve{parse_complex(g4, "--g4"), parse_complex(g6, "--g6")};
    const Lattice L = periods_from_curve(curve, run.quad);
    nlohmann::json out;
    out["schema"] = "periodlab/lattice/v1";
    out["omega1"] = complex_json(L.omega1);
    out["omega2"] = complex_json(L.omega2);
    return out;
  }
  if (op == "tau") {
    if (omega1.empty() || omega2.empty())
      throw UsageError("elliptic tau: --omega1 and --omega2 are required");
    const Complex tau =
        tau_invariant(parse_complex(omega1, "--omega1"), parse_complex(omega2, "--omega2"));
    nlohmann::json out;
    out["schema"] = "periodlab/tau/v1";
    out["tau"] = complex_json(tau);
    out["tau_reduced"] = complex_json(fundamental_domain_tau(tau));
    return out;
  }
  throw UsageError("elliptic: unknown --op '" + op + "'");
}

}  // namespace detail_cli

// ---------------------------------------------------------------------------
// The front end.  Returns 0 on success, 1 on a domain error, 2 on a usage
// error; results go to `out`, diagnostics to `err`.

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"periodlab: numerical periods, polylogarithms, and period matrices"};
  app.require_subcommand(1);
  app.fallthrough(true);

  RunConfig run;
  app.add_option("--tol", run.quad.abs_tol, "absolute quadrature tolerance")
      ->envname("PERIODLAB_TOL");
  app.add_option("--format", run.format, "output format (json or csv)")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string region_path, form_path, region2_path, form2_path, probe;
  CLI::App* naive = app.add_subcommand("naive", "integrate a rational form over a region");
  naive->add_option("--region", region_path, "region JSON file")->required();
  naive->add_option("--form", form_path, "form JSON file")->required();
  naive->add_option("--region2", region2_path, "second factor region JSON file");
  naive->add_option("--form2", form2_path, "second factor form JSON file");
  naive->add_option("--probe", probe, "comma-separated point to test for membership");

  std::string pl_mode = "series", pl_word, pl_args, pl_x, pl_y;
  CLI::App* polylog = app.add_subcommand("polylog", "evaluate multiple polylogarithms");
  polylog->add_option("--mode", pl_mode, "series, li2, or li11")
      ->check(CLI::IsMember({"series", "li2", "li11"}));
  polylog->add_option("--word", pl_word, "comma-separated exponent word");
  polylog->add_option("--args", pl_args, "comma-separated complex arguments");
  polylog->add_option("--x", pl_x, "argument for li2/li11");
  polylog->add_option("--y", pl_y, "second argument for li11");

  std::string hl_letters, hl_word, hl_args;
  CLI::App* hyperlog = app.add_subcommand("hyperlog", "iterated integrals on the line");
  hyperlog->add_option("--letters", hl_letters, "comma-separated singular points");
  hyperlog->add_option("--word", hl_word, "polylog exponent word (integral route)");
  hyperlog->add_option("--args", hl_args, "polylog arguments (integral route)");

  std::string mono_fn, mono_center = "1", mono_base, mono_held;
  double mono_radius = 0.5;
  bool mono_cw = false;
  CLI::App* monodromy = app.add_subcommand("monodromy", "continuation increment around a loop");
  monodromy->add_option("--function", mono_fn, "li1-over-a, li2, or li11")->required();
  monodromy->add_option("--center", mono_center, "loop center (complex)");
  monodromy->add_option("--radius", mono_radius, "loop radius");
  monodromy->add_flag("--clockwise", mono_cw, "traverse the loop clockwise");
  monodromy->add_option("--base", mono_base, "optional basepoint for a lasso");
  monodromy->add_option("--held", mono_held, "held parameters (comma-separated complex)");

  std::string red_family, red_points, red_a, red_b, red_element;
  CLI::App* reduce = app.add_subcommand("reduce", "reduce a form to the cohomology basis");
  reduce->add_option("family", red_family, "punctured-line or quadric")
      ->required()
      ->check(CLI::IsMember({"punctured-line", "quadric"}));
  reduce->add_option("--points", red_points, "divisor points (comma-separated rationals)");
  reduce->add_option("--a", red_a, "quadric coefficient a (rational)");
  reduce->add_option("--b", red_b, "quadric coefficient b (rational)");
  reduce->add_option("--element", red_element, "element JSON file")->required();

  std::string per_family, per_points, per_alpha, per_qa, per_qb, per_a, per_b;
  std::optional<int> per_det;
  int per_det_storage = 0;
  CLI::App* periods = app.add_subcommand("periods", "period matrices and period numbers");
  periods->add_option("family", per_family, "punctured-line, quadric, or dlog")
      ->required()
      ->check(CLI::IsMember({"punctured-line", "quadric", "dlog"}));
  periods->add_option("--points", per_points, "divisor points (comma-separated rationals)");
  periods->add_option("--alpha", per_alpha, "shorthand for the divisor {1, alpha}");
  periods->add_option("--qa", per_qa, "quadric coefficient a (rational)");
  periods->add_option("--qb", per_qb, "quadric coefficient b (rational)");
  periods->add_option("--a", per_a, "dlog parameter a (complex)");
  periods->add_option("--b", per_b, "dlog parameter b (complex)");
  CLI::Option* det_opt =
      periods->add_option("--det-check", per_det_storage, "verify det = rational * (2 pi i)^n");

  std::string cop_alpha, cop_beta;
  int cop_i = 0, cop_j = 1, cop_n = 0;
  CLI::App* coproduct = app.add_subcommand("coproduct", "triple coproduct of a matrix entry");
  coproduct->add_option("--alpha", cop_alpha, "divisor point alpha (rational)")->required();
  coproduct->add_option("--beta", cop_beta, "divisor point beta (rational, three-point family)");
  coproduct->add_option("--i", cop_i, "row index of the entry");
  coproduct->add_option("--j", cop_j, "column index of the entry");
  coproduct->add_option("--n", cop_n, "power of 2 pi i twisting the entry");

  std::string lm_a = "3", lm_b, lm_steps;
  CLI::App* limitmhs = app.add_subcommand("limit-mhs", "limit mixed Hodge structures");
  limitmhs->add_option("--a", lm_a, "generic parameter a (complex)");
  limitmhs->add_option("--b", lm_b, "parameter b (complex)")->required();
  limitmhs->add_option("--steps", lm_steps, "comma-separated limits from {a1, origin}");

  std::string el_op, el_w1, el_w2, el_z, el_g4, el_g6;
  int el_k = 2;
  long el_cutoff = 100;
  CLI::App* elliptic = app.add_subcommand("elliptic", "lattice sums and elliptic periods");
  elliptic->add_option("--op", el_op, "eisenstein, wp, wp-prime, curve-periods, or tau")
      ->required()
      ->check(CLI::IsMember({"eisenstein", "wp", "wp-prime", "curve-periods", "tau"}));
  elliptic->add_option("--omega1", el_w1, "lattice generator (complex)");
  elliptic->add_option("--omega2", el_w2, "lattice generator (complex)");
  elliptic->add_option("--k", el_k, "Eisenstein weight parameter (2 or 3)");
  elliptic->add_option("--cutoff", el_cutoff, "lattice sum cutoff");
  elliptic->add_option("--z", el_z, "evaluation point (complex)");
  elliptic->add_option("--g4", el_g4, "curve coefficient G4 (complex)");
  elliptic->add_option("--g6", el_g6, "curve coefficient G6 (complex)");

  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  storage.insert(storage.begin(), "periodlab");
  argv.reserve(storage.size());
  for (std::string& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    validate(run.quad);
    if (det_opt->count() > 0) per_det = per_det_storage;
    nlohmann::json result;
    if (naive->parsed())
      result = detail_cli::run_naive(region_path, form_path, region2_path, form2_path, probe,
                                     run);
    else if (polylog->parsed())
      result = detail_cli::run_polylog(pl_mode, pl_word, pl_args, pl_x, pl_y, run);
    else if (hyperlog->parsed())
      result = detail_cli::run_hyperlog(hl_letters, hl_word, hl_args, run);
    else if (monodromy->parsed())
      result = detail_cli::run_monodromy(mono_fn, mono_center, mono_radius, mono_cw, mono_base,
                                         mono_held, run);
    else if (reduce->parsed())
      result = detail_cli::run_reduce(red_family, red_points, red_a, red_b, red_element);
    else if (periods->parsed())
      result = detail_cli::run_periods(per_family, per_points, per_alpha, per_qa, per_qb,
                                       per_a, per_b, per_det, run);
    else if (coproduct->parsed())
      result = detail_cli::run_coproduct(cop_alpha, cop_beta, cop_i, cop_j, cop_n);
    else if (limitmhs->parsed())
      result = detail_cli::run_limit_mhs(lm_a, lm_b, lm_steps, run);
    else if (elliptic->parsed())
      result = detail_cli::run_elliptic(el_op, el_w1, el_w2, el_k, el_cutoff, el_z, el_g4,
                                        el_g6, run);
    else
      throw UsageError("no subcommand selected");
    detail_cli::emit(out, result, run.format);
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const PeriodlabError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace periodlab
