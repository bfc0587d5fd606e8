#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"
#include "periods.hpp"
#include "polylog.hpp"
#include "rational.hpp"

namespace periodlab {

// ---------------------------------------------------------------------------
// Exact entries over declared atoms.
//
// Period matrix entries such as 2*pi*i, ln 2 or 2*pi*i*Li_1(2/3) are handled
// as exact objects: rational linear combinations of monomials in a declared
// list of atoms.  Each atom carries a numeric evaluation so that a claimed
// decomposition can be checked against a computed period before any exact
// manipulation starts.  Monomials are capped at height two (at most two atom
// factors counting inverses); everything the worked families need fits in
// that layer, and anything that leaves it raises an error instead of
// silently approximating.

struct Atom {
  std::string label;
  Complex value;
};

class AtomBasis {
 public:
  AtomBasis() = default;

  explicit AtomBasis(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    for (const Atom& a : atoms_) {
      if (a.label.empty()) throw UsageError("AtomBasis: empty atom label");
      if (!std::isfinite(a.value.real()) || !std::isfinite(a.value.imag()))
        throw UsageError("AtomBasis: atom '" + a.label + "' has a non-finite value");
    }
    for (size_t i = 0; i < atoms_.size(); ++i)
      for (size_t j = i + 1; j < atoms_.size(); ++j)
        if (atoms_[i].label == atoms_[j].label)
          throw UsageError("AtomBasis: duplicate atom label '" + atoms_[i].label + "'");
  }

  size_t size() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }

  bool has(const std::string& label) const {
    for (const Atom& a : atoms_)
      if (a.label == label) return true;
    return false;
  }

  Complex value_of(const std::string& label) const {
    for (const Atom& a : atoms_)
      if (a.label == label) return a.value;
    throw UsageError("AtomBasis: unknown atom '" + label + "'");
  }

  friend bool operator==(const AtomBasis& a, const AtomBasis& b) {
    if (a.atoms_.size() != b.atoms_.size()) return false;
    for (size_t i = 0; i < a.atoms_.size(); ++i)
      if (a.atoms_[i].label != b.atoms_[i].label || a.atoms_[i].value != b.atoms_[i].value)
        return false;
    return true;
  }
  friend bool operator!=(const AtomBasis& a, const AtomBasis& b) { return !(a == b); }

 private:
  std::vector<Atom> atoms_;
};

// A monomial is a sorted list of (atom label, exponent) pairs with nonzero
// exponents; the empty monomial is the rational unit.  Monomials compare by
// label, never by basis position, so results agree across reorderings of the
// same atom list.
using Monomial = std::vector<std::pair<std::string, int>>;

inline int monomial_height(const Monomial& m) {
  int h = 0;
  for (const auto& [label, e] : m) h += std::abs(e);
  return h;
}

inline std::string monomial_to_string(const Monomial& m) {
  if (m.empty()) return "1";
  std::string out;
  for (const auto& [label, e] : m) {
    if (!out.empty()) out += " ";
    const bool wrap = label.find(' ') != std::string::npos;
    out += wrap ? "(" + label + ")" : label;
    if (e != 1) out += "^" + std::to_string(e);
  }
  return out;
}

namespace detail_hodge {

inline Monomial merge_monomials(const Monomial& a, const Monomial& b) {
  Monomial out;
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      const int e = a[i].second + b[j].second;
      if (e != 0) out.emplace_back(a[i].first, e);
      ++i;
      ++j;
    }
  }
  if (monomial_height(out) > 2)
    throw NonMonomialDivision("atom product '" + monomial_to_string(out) +
                              "' leaves the height-two monomial layer");
  return out;
}

inline Monomial invert_monomial(const Monomial& m) {
  Monomial out = m;
  for (auto& [label, e] : out) e = -e;
  return out;
}

}  // namespace detail_hodge

class AtomExpr {
 public:
  AtomExpr() = default;

  static AtomExpr rational(const Rat& q, const AtomBasis& basis) {
    AtomExpr e;
    e.basis_ = basis;
    if (q != 0) e.terms_[Monomial{}] = q;
    return e;
  }

  static AtomExpr atom(const std::string& label, const AtomBasis& basis) {
    return monomial(Rat(1), Monomial{{label, 1}}, basis);
  }

  static AtomExpr monomial(const Rat& coeff, Monomial m, const AtomBasis& basis) {
    std::sort(m.begin(), m.end());
    for (size_t i = 0; i + 1 < m.size(); ++i)
      if (m[i].first == m[i + 1].first)
        throw UsageError("AtomExpr: repeated atom '" + m[i].first + "' in a monomial");
    for (const auto& [label, e] : m) {
      if (!basis.has(label)) throw UsageError("AtomExpr: unknown atom '" + label + "'");
      if (e == 0) throw UsageError("AtomExpr: zero exponent on atom '" + label + "'");
    }
    if (monomial_height(m) > 2)
      throw NonMonomialDivision("atom monomial '" + monomial_to_string(m) +
                                "' exceeds height two");
    AtomExpr out;
    out.basis_ = basis;
    if (coeff != 0) out.terms_[std::move(m)] = coeff;
    return out;
  }

  const AtomBasis& basis() const { return basis_; }
  const std::map<Monomial, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_monomial() const { return terms_.size() == 1; }

  Complex value() const {
    Complex total{0.0, 0.0};
    for (const auto& [m, q] : terms_) {
      Complex v{rat_to_double(q), 0.0};
      for (const auto& [label, e] : m) {
        const Complex a = basis_.value_of(label);
        for (int k = 0; k < std::abs(e); ++k) v = e > 0 ? v * a : v / a;
      }
      total += v;
    }
    return total;
  }

  // Verifies the numeric evaluation against a claimed value; the exact layer
  // only ever manipulates decompositions that were checked this way.
  const AtomExpr& checked(Complex claimed, double tol = 1e-9) const {
    if (std::abs(value() - claimed) > tol)
      throw UsageError("AtomExpr: decomposition '" + to_string() +
                       "' does not match the claimed value");
    return *this;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [m, q] : terms_) {
      const std::string mono = monomial_to_string(m);
      std::string piece;
      if (m.empty()) {
        piece = rat_to_string(q);
      } else if (q == 1) {
        piece = mono;
      } else if (q == -1) {
        piece = "-" + mono;
      } else {
        piece = rat_to_string(q) + " " + mono;
      }
      if (out.empty()) {
        out = piece;
      } else if (!piece.empty() && piece[0] == '-') {
        out += " - " + piece.substr(1);
      } else {
        out += " + " + piece;
      }
    }
    return out;
  }

  friend AtomExpr operator+(const AtomExpr& a, const AtomExpr& b) {
    require_same_basis(a, b);
    AtomExpr out = a;
    for (const auto& [m, q] : b.terms_) {
      auto it = out.terms_.find(m);
      if (it == out.terms_.end()) {
        out.terms_[m] = q;
      } else {
        it->second += q;
        if (it->second == 0) out.terms_.erase(it);
      }
    }
    return out;
  }

  friend AtomExpr operator-(const AtomExpr& a) {
    AtomExpr out = a;
    for (auto& [m, q] : out.terms_) q = -q;
    return out;
  }

  friend AtomExpr operator-(const AtomExpr& a, const AtomExpr& b) { return a + (-b); }

  friend AtomExpr operator*(const AtomExpr& a, const AtomExpr& b) {
    require_same_basis(a, b);
    AtomExpr out;
    out.basis_ = a.basis_;
    for (const auto& [ma, qa] : a.terms_)
      for (const auto& [mb, qb] : b.terms_) {
        const Monomial m = detail_hodge::merge_monomials(ma, mb);
        auto it = out.terms_.find(m);
        if (it == out.terms_.end()) {
          out.terms_[m] = qa * qb;
        } else {
          it->second += qa * qb;
          if (it->second == 0) out.terms_.erase(it);
        }
      }
    return out;
  }

  // Division is restricted to monomial divisors; that is all the exact
  // Gaussian elimination below ever needs.
  friend AtomExpr operator/(const AtomExpr& a, const AtomExpr& b) {
    require_same_basis(a, b);
    if (b.is_zero()) throw NonInvertible("AtomExpr: division by zero");
    if (!b.is_monomial())
      throw NonMonomialDivision("cannot divide by the non-monomial entry '" + b.to_string() +
                                "'");
    const auto& [m, q] = *b.terms_.begin();
    AtomExpr inv;
    inv.basis_ = a.basis_;
    inv.terms_[detail_hodge::invert_monomial(m)] = Rat(1) / q;
    return a * inv;
  }

  friend bool operator==(const AtomExpr& a, const AtomExpr& b) {
    return a.basis_ == b.basis_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const AtomExpr& a, const AtomExpr& b) { return !(a == b); }

 private:
  static void require_same_basis(const AtomExpr& a, const AtomExpr& b) {
    if (a.basis_ != b.basis_)
      throw UsageError("AtomExpr: operands declared over different atom bases");
  }

  AtomBasis basis_;
  std::map<Monomial, Rat> terms_;
};

// ---------------------------------------------------------------------------
// Triple tensors.
//
// A TripleTensor is a Q-linear combination of elementary tensors with three
// factors.  Canonical form is fully multilinear: every factor is reduced to a
// single monic monomial, rational scalars are pulled into the coefficient,
// and equal monomial triples are merged.  Equality of canonical forms is the
// equality notion used throughout.

struct TensorTerm {
  Rat coeff;
  Monomial f0, f1, f2;

  friend bool operator==(const TensorTerm& a, const TensorTerm& b) {
    return a.coeff == b.coeff && a.f0 == b.f0 && a.f1 == b.f1 && a.f2 == b.f2;
  }
};

class TripleTensor {
 public:
  TripleTensor() = default;

  static TripleTensor simple(const AtomExpr& a, const AtomExpr& b, const AtomExpr& c) {
    TripleTensor out;
    for (const auto& [ma, qa] : a.terms())
      for (const auto& [mb, qb] : b.terms())
        for (const auto& [mc, qc] : c.terms())
          out.terms_.push_back(TensorTerm{qa * qb * qc, ma, mb, mc});
    out.canonicalize();
    return out;
  }

  const std::vector<TensorTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  TripleTensor& operator+=(const TripleTensor& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    canonicalize();
    return *this;
  }

  friend TripleTensor operator+(TripleTensor a, const TripleTensor& b) { return a += b; }

  friend TripleTensor operator-(const TripleTensor& a) {
    TripleTensor out = a;
    for (auto& t : out.terms_) t.coeff = -t.coeff;
    return out;
  }

  friend TripleTensor operator-(const TripleTensor& a, const TripleTensor& b) {
    return a + (-b);
  }

  friend TripleTensor operator*(const Rat& q, const TripleTensor& a) {
    TripleTensor out = a;
    for (auto& t : out.terms_) t.coeff *= q;
    out.canonicalize();
    return out;
  }

  friend bool operator==(const TripleTensor& a, const TripleTensor& b) {
    return a.terms_ == b.terms_;
  }
  friend bool operator!=(const TripleTensor& a, const TripleTensor& b) { return !(a == b); }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& t : terms_) {
      std::string piece;
      if (t.coeff != 1 && t.coeff != -1)
        piece = rat_to_string(boost::multiprecision::abs(t.coeff)) + " ";
      piece += "[" + monomial_to_string(t.f0) + " (x) " + monomial_to_string(t.f1) + " (x) " +
               monomial_to_string(t.f2) + "]";
      if (out.empty()) {
        out = (t.coeff < 0 ? "-" : "") + piece;
      } else {
        out += (t.coeff < 0 ? " - " : " + ") + piece;
      }
    }
    return out;
  }

 private:
  void canonicalize() {
    std::sort(terms_.begin(), terms_.end(), [](const TensorTerm& a, const TensorTerm& b) {
      if (a.f0 != b.f0) return a.f0 < b.f0;
      if (a.f1 != b.f1) return a.f1 < b.f1;
      return a.f2 < b.f2;
    });
    std::vector<TensorTerm> merged;
    for (const TensorTerm& t : terms_) {
      if (!merged.empty() && merged.back().f0 == t.f0 && merged.back().f1 == t.f1 &&
          merged.back().f2 == t.f2) {
        merged.back().coeff += t.coeff;
      } else {
        merged.push_back(t);
      }
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const TensorTerm& t) { return t.coeff == 0; }),
                 merged.end());
    terms_ = std::move(merged);
  }

  std::vector<TensorTerm> terms_;
};

// ---------------------------------------------------------------------------
// Exact matrix inversion and the triple coproduct.

using ExactMatrix = std::vector<std::vector<AtomExpr>>;

namespace detail_hodge {

inline void validate_exact_matrix(const ExactMatrix& P) {
  const size_t n = P.size();
  if (n == 0) throw DimensionMismatch("exact matrix: empty");
  for (const auto& row : P)
    if (row.size() != n) throw DimensionMismatch("exact matrix: not square");
  for (const auto& row : P)
    for (const auto& e : row)
      if (!(e.basis() == P[0][0].basis()))
        throw UsageError("exact matrix: entries declared over different atom bases");
}

}  // namespace detail_hodge

// Gauss-Jordan over the exact layer.  Pivots must be monomial entries since
// only those can be divided by; a column whose remaining entries are all zero
// makes the matrix singular, and a column with nonzero entries but no
// monomial among them exceeds what the exact layer can eliminate.
inline ExactMatrix invert_exact(ExactMatrix A) {
  detail_hodge::validate_exact_matrix(A);
  const size_t n = A.size();
  const AtomBasis& basis = A[0][0].basis();

  ExactMatrix inv(n, std::vector<AtomExpr>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      inv[i][j] = AtomExpr::rational(i == j ? Rat(1) : Rat(0), basis);

  for (size_t c = 0; c < n; ++c) {
    size_t pivot = n;
    bool saw_nonzero = false;
    for (size_t r = c; r < n; ++r) {
      if (A[r][c].is_zero()) continue;
      saw_nonzero = true;
      if (A[r][c].is_monomial()) {
        pivot = r;
        break;
      }
    }
    if (!saw_nonzero) throw NonInvertible("invert_exact: matrix is singular");
    if (pivot == n)
      throw NonMonomialDivision("invert_exact: no monomial pivot available in column " +
                                std::to_string(c));
    std::swap(A[c], A[pivot]);
    std::swap(inv[c], inv[pivot]);

    const AtomExpr p = A[c][c];
    for (size_t j = 0; j < n; ++j) {
      A[c][j] = A[c][j] / p;
      inv[c][j] = inv[c][j] / p;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == c || A[r][c].is_zero()) continue;
      const AtomExpr f = A[r][c];
      for (size_t j = 0; j < n; ++j) {
        A[r][j] = A[r][j] - f * A[c][j];
        inv[r][j] = inv[r][j] - f * inv[c][j];
      }
    }
  }
  return inv;
}

// Triple coproduct of the entry at (i, j) of an exact period matrix:
//
//   coproduct(P[i][j]) = sum_{k,l} P[i][k] (x) Pinv[k][l] (x) P[l][j].
//
// The power n normalizes the entry by (2*pi*i)^n: first and third factors are
// divided by (2*pi*i)^n and the middle factor is multiplied by it, which is
// the convention that keeps the sum consistent for entries already carrying
// full twists.  The basis must then contain an atom whose value is 2*pi*i.
inline TripleTensor triple_coproduct(const ExactMatrix& P, size_t i, size_t j, int n = 0) {
  detail_hodge::validate_exact_matrix(P);
  const size_t dim = P.size();
  if (i >= dim || j >= dim)
    throw UsageError("triple_coproduct: entry (" + std::to_string(i) + ", " +
                     std::to_string(j) + ") out of range");
  if (n < 0) throw UsageError("triple_coproduct: the twist power must be non-negative");

  const AtomBasis& basis = P[0][0].basis();
  AtomExpr outer = AtomExpr::rational(Rat(1), basis);
  AtomExpr middle = AtomExpr::rational(Rat(1), basis);
  if (n > 0) {
    std::string tp_label;
    for (const Atom& a : basis.atoms())
      if (std::abs(a.value - kTwoPiI) <= 1e-9) tp_label = a.label;
    if (tp_label.empty())
      throw UsageError("triple_coproduct: twisting requires an atom evaluating to 2*pi*i");
    outer = AtomExpr::monomial(Rat(1), Monomial{{tp_label, -n}}, basis);
    middle = AtomExpr::monomial(Rat(1), Monomial{{tp_label, n}}, basis);
  }

  const ExactMatrix Pinv = invert_exact(P);
  TripleTensor total;
  for (size_t k = 0; k < dim; ++k)
    for (size_t l = 0; l < dim; ++l)
      total += TripleTensor::simple(P[i][k] * outer, Pinv[k][l] * middle, P[l][j] * outer);
  return total;
}

// Checks every entry of an exact matrix against the matching entry of a
// numerically computed period matrix.
inline void validate_decomposition(const ExactMatrix& P_exact, const PeriodMatrix& P,
                                   double tol = 1e-9) {
  detail_hodge::validate_exact_matrix(P_exact);
  const size_t n = P_exact.size();
  if (P.entries.size() != n)
    throw DimensionMismatch("validate_decomposition: size mismatch");
  for (size_t i = 0; i < n; ++i) {
    if (P.entries[i].size() != n)
      throw DimensionMismatch("validate_decomposition: size mismatch");
    for (size_t j = 0; j < n; ++j) P_exact[i][j].checked(P.entries[i][j], tol);
  }
}

// ---------------------------------------------------------------------------
// Monodromy matrices and their logarithms.
//
// A monodromy matrix acts on the cycle basis after continuation around a
// loop in parameter space.  All monodromies handled here are unipotent, so
// the logarithm is the finite nilpotent series; it is stored as a rational
// matrix carrying an overall factor 1/(2*pi*i).

using RatMatrix = std::vector<std::vector<Rat>>;

struct MonodromyMatrix {
  RatMatrix entries;
  std::string loop;
};

// N = scaled / (2*pi*i).
struct MonodromyLog {
  RatMatrix scaled;
};

namespace detail_hodge {

inline void validate_rational_square(const RatMatrix& M, const std::string& where) {
  if (M.empty()) throw DimensionMismatch(where + ": empty matrix");
  for (const auto& row : M)
    if (row.size() != M.size()) throw DimensionMismatch(where + ": not square");
}

inline RatMatrix rat_identity(size_t n) {
  RatMatrix I(n, std::vector<Rat>(n, Rat(0)));
  for (size_t i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

inline RatMatrix rat_mul(const RatMatrix& A, const RatMatrix& B) {
  const size_t n = A.size();
  RatMatrix C(n, std::vector<Rat>(n, Rat(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k) {
      if (A[i][k] == 0) continue;
      for (size_t j = 0; j < n; ++j) C[i][j] += A[i][k] * B[k][j];
    }
  return C;
}

inline bool rat_is_zero(const RatMatrix& A) {
  for (const auto& row : A)
    for (const Rat& q : row)
      if (q != 0) return false;
  return true;
}

}  // namespace detail_hodge

inline MonodromyLog monodromy_logarithm(const MonodromyMatrix& T) {
  detail_hodge::validate_rational_square(T.entries, "monodromy_logarithm");
  const size_t n = T.entries.size();

  RatMatrix M = T.entries;
  for (size_t i = 0; i < n; ++i) M[i][i] -= 1;

  RatMatrix power = M;
  for (size_t k = 1; k < n; ++k) power = detail_hodge::rat_mul(power, M);
  if (!detail_hodge::rat_is_zero(power))
    throw NotUnipotent("monodromy_logarithm: (T - I)^dim does not vanish");

  RatMatrix scaled(n, std::vector<Rat>(n, Rat(0)));
  power = detail_hodge::rat_identity(n);
  for (size_t k = 1; k < n; ++k) {
    power = detail_hodge::rat_mul(power, M);
    const Rat c = Rat(k % 2 == 1 ? 1 : -1) / Rat(static_cast<int>(k));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) scaled[i][j] += c * power[i][j];
  }
  return MonodromyLog{scaled};
}

// exp(2*pi*i*N) with the finite series; recovers the monodromy matrix.
inline MonodromyMatrix monodromy_exponential(const MonodromyLog& N) {
  detail_hodge::validate_rational_square(N.scaled, "monodromy_exponential");
  const size_t n = N.scaled.size();

  RatMatrix check = N.scaled;
  for (size_t k = 1; k < n; ++k) check = detail_hodge::rat_mul(check, N.scaled);
  if (!detail_hodge::rat_is_zero(check))
    throw NotUnipotent("monodromy_exponential: logarithm is not nilpotent");

  RatMatrix out = detail_hodge::rat_identity(n);
  RatMatrix power = detail_hodge::rat_identity(n);
  Rat factorial = 1;
  for (size_t k = 1; k < n; ++k) {
    power = detail_hodge::rat_mul(power, N.scaled);
    factorial *= static_cast<int>(k);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) out[i][j] += power[i][j] / factorial;
  }
  return MonodromyMatrix{out, ""};
}

// exp(-ln(t) * N) evaluated numerically; the factor that undoes the local
// monodromy twist of a period matrix as t approaches the boundary.
inline std::vector<std::vector<Complex>> unipotent_twist(const MonodromyLog& N, double t) {
  detail_hodge::validate_rational_square(N.scaled, "unipotent_twist");
  if (!(t > 0.0)) throw UsageError("unipotent_twist: t must be positive");
  const size_t n = N.scaled.size();
  const Complex z = -std::log(t) / kTwoPiI;

  std::vector<std::vector<Complex>> out(n, std::vector<Complex>(n, Complex(0.0, 0.0)));
  for (size_t i = 0; i < n; ++i) out[i][i] = Complex(1.0, 0.0);

  RatMatrix power = detail_hodge::rat_identity(n);
  Complex scalar{1.0, 0.0};
  Rat factorial = 1;
  for (size_t k = 1; k < n; ++k) {
    power = detail_hodge::rat_mul(power, N.scaled);
    scalar *= z;
    factorial *= static_cast<int>(k);
    const double inv_fact = 1.0 / rat_to_double(factorial);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        out[i][j] += scalar * inv_fact * rat_to_double(power[i][j]);
  }
  return out;
}

// Limit of P(t) * exp(-ln(t) * N) along a decreasing sequence of positive
// local coordinates.  Successive twisted matrices must approach each other;
// the returned matrix applies one Richardson step to the last two, which
// cancels the leading O(t) error on a geometric sequence.
inline PeriodMatrix limit_period_matrix(const std::function<PeriodMatrix(double)>& P_of_t,
                                        const MonodromyLog& N,
                                        const std::vector<double>& t_sequence,
                                        std::vector<double>* report = nullptr) {
  if (t_sequence.size() < 3)
    throw UsageError("limit_period_matrix: need at least three t values");
  for (size_t m = 0; m < t_sequence.size(); ++m) {
    if (!(t_sequence[m] > 0.0))
      throw UsageError("limit_period_matrix: t values must be positive");
    if (m > 0 && !(t_sequence[m] < t_sequence[m - 1]))
      throw UsageError("limit_period_matrix: t values must strictly decrease");
  }
  detail_hodge::validate_rational_square(N.scaled, "limit_period_matrix");
  {
    RatMatrix check = N.scaled;
    for (size_t k = 1; k < N.scaled.size(); ++k) check = detail_hodge::rat_mul(check, N.scaled);
    if (!detail_hodge::rat_is_zero(check))
      throw NotUnipotent("limit_period_matrix: logarithm is not nilpotent");
  }

  const size_t dim = N.scaled.size();
  std::vector<PeriodMatrix> twisted;
  for (double t : t_sequence) {
    PeriodMatrix P = P_of_t(t);
    if (P.entries.size() != dim)
      throw DimensionMismatch("limit_period_matrix: matrix size does not match the logarithm");
    for (const auto& row : P.entries)
      if (row.size() != dim)
        throw DimensionMismatch("limit_period_matrix: matrix size does not match the logarithm");
    const auto twist = unipotent_twist(N, t);
    PeriodMatrix M = P;
    for (size_t i = 0; i < dim; ++i)
      for (size_t j = 0; j < dim; ++j) {
        Complex s{0.0, 0.0};
        for (size_t k = 0; k < dim; ++k) s += P.entries[i][k] * twist[k][j];
        M.entries[i][j] = s;
      }
    twisted.push_back(std::move(M));
  }

  double scale = 0.0;
  for (const auto& row : twisted.back().entries)
    for (const Complex& v : row) scale = std::max(scale, std::abs(v));

  std::vector<double> diffs;
  for (size_t m = 1; m < twisted.size(); ++m) {
    double d = 0.0;
    for (size_t i = 0; i < dim; ++i)
      for (size_t j = 0; j < dim; ++j)
        d = std::max(d, std::abs(twisted[m].entries[i][j] - twisted[m - 1].entries[i][j]));
    diffs.push_back(d);
  }
  if (report) *report = diffs;
  for (size_t m = 1; m < diffs.size(); ++m)
    if (!(diffs[m] < diffs[m - 1] || diffs[m] <= 1e-14 * std::max(1.0, scale)))
      throw NonConvergent("limit_period_matrix: twisted matrices do not converge");

  const size_t last = twisted.size() - 1;
  const double r = t_sequence[last] / t_sequence[last - 1];
  const double w = r / (1.0 - r);
  PeriodMatrix out = twisted[last];
  for (size_t i = 0; i < dim; ++i)
    for (size_t j = 0; j < dim; ++j)
      out.entries[i][j] += w * (twisted[last].entries[i][j] - twisted[last - 1].entries[i][j]);
  return out;
}

// ---------------------------------------------------------------------------
// Mixed Hodge structure records for the two-parameter dlog family.
//
// The family over (a, b) carries a lattice spanned by the cycle columns of
// the period matrix together with a weight filtration on the lattice and a
// Hodge filtration on the ambient coordinates.  Degenerating first to a = 1
// and then to (a, b) = (1, 0) replaces the columns by limit-matrix columns
// while the filtration index sets stay fixed.

struct MHS {
  std::vector<std::string> generator_labels;
  std::vector<std::vector<Complex>> lattice;
  std::map<int, std::vector<size_t>> weight;
  std::map<int, std::vector<size_t>> hodge;
  Complex a{0.0, 0.0};
  Complex b{0.0, 0.0};
  std::vector<std::string> steps;
};

enum class LimitStep {
  kAEqualsOne,  // a -> 1 along d/da, b held
  kOrigin,      // then b -> 0 along -d/db
};

inline MonodromyMatrix dlog_monodromy_a_one() {
  MonodromyMatrix T;
  T.entries = detail_hodge::rat_identity(4);
  T.entries[2][0] = -1;
  T.loop = "counterclockwise around a = 1, based at real a > 1, passing below a = b";
  return T;
}

inline MonodromyMatrix dlog_monodromy_origin() {
  MonodromyMatrix T;
  T.entries = detail_hodge::rat_identity(4);
  T.entries[1][0] = 1;
  T.loop = "counterclockwise around b = 0 inside the a = 1 family, based at real b < 0";
  return T;
}

namespace detail_hodge {

inline std::vector<std::vector<Complex>> matrix_columns(const PeriodMatrix& P) {
  const size_t rows = P.entries.size();
  std::vector<std::vector<Complex>> cols;
  if (rows == 0) return cols;
  const size_t n = P.entries[0].size();
  cols.assign(n, std::vector<Complex>(rows));
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < n; ++j) cols[j][i] = P.entries[i][j];
  return cols;
}

inline std::map<int, std::vector<size_t>> dlog_weight_filtration() {
  return {{-5, {}}, {-4, {3}}, {-3, {3}}, {-2, {1, 2, 3}}, {-1, {1, 2, 3}}, {0, {0, 1, 2, 3}}};
}

inline std::map<int, std::vector<size_t>> dlog_hodge_filtration() {
  return {{-2, {0, 1, 2, 3}}, {-1, {0, 1, 2}}, {0, {0}}, {1, {}}};
}

inline std::vector<double> default_limit_sequence() {
  return {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
}

// The a = 1 fibre of the family written out directly: the column replacing
// the triangle cycle degenerates to dilogarithm values of b alone.
inline PeriodMatrix dlog_matrix_a_one(Complex b, const QuadratureConfig& cfg) {
  const Complex zero{0.0, 0.0};
  const Complex one{1.0, 0.0};
  const Complex li1_inv_b = -std::log(one - one / b);
  const Complex li1_b = -std::log(one - b);
  const Complex li2_val = li2(one / (one - b), principal_branch(), cfg);

  PeriodMatrix P;
  P.row_labels = {"omega_0", "omega_1", "omega_2", "omega_3"};
  P.col_labels = {"Gamma_0", "Gamma_1", "Gamma_2", "Gamma_3"};
  P.entries = {{one, zero, zero, zero},
               {li1_inv_b, kTwoPiI, zero, zero},
               {zero, zero, kTwoPiI, zero},
               {-li2_val, kTwoPiI * li1_b, zero, kTwoPiI * kTwoPiI}};
  return P;
}

}  // namespace detail_hodge

inline MHS build_vmhs(Complex a, Complex b, const BranchSpec& branch,
                      const QuadratureConfig& cfg = {}) {
  const PeriodMatrix P = period_matrix_dlog(a, b, branch, cfg);
  MHS out;
  out.generator_labels = P.col_labels;
  out.lattice = detail_hodge::matrix_columns(P);
  out.weight = detail_hodge::dlog_weight_filtration();
  out.hodge = detail_hodge::dlog_hodge_filtration();
  out.a = a;
  out.b = b;
  return out;
}

inline MHS build_vmhs(Complex a, Complex b, const QuadratureConfig& cfg = {}) {
  return build_vmhs(a, b, dlog_default_branch(a, b), cfg);
}

inline MHS limit_mhs(const MHS& vmhs, LimitStep step, const QuadratureConfig& cfg = {}) {
  const std::vector<double> ts = detail_hodge::default_limit_sequence();

  if (step == LimitStep::kAEqualsOne) {
    if (!vmhs.steps.empty())
      throw UsageError("limit_mhs: the a = 1 limit starts from the generic family");
    const Complex b = vmhs.b;
    const MonodromyLog N = monodromy_logarithm(dlog_monodromy_a_one());
    const PeriodMatrix L = limit_period_matrix(
        [b, &cfg](double t) { return period_matrix_dlog(Complex(1.0 + t, 0.0), b, cfg); }, N,
        ts);
    MHS out = vmhs;
    out.generator_labels = L.col_labels;
    out.lattice = detail_hodge::matrix_columns(L);
    out.a = Complex(1.0, 0.0);
    out.steps.push_back("a = 1 along d/da");
    return out;
  }

  if (vmhs.steps.size() != 1 || vmhs.steps[0] != "a = 1 along d/da")
    throw UsageError("limit_mhs: the origin limit follows the a = 1 limit");
  const MonodromyLog N = monodromy_logarithm(dlog_monodromy_origin());
  const PeriodMatrix L = limit_period_matrix(
      [&cfg](double t) { return detail_hodge::dlog_matrix_a_one(Complex(-t, 0.0), cfg); }, N,
      ts);
  MHS out = vmhs;
  out.generator_labels = L.col_labels;
  out.lattice = detail_hodge::matrix_columns(L);
  out.b = Complex(0.0, 0.0);
  out.steps.push_back("b = 0 along -d/db");
  return out;
}

}  // namespace periodlab
