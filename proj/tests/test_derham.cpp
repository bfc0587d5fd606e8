#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <map>
#include <vector>

#include <periodlab/derham.hpp>
#include <periodlab/numerics.hpp>

using namespace periodlab;

namespace {

struct Lcg {
  std::uint64_t state;
  double next() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) * 0x1p-53;
  }
  long pick(long lo, long hi) { return lo + static_cast<long>(next() * static_cast<double>(hi - lo + 1)); }
  Rat rat() {
    const long num = pick(-9, 9);
    const long den = pick(1, 4);
    return Rat(num) / Rat(den);
  }
};

PuncturedLinePair two_point(const Rat& alpha) { return {{Rat(0)}, {Rat(1), alpha}}; }

// Membership of a pure Laurent form in the span of the exactness relations
// d(t^n (t-1)(t-alpha)), |n| <= 6, decided by rational Gaussian elimination
// on a dense exponent window. Independent of the reduction sweep.
bool in_relation_span(const Rat& alpha, const std::map<long, Rat>& form) {
  const long lo = -7;
  const int width = 15;
  std::vector<std::vector<Rat>> rows;
  for (long n = -6; n <= 6; ++n) {
    std::vector<Rat> r(width, Rat(0));
    r[static_cast<size_t>((n + 1) - lo)] += Rat(n + 2);
    r[static_cast<size_t>(n - lo)] -= Rat(n + 1) * (alpha + 1);
    r[static_cast<size_t>((n - 1) - lo)] += Rat(n) * alpha;
    rows.push_back(std::move(r));
  }
  std::vector<Rat> v(width, Rat(0));
  for (const auto& [e, c] : form) {
    REQUIRE(e >= lo);
    REQUIRE(e <= 7);
    v[static_cast<size_t>(e - lo)] = c;
  }
  size_t used = 0;
  for (int col = width - 1; col >= 0; --col) {
    size_t pivot = rows.size();
    for (size_t r = used; r < rows.size(); ++r)
      if (rows[r][static_cast<size_t>(col)] != 0) {
        pivot = r;
        break;
      }
    if (pivot == rows.size()) continue;
    std::swap(rows[used], rows[pivot]);
    for (size_t r = used + 1; r < rows.size(); ++r)
      if (rows[r][static_cast<size_t>(col)] != 0) {
        const Rat f = rows[r][static_cast<size_t>(col)] / rows[used][static_cast<size_t>(col)];
        for (int j = 0; j < width; ++j)
          rows[r][static_cast<size_t>(j)] -= f * rows[used][static_cast<size_t>(j)];
      }
    if (v[static_cast<size_t>(col)] != 0) {
      const Rat f = v[static_cast<size_t>(col)] / rows[used][static_cast<size_t>(col)];
      for (int j = 0; j < width; ++j) v[static_cast<size_t>(j)] -= f * rows[used][static_cast<size_t>(j)];
    }
    ++used;
  }
  for (const Rat& c : v)
    if (c != 0) return false;
  return true;
}

LaurentPoly random_laurent(Lcg& rng) {
  LaurentPoly f;
  const long terms = rng.pick(4, 7);
  for (long i = 0; i < terms; ++i) laurent_add(f, rng.pick(-6, 6), GaussRat(rng.rat()));
  return f;
}

QuadricPoly random_quadric_poly(Lcg& rng) {
  QuadricPoly f;
  const long terms = rng.pick(4, 7);
  for (long i = 0; i < terms; ++i) quadric_add(f, rng.pick(0, 6), rng.pick(0, 6), GaussRat(rng.rat()));
  return f;
}

bool coords_zero(const ReducedClass& rc) {
  for (const auto& c : rc.coordinates)
    if (!c.is_zero()) return false;
  return true;
}

RelativeOneForm scaled_sum(const Rat& q1, const RelativeOneForm& w1, const Rat& q2,
                           const RelativeOneForm& w2) {
  RelativeOneForm out;
  const GaussRat g1(q1), g2(q2);
  for (const auto& [e, c] : w1.form.coeff) laurent_add(out.form, e, g1 * c);
  for (const auto& [e, c] : w2.form.coeff) laurent_add(out.form, e, g2 * c);
  for (size_t j = 0; j < w1.divisor_constants.size(); ++j)
    out.divisor_constants.push_back(g1 * w1.divisor_constants[j] + g2 * w2.divisor_constants[j]);
  return out;
}

// Period of a polynomial form over the real oval of 2x^2 + 3y^2 = 1,
// parameterized by angle; cross-checks the symbolic reduction numerically.
Complex oval_period(const QuadricForm& form) {
  const double a = 2.0, b = 3.0;
  const QuadratureConfig cfg{};
  return integrate_interval(
      [&](double th) {
        const double x = std::cos(th) / std::sqrt(a);
        const double y = std::sin(th) / std::sqrt(b);
        const double dx = -std::sin(th) / std::sqrt(a);
        const double dy = std::cos(th) / std::sqrt(b);
        Complex total{0.0, 0.0};
        for (const auto& [nm, c] : form.dx)
          total += c.to_complex() * std::pow(x, static_cast<double>(nm.first)) *
                   std::pow(y, static_cast<double>(nm.second)) * dx;
        for (const auto& [nm, c] : form.dy)
          total += c.to_complex() * std::pow(x, static_cast<double>(nm.first)) *
                   std::pow(y, static_cast<double>(nm.second)) * dy;
        return total;
      },
      0.0, kTwoPi, cfg);
}

}  // namespace

TEST_CASE("pair bases across the three configurations", "[derham]") {
  const CohomologyBasis b2 = basis_punctured_line(two_point(Rat(2)));
  REQUIRE(b2.labels == std::vector<std::string>{"dt/t", "dt"});
  const CohomologyBasis b3 = basis_punctured_line(two_point(Rat(3)));
  REQUIRE(b3.labels == std::vector<std::string>{"dt/t", "(1/2) dt"});
  const CohomologyBasis bd = basis_punctured_line({{Rat(0)}, {Rat(1), Rat(1)}});
  REQUIRE(bd.labels == std::vector<std::string>{"dt/t", "1_{D1} + 0_{D2}"});
  const CohomologyBasis bt = basis_punctured_line({{Rat(0)}, {Rat(1), Rat(2), Rat(3)}});
  REQUIRE(bt.labels == std::vector<std::string>{"dt/t", "dt", "2t dt"});
  REQUIRE(basis_quadric({Rat(5), Rat(3)}).labels == std::vector<std::string>{"y dx"});
}

TEST_CASE("reducing t dt against the relation span oracle", "[derham]") {
  RelativeOneForm el;
  laurent_add(el.form, 1, GaussRat(1));
  el.divisor_constants = {GaussRat(0), GaussRat(0)};
  const ReducedClass rc = reduce_punctured_line(two_point(Rat(2)), el);
  REQUIRE(rc.coordinates.size() == 2);
  CHECK(rc.coordinates[0] == GaussRat(0));
  CHECK(rc.coordinates[1] == GaussRat(Rat(3) / Rat(2)));

  CHECK(in_relation_span(Rat(2), {{1, Rat(1)}, {0, Rat(-3) / Rat(2)}}));
  CHECK_FALSE(in_relation_span(Rat(2), {{1, Rat(1)}}));
  CHECK_FALSE(in_relation_span(Rat(2), {{-1, Rat(1)}}));
}

TEST_CASE("relation span oracle agrees with the sweep on kernel elements", "[derham]") {
  Lcg rng{411};
  const Rat alpha(3);
  for (int trial = 0; trial < 5; ++trial) {
    LaurentPoly g;
    for (long i = 0; i < 3; ++i) laurent_add(g, rng.pick(-5, 3), GaussRat(rng.rat()));
    g = laurent_mul_linear(laurent_mul_linear(g, Rat(1)), alpha);
    const LaurentPoly dg = laurent_derivative(g);
    std::map<long, Rat> dense;
    for (const auto& [e, c] : dg.coeff) dense[e] = c.re;
    CHECK(in_relation_span(alpha, dense));
    RelativeOneForm el{dg, {GaussRat(0), GaussRat(0)}};
    CHECK(coords_zero(reduce_punctured_line(two_point(alpha), el)));
  }
}

TEST_CASE("differentials reduce to zero in every pair configuration", "[derham]") {
  Lcg rng{5150};
  const PuncturedLinePair pairs[] = {two_point(Rat(2)),
                                     two_point(Rat(-5) / Rat(3)),
                                     {{Rat(0)}, {Rat(1), Rat(1)}},
                                     {{Rat(0)}, {Rat(3), Rat(3)}},
                                     {{Rat(0)}, {Rat(1), Rat(2), Rat(3)}},
                                     {{Rat(0)}, {Rat(1), Rat(-2), Rat(7) / Rat(2)}}};
  for (const auto& pair : pairs)
    for (int trial = 0; trial < 50; ++trial) {
      const LaurentPoly f = random_laurent(rng);
      CHECK(coords_zero(reduce_punctured_line(pair, pair_differential(pair, f))));
    }
}

TEST_CASE("quadric differentials reduce to zero", "[derham]") {
  Lcg rng{909};
  const QuadricRing ring{Rat(5), Rat(-3) / Rat(2)};
  for (int trial = 0; trial < 50; ++trial) {
    const QuadricPoly f = random_quadric_poly(rng);
    const ReducedClass rc = reduce_quadric(ring, quadric_differential(f));
    CHECK(rc.coordinates[0] == GaussRat(0));
  }
}

TEST_CASE("exact element with divisor constants", "[derham]") {
  LaurentPoly f;
  laurent_add(f, 3, GaussRat(1));
  laurent_add(f, -2, GaussRat(-5));
  const PuncturedLinePair pair = two_point(Rat(2));
  CHECK(coords_zero(reduce_punctured_line(pair, pair_differential(pair, f))));
}

TEST_CASE("reduction is linear", "[derham]") {
  Lcg rng{223};
  const PuncturedLinePair pair{{Rat(0)}, {Rat(1), Rat(2), Rat(3)}};
  const Rat q1 = Rat(3) / Rat(2), q2 = Rat(-7) / Rat(3);
  for (int trial = 0; trial < 10; ++trial) {
    RelativeOneForm w1{random_laurent(rng), {GaussRat(rng.rat()), GaussRat(rng.rat()), GaussRat(rng.rat())}};
    RelativeOneForm w2{random_laurent(rng), {GaussRat(rng.rat()), GaussRat(rng.rat()), GaussRat(rng.rat())}};
    const ReducedClass r1 = reduce_punctured_line(pair, w1);
    const ReducedClass r2 = reduce_punctured_line(pair, w2);
    const ReducedClass rs = reduce_punctured_line(pair, scaled_sum(q1, w1, q2, w2));
    for (size_t j = 0; j < rs.coordinates.size(); ++j)
      CHECK(rs.coordinates[j] == GaussRat(q1) * r1.coordinates[j] + GaussRat(q2) * r2.coordinates[j]);
  }
}

TEST_CASE("basis elements reduce to unit coordinates", "[derham]") {
  const PuncturedLinePair p2 = two_point(Rat(3));
  RelativeOneForm logform;
  laurent_add(logform.form, -1, GaussRat(1));
  logform.divisor_constants = {GaussRat(0), GaussRat(0)};
  CHECK(reduce_punctured_line(p2, logform).coordinates ==
        std::vector<GaussRat>{GaussRat(1), GaussRat(0)});
  RelativeOneForm scaled;
  laurent_add(scaled.form, 0, GaussRat(Rat(1) / Rat(2)));
  scaled.divisor_constants = {GaussRat(0), GaussRat(0)};
  CHECK(reduce_punctured_line(p2, scaled).coordinates ==
        std::vector<GaussRat>{GaussRat(0), GaussRat(1)});

  const PuncturedLinePair pd{{Rat(0)}, {Rat(1), Rat(1)}};
  RelativeOneForm pairel;
  pairel.divisor_constants = {GaussRat(1), GaussRat(0)};
  CHECK(reduce_punctured_line(pd, pairel).coordinates ==
        std::vector<GaussRat>{GaussRat(0), GaussRat(1)});

  const PuncturedLinePair p3{{Rat(0)}, {Rat(1), Rat(2), Rat(3)}};
  RelativeOneForm doubled;
  laurent_add(doubled.form, 1, GaussRat(2));
  doubled.divisor_constants = {GaussRat(0), GaussRat(0), GaussRat(0)};
  CHECK(reduce_punctured_line(p3, doubled).coordinates ==
        std::vector<GaussRat>{GaussRat(0), GaussRat(0), GaussRat(1)});

  QuadricForm ydx;
  quadric_add(ydx.dx, 0, 1, GaussRat(1));
  CHECK(reduce_quadric({Rat(2), Rat(3)}, ydx).coordinates == std::vector<GaussRat>{GaussRat(1)});
}

TEST_CASE("quadric relation examples", "[derham]") {
  const QuadricRing ring{Rat(5), Rat(3)};
  QuadricForm x2ydx;
  quadric_add(x2ydx.dx, 2, 1, GaussRat(1));
  CHECK(reduce_quadric(ring, x2ydx).coordinates ==
        std::vector<GaussRat>{GaussRat(Rat(1) / Rat(20))});

  QuadricForm ymdy;
  quadric_add(ymdy.dy, 0, 4, GaussRat(1));
  CHECK(reduce_quadric(ring, ymdy).coordinates == std::vector<GaussRat>{GaussRat(0)});

  QuadricForm xydx;
  quadric_add(xydx.dx, 1, 1, GaussRat(1));
  CHECK(reduce_quadric(ring, xydx).coordinates == std::vector<GaussRat>{GaussRat(0)});

  QuadricForm x3ydx;
  quadric_add(x3ydx.dx, 3, 1, GaussRat(1));
  CHECK(reduce_quadric(ring, x3ydx).coordinates == std::vector<GaussRat>{GaussRat(0)});
}

TEST_CASE("quadric reduction matches periods over the real oval", "[derham]") {
  const QuadricRing ring{Rat(2), Rat(3)};
  QuadricForm ydx;
  quadric_add(ydx.dx, 0, 1, GaussRat(1));
  const Complex base = oval_period(ydx);
  CHECK(std::abs(base - Complex(-kPi / std::sqrt(6.0), 0.0)) < 1e-10);

  Lcg rng{31337};
  for (int trial = 0; trial < 10; ++trial) {
    QuadricForm form;
    const long terms = rng.pick(2, 4);
    for (long i = 0; i < terms; ++i) {
      if (rng.next() < 0.5)
        quadric_add(form.dx, rng.pick(0, 4), rng.pick(0, 4), GaussRat(rng.rat()));
      else
        quadric_add(form.dy, rng.pick(0, 4), rng.pick(0, 4), GaussRat(rng.rat()));
    }
    const ReducedClass rc = reduce_quadric(ring, form);
    const Complex lhs = oval_period(form);
    const Complex rhs = rc.coordinates[0].to_complex() * base;
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("pair validation", "[derham]") {
  CHECK_THROWS_AS(basis_punctured_line({{Rat(1)}, {Rat(1), Rat(2)}}), InvalidPair);
  CHECK_THROWS_AS(basis_punctured_line({{Rat(0), Rat(5)}, {Rat(1), Rat(2)}}), InvalidPair);
  CHECK_THROWS_AS(basis_punctured_line({{Rat(0)}, {Rat(0), Rat(2)}}), InvalidPair);
  CHECK_THROWS_AS(basis_punctured_line({{Rat(0)}, {Rat(1)}}), InvalidPair);
  CHECK_THROWS_AS(basis_punctured_line({{Rat(0)}, {Rat(1), Rat(2), Rat(3), Rat(4)}}), InvalidPair);
  CHECK_THROWS_AS(basis_punctured_line({{Rat(0)}, {Rat(1), Rat(2), Rat(2)}}), InvalidPair);
  CHECK_THROWS_AS(basis_quadric({Rat(0), Rat(1)}), InvalidPair);
}

TEST_CASE("element validation", "[derham]") {
  RelativeOneForm el;
  laurent_add(el.form, 0, GaussRat(1));
  el.divisor_constants = {GaussRat(0)};
  CHECK_THROWS_AS(reduce_punctured_line(two_point(Rat(2)), el), InvalidElement);

  QuadricForm bad;
  bad.dx.emplace(std::make_pair(-1L, 0L), GaussRat(1));
  CHECK_THROWS_AS(reduce_quadric({Rat(1), Rat(1)}, bad), InvalidElement);
  QuadricPoly badf;
  badf.emplace(std::make_pair(0L, -2L), GaussRat(1));
  CHECK_THROWS_AS(quadric_differential(badf), InvalidElement);
}
