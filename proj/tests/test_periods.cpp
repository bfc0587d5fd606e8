#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <periodlab/periods.hpp>

using namespace periodlab;

namespace {

struct Lcg {
  unsigned long long state;
  explicit Lcg(unsigned long long seed) : state(seed) {}
  unsigned long long next() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return state >> 17;
  }
  long pick(long lo, long hi) { return lo + static_cast<long>(next() % static_cast<unsigned long long>(hi - lo + 1)); }
  Rat rat() { return Rat(pick(-4, 4), pick(1, 3)); }
};

PuncturedLinePair pair_two(const Rat& a, const Rat& b) {
  PuncturedLinePair p;
  p.divisor_points = {a, b};
  return p;
}

PuncturedLinePair pair_three(const Rat& a, const Rat& b, const Rat& c) {
  PuncturedLinePair p;
  p.divisor_points = {a, b, c};
  return p;
}

RelativeOneForm random_element(Lcg& rng, size_t n_components) {
  RelativeOneForm w;
  const int terms = static_cast<int>(rng.pick(3, 6));
  for (int i = 0; i < terms; ++i) laurent_add(w.form, rng.pick(-4, 4), GaussRat(rng.rat()));
  for (size_t j = 0; j < n_components; ++j) w.divisor_constants.push_back(GaussRat(rng.rat()));
  return w;
}

}  // namespace

TEST_CASE("cycle basis of the standard pair", "[periods]") {
  const auto cycles = homology_cycles_punctured_line(pair_two(Rat(1), Rat(2)));
  REQUIRE(cycles.size() == 2);
  CHECK(cycles[0].label == "sigma");
  CHECK(cycles[1].label == "[1,2]");
  REQUIRE(cycles[0].pieces.size() == 1);
  REQUIRE(cycles[0].pieces[0].path.has_value());
  const Path& loop = *cycles[0].pieces[0].path;
  CHECK(std::abs(piece_start(loop.pieces[0]) - Complex(0.25, 0.0)) < 1e-14);
  REQUIRE(cycles[1].pieces.size() == 3);
  CHECK(cycles[1].pieces[1].component == "D1");
  CHECK(cycles[1].pieces[2].component == "D2");
  CHECK(cycles[1].pieces[2].weight == Rat(-1));
}

TEST_CASE("cycle basis of the degenerate pair", "[periods]") {
  const auto cycles = homology_cycles_punctured_line(pair_two(Rat(1), Rat(1)));
  REQUIRE(cycles.size() == 2);
  CHECK(cycles[1].label == "D1 - D2");
  CHECK_FALSE(cycles[1].pieces[0].path.has_value());
}

TEST_CASE("cycle basis rejects bad configurations", "[periods]") {
  CHECK_THROWS_AS(homology_cycles_punctured_line(pair_two(Rat(2), Rat(1))),
                  UnsupportedConfiguration);
  CHECK_THROWS_AS(homology_cycles_punctured_line(pair_two(Rat(-1), Rat(1))),
                  UnsupportedConfiguration);
  CHECK_THROWS_AS(homology_cycles_punctured_line(pair_two(Rat(1), Rat(2)), 5.0),
                  UnsupportedConfiguration);
  PuncturedLinePair bad;
  bad.divisor_points = {Rat(0), Rat(1)};
  CHECK_THROWS_AS(homology_cycles_punctured_line(bad), InvalidPair);
}

TEST_CASE("period matrix of the standard pair", "[periods]") {
  const PeriodMatrix P = period_matrix_punctured_line(pair_two(Rat(1), Rat(2)));
  CHECK(std::abs(matrix_entry(P, "dt", "[1,2]") - Complex(1.0, 0.0)) < 1e-10);
  CHECK(std::abs(matrix_entry(P, "dt", "sigma")) < 1e-10);
  CHECK(std::abs(matrix_entry(P, "dt/t", "[1,2]") - Complex(std::log(2.0), 0.0)) < 1e-10);
  CHECK(std::abs(matrix_entry(P, "dt/t", "sigma") - kTwoPiI) < 1e-10);
  CHECK_THROWS_AS(matrix_entry(P, "dt/t", "nope"), UsageError);
}

TEST_CASE("period matrix with a scaled interval form", "[periods]") {
  const PeriodMatrix P = period_matrix_punctured_line(pair_two(Rat(1), Rat(3)));
  CHECK(std::abs(matrix_entry(P, "(1/2) dt", "[1,3]") - Complex(1.0, 0.0)) < 1e-10);
  CHECK(std::abs(matrix_entry(P, "dt/t", "[1,3]") - Complex(std::log(3.0), 0.0)) < 1e-10);
}

TEST_CASE("period matrix of the degenerate pair", "[periods]") {
  const PeriodMatrix P = period_matrix_punctured_line(pair_two(Rat(1), Rat(1)));
  CHECK(std::abs(matrix_entry(P, "1_{D1} + 0_{D2}", "D1 - D2") - Complex(1.0, 0.0)) < 1e-10);
  CHECK(std::abs(matrix_entry(P, "dt/t", "sigma") - kTwoPiI) < 1e-10);
  CHECK(std::abs(matrix_entry(P, "dt/t", "D1 - D2")) < 1e-10);
  CHECK(std::abs(matrix_entry(P, "1_{D1} + 0_{D2}", "sigma")) < 1e-10);
}

TEST_CASE("three point determinant", "[periods]") {
  const PeriodMatrix P = period_matrix_punctured_line(pair_three(Rat(1), Rat(2), Rat(3)));
  const Complex det = matrix_det(P);
  CHECK(std::abs(det - Complex(0.0, 4.0 * kPi)) < 1e-8);
  CHECK(det_shape_check(P, 1) == Rat(4));
}

TEST_CASE("loop radius does not change the matrix", "[periods]") {
  for (const auto& pair :
       {pair_two(Rat(1), Rat(2)), pair_two(Rat(1), Rat(1)), pair_three(Rat(1), Rat(2), Rat(3))}) {
    const PeriodMatrix a = period_matrix_punctured_line(pair);
    const PeriodMatrix b = period_matrix_punctured_line(pair, {}, 0.1);
    REQUIRE(a.row_labels == b.row_labels);
    for (size_t i = 0; i < a.entries.size(); ++i)
      for (size_t j = 0; j < a.entries[i].size(); ++j)
        CHECK(std::abs(a.entries[i][j] - b.entries[i][j]) < 2e-11);
    CHECK(std::abs(matrix_det(a)) > 1e-10);
  }
}

TEST_CASE("pairing a reduced class matches the coordinate combination", "[periods]") {
  Lcg rng(2024);
  // Random Laurent terms reach t^-4, which is ~3e2 on the default loop. The
  // roundoff floor of such an integral sits above the default 1e-11 target,
  // so the pairing runs at the tolerance this comparison needs.
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-9;
  cfg.rel_tol = 1e-9;
  for (const auto& pair :
       {pair_two(Rat(1), Rat(2)), pair_two(Rat(2), Rat(2)), pair_three(Rat(1), Rat(2), Rat(4))}) {
    const PeriodMatrix P = period_matrix_punctured_line(pair, cfg);
    const auto cycles = homology_cycles_punctured_line(pair);
    for (int trial = 0; trial < 8; ++trial) {
      const RelativeOneForm w = random_element(rng, pair.divisor_points.size());
      const ReducedClass rc = reduce_punctured_line(pair, w);
      for (const Cycle& cycle : cycles) {
        const Complex direct = pair_cycle_with_element(cycle, w, pair, cfg);
        Complex combo(0.0, 0.0);
        double scale = 1.0;
        for (size_t i = 0; i < rc.coordinates.size(); ++i) {
          const Complex term =
              rc.coordinates[i].to_complex() * matrix_entry(P, rc.basis.labels[i], cycle.label);
          combo += term;
          scale += std::abs(term);
        }
        CHECK(std::abs(direct - combo) < 1e-8 * scale);
      }
    }
  }
}

TEST_CASE("oval periods of quadrics", "[periods]") {
  CHECK(std::abs(period_quadric(QuadricRing{Rat(1), Rat(1)}) - Complex(kPi, 0.0)) < 1e-8);
  CHECK(std::abs(period_quadric(QuadricRing{Rat(2), Rat(3)}) - Complex(kPi / std::sqrt(6.0), 0.0)) <
        1e-8);
  CHECK(std::abs(period_quadric(QuadricRing{Rat(4), Rat(1)}) - Complex(kPi / 2.0, 0.0)) < 1e-8);
}

TEST_CASE("quadric determinant shape", "[periods]") {
  PeriodMatrix Q;
  Q.row_labels = {"y dx"};
  Q.col_labels = {"sigma"};
  Q.entries = {{period_quadric(QuadricRing{Rat(2), Rat(3)})}};
  CHECK(det_shape_check(Q, 1) == Rat(-1, 24));
  Q.entries = {{period_quadric(QuadricRing{Rat(1), Rat(1)})}};
  CHECK(det_shape_check(Q, 1) == Rat(-1, 4));
}

TEST_CASE("quadric period rejects bad rings", "[periods]") {
  CHECK_THROWS_AS(period_quadric(QuadricRing{Rat(-1), Rat(2)}), UnsupportedConfiguration);
  CHECK_THROWS_AS(period_quadric(QuadricRing{Rat(0), Rat(2)}), InvalidPair);
}

TEST_CASE("dilogarithm family matrix at a real point", "[periods][dlog]") {
  const Complex a(3.0, 0.0), b(2.0, 0.0);
  const PeriodMatrix P = period_matrix_dlog(a, b);
  REQUIRE(P.row_labels.size() == 4);

  CHECK(std::abs(P.entries[0][0] - Complex(1.0, 0.0)) < 1e-12);
  const std::vector<std::pair<size_t, size_t>> zeros{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  for (const auto [i, j] : zeros) CHECK(std::abs(P.entries[i][j]) < 1e-10);
  CHECK(std::abs(P.entries[1][1] - kTwoPiI) < 1e-12);
  CHECK(std::abs(P.entries[2][2] - kTwoPiI) < 1e-12);

  CHECK(std::abs(P.entries[1][0] - Complex(std::log(2.0), 0.0)) < 1e-9);
  CHECK(std::abs(P.entries[2][0] - Complex(std::log(1.5), 0.0)) < 1e-9);

  const Complex li11_series =
      li_series(IndexWord{{1, 1}}, {Complex(2.0 / 3.0, 0.0), Complex(0.5, 0.0)}, 1e-14);
  CHECK(std::abs(P.entries[3][0] - li11_series) < 1e-7);
  CHECK(std::abs(P.entries[3][0] - Complex(0.14722067695924126, 0.0)) < 1e-7);

  CHECK(std::abs(P.entries[3][1] - kTwoPiI * Complex(std::log(3.0), 0.0)) < 1e-9);
  CHECK(std::abs(P.entries[3][2] - Complex(-2.0 * kPi * kPi, 0.0)) < 1e-10);
  CHECK(std::abs(P.entries[3][3] - kTwoPiI * kTwoPiI) < 1e-8);

  CHECK(det_shape_check(P, 4) == Rat(1));
}

TEST_CASE("dilogarithm family rejects degenerate parameters", "[periods][dlog]") {
  CHECK_THROWS_AS(period_matrix_dlog(Complex(1.0, 0.0), Complex(2.0, 0.0)), OnSingularDivisor);
  CHECK_THROWS_AS(period_matrix_dlog(Complex(3.0, 0.0), Complex(3.0, 0.0)), OnSingularDivisor);
  CHECK_THROWS_AS(period_matrix_dlog(Complex(3.0, 0.0), Complex(0.0, 0.0)), OnSingularDivisor);
}

TEST_CASE("default branch detours over interior letters", "[periods][dlog]") {
  const Complex a(0.5, 0.0), b(-2.0, 0.0);
  const BranchSpec branch = dlog_default_branch(a, b);
  CHECK(branch.base_path.pieces.size() > 1);
  const PeriodMatrix P = period_matrix_dlog(a, b);
  CHECK(std::abs(P.entries[2][0] - Complex(0.0, kPi)) < 1e-9);
  CHECK(std::abs(P.entries[1][0] - Complex(-std::log(1.5), 0.0)) < 1e-9);
}

TEST_CASE("rational recognition", "[periods]") {
  CHECK(recognize_rational(0.5) == Rat(1, 2));
  CHECK(recognize_rational(-1.0 / 24.0 + 1e-9) == Rat(-1, 24));
  CHECK(recognize_rational(355.0 / 113.0) == Rat(355, 113));
  // Continued fractions find the classical approximation, so failure needs a
  // denominator cap tighter than the next convergent.
  CHECK(recognize_rational(kPi) == Rat(355, 113));
  CHECK_THROWS_AS(recognize_rational(kPi, 1e-6, 50), RecognitionFailed);
  PeriodMatrix M;
  M.row_labels = {"r"};
  M.col_labels = {"c"};
  M.entries = {{Complex(std::sqrt(2.0), 0.0) * kTwoPiI}};
  CHECK(det_shape_check(M, 1) == Rat(2));
  M.entries = {{Complex(1.0, 1.0)}};
  CHECK_THROWS_AS(det_shape_check(M, 0), RecognitionFailed);
}

TEST_CASE("matrix helpers validate shape", "[periods]") {
  PeriodMatrix M;
  M.row_labels = {"r1", "r2"};
  M.col_labels = {"c"};
  M.entries = {{Complex(1.0, 0.0)}, {Complex(2.0, 0.0)}};
  CHECK_THROWS_AS(matrix_det(M), DimensionMismatch);
}
