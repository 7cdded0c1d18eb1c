#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hml/errors.hpp"
#include "hml/moments.hpp"
#include "hml/numeric.hpp"

using namespace hml;

namespace {

struct Spectral {
  EigenBasis basis;
  HarmonicWeights weights;
};

const Spectral& spectral(int k, std::size_t N) {
  static std::vector<std::pair<std::pair<int, std::size_t>, Spectral>> store;
  for (const auto& [key, s] : store)
    if (key.first == k && key.second == N) return s;
  Spectral s;
  s.basis = eigenforms(k, N);
  s.weights = recover_weights(s.basis);
  store.emplace_back(std::make_pair(k, N), std::move(s));
  return store.back().second;
}

double count_half_open(double x) { return std::floor(2.0 * x) - std::floor(x); }

}  // namespace

TEST_CASE("transition shape L") {
  CHECK(L_func(0.0) == 0.0);
  CHECK(L_func(1.0) == 0.0);
  CHECK(L_func(std::sqrt(2.0)) == doctest::Approx(0.3465735903).epsilon(1e-10));
  CHECK(L_func(2.0) == 0.0);
  CHECK(L_func(3.0) == 0.0);
  CHECK_THROWS_AS(L_func(-0.1), DomainError);
  double prev = 0.0, peak = 0.0;
  for (int i = 1; i <= 30000; ++i) {
    const double v = L_func(i * 1e-4);
    CHECK(v >= 0.0);
    CHECK(std::fabs(v - prev) < 1e-4);
    peak = std::max(peak, v);
    prev = v;
  }
  CHECK(peak <= std::log(std::sqrt(2.0)) + 1e-15);
}

TEST_CASE("regime labels are ordered along x") {
  for (int k : {60, 100, 120, 160}) {
    int last = 0;
    for (double x = 0.01; x < 2.0 * k * k; x *= 1.01) {
      const int r = static_cast<int>(moment_regime(k, x));
      CHECK(r >= last);
      last = r;
    }
    CHECK(moment_regime(k, k / (16.0 * pi)) == MomentRegime::below_first_transition);
    CHECK(moment_regime(k, k / (6.0 * pi)) == MomentRegime::first_transition);
    CHECK(moment_regime(k, k * k / (24.0 * pi * pi)) == MomentRegime::second_transition);
    CHECK(moment_regime(k, k * k / (8.0 * pi * pi)) == MomentRegime::above_second_transition);
  }
  CHECK(regime_name(MomentRegime::mid) == "mid");
}

TEST_CASE("first moment") {
  const auto& s = spectral(100, 130);
  CHECK(first_moment(0.0, s.basis, s.weights) == 0.0);
  CHECK(first_moment(0.4, s.basis, s.weights) == 0.0);
  CHECK_THROWS_AS(first_moment(66.0, s.basis, s.weights), TableError);

  // Measured at the upper end of the vanishing range; 4 pi sqrt(2x) is already at
  // the Bessel turning point, so this is not small at k = 100.
  const double x1 = std::floor(1e4 / (32.0 * pi * pi + 1.0));
  CHECK(x1 == 31.0);
  CHECK(first_moment(x1, s.basis, s.weights) == doctest::Approx(2.791).epsilon(1e-3));
  CHECK(std::fabs(first_moment(20.0, s.basis, s.weights)) < 1e-3);

  const double lo = 1e4 / (32.0 * pi * pi - 1.0), hi = 1e4 / (16.0 * pi * pi + 1.0);
  const double main = 100.0 / (4.0 * pi);
  for (int i = 0; i <= 6; ++i) {
    const double x = lo + (hi - lo) * i / 6.0;
    const double m = first_moment(x, s.basis, s.weights);
    CHECK(m > 0.0);
    CHECK(m <= 3.0 * main);
    CHECK(m >= main / 3.0);
    CHECK(std::fabs(m - voronoi_main_term(100, x)) <= 10.0 * std::sqrt(x) * std::pow(100.0, -0.9));
  }
}

TEST_CASE("voronoi main term") {
  for (double x : {16.0, 25.0, 31.0, 40.0, 60.0}) {
    const double closed =
        (integral_y_bessel(99, 4.0 * pi * std::sqrt(2.0 * x)) - integral_y_bessel(99, 4.0 * pi * std::sqrt(x))) /
        (4.0 * pi);
    CHECK(voronoi_main_term(100, x) == doctest::Approx(closed).epsilon(1e-12));
  }
  CHECK(std::fabs(voronoi_main_term(100, 16.0)) < 1e-3);
  CHECK(voronoi_main_term(102, 60.0) < 0.0);
  CHECK_THROWS_AS(voronoi_main_term(100, 15.0), DomainError);
  CHECK_THROWS_AS(voronoi_main_term(10, 1e5), DomainError);
}

TEST_CASE("second moment") {
  const int k = 120;
  const auto& s = spectral(k, 60);
  for (double x = 0.0; x <= 29.0; x += 0.25) CHECK(second_moment(x, s.basis, s.weights) >= 0.0);

  // Exact count while 4 pi floor(2x) stays below 0.9 k.
  for (double x = 0.5; 4.0 * pi * std::floor(2.0 * x) <= 0.9 * k; x += 0.1)
    CHECK(std::fabs(second_moment(x, s.basis, s.weights) - count_half_open(x)) <= 1e-3);
  // n = 9 puts 4 pi n = 113 inside the Bessel transition of J_119.
  CHECK(second_moment(4.6, s.basis, s.weights) - 5.0 == doctest::Approx(0.124676).epsilon(1e-5));

  for (double x = 1.0; x < k / (8.0 * pi); x += 0.25)
    CHECK(std::fabs(second_moment(x, s.basis, s.weights) - x) <= 0.5 * x);

  const double x = k / (4.0 * pi * std::sqrt(2.0));
  const double secondary = L_func(std::sqrt(2.0)) * k / (2.0 * pi);
  const double dev = second_moment(x, s.basis, s.weights) - x;
  CHECK(dev > 0.0);
  CHECK(dev <= 3.0 * secondary);
  CHECK(dev >= secondary / 3.0);
}

TEST_CASE("smoothed decomposition identity") {
  const int k = 120;
  const auto& s = spectral(k, 60);
  for (double delta : {4.0, 10.0})
    for (double x : {2.5, 6.752, 9.0, 14.0, 19.0}) {
      const OffDiagonal od = offdiag_direct(k, x, delta);
      const double lhs = smoothed_second_moment(x, delta, s.basis, s.weights);
      const double rhs = window_diagonal(x, delta) + od.value;
      CHECK(std::fabs(lhs - rhs) <= od.tail_bound + od.rounding_bound + 1e-12 * std::fabs(lhs));
      CHECK(od.c_max >= std::ceil(32.0 * pi * x / k));
    }
}

TEST_CASE("off-diagonal term") {
  const int k = 120;
  for (double x : {0.5, 1.0, 1.19})
    CHECK(std::fabs(offdiag_direct(k, x, 10.0).value) <= 1e-3);
  const OffDiagonal od = offdiag_direct(k, k / (4.0 * pi * std::sqrt(2.0)), 10.0);
  const double secondary = L_func(std::sqrt(2.0)) * k / (2.0 * pi);
  CHECK(od.value >= secondary / 2.0);
  CHECK(od.value <= 2.0 * secondary);
  CHECK(window_diagonal(2.5, 10.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(offdiag_direct(k, 30.0, 10.0, 0, 100), ResourceError);
  CHECK_THROWS_AS(offdiag_direct(k, 2000.0, 10.0), DomainError);
}

TEST_CASE("main term integral") {
  double last = 1.0;
  for (int k : {100, 1000, 10000}) {
    const MaintermCheck c = mainterm_integral_check(k, k / (4.0 * pi * std::sqrt(2.0)));
    CHECK(c.rhs == doctest::Approx(std::log(std::sqrt(2.0)) * k).epsilon(1e-12));
    CHECK(std::fabs(c.residual) <= 3.0 * (c.envelope_78 + c.envelope_23));
    const double rel = std::fabs(c.residual) / k;
    CHECK(rel < last);
    last = rel;
    const MaintermCheck out = mainterm_integral_check(k, k / (12.0 * pi));
    CHECK(out.rhs == 0.0);
    CHECK(std::fabs(out.lhs) <= 3.0 * out.envelope_23);
  }
  CHECK(last < 1e-3);
}

TEST_CASE("diagonal dual sum") {
  const DiagtermsCheck d25 = diagterms_check(100, 25.0, 100.0);
  CHECK(d25.residual <= 10.0 * (0.25 + std::pow(25.0, 1.5) * std::pow(std::log(100.0), 3) / 100.0));
  CHECK(d25.residual <= d25.envelope);
  CHECK(d25.lhs == doctest::Approx(11.7400953110).epsilon(1e-8));

  const DiagtermsCheck d2 = diagterms_check(100, 2.0, 100.0);
  CHECK(d2.residual <= d2.envelope);
  CHECK(d2.lhs == doctest::Approx(2.0).epsilon(0.05));

  QuadOptions fine;
  fine.resolution = 0.5;
  CHECK(std::fabs(diagterms_check(100, 25.0, 100.0, 10.0, fine).lhs - d25.lhs) < 1e-8);
  CHECK_THROWS_AS(diagterms_check(100, 25.0, 200.0), ParameterError);
}

TEST_CASE("moment report rows") {
  const auto& s = spectral(100, 130);
  const MomentReport r = moment_report(s.basis, s.weights, {0.3, 3.0, 20.0, 40.0, 60.0}, 10.0);
  REQUIRE(r.rows.size() == 5);
  CHECK(r.k == 100);
  CHECK(r.C == 10.0);
  CHECK(r.rows[0].first == 0.0);
  CHECK(r.rows[0].second == 0.0);
  CHECK(r.rows[2].regime == MomentRegime::mid);
  CHECK(r.rows[3].first_prediction == doctest::Approx(100.0 / (4.0 * pi)));
  for (const auto& row : r.rows) {
    CHECK(row.first_residual == row.first - row.first_prediction);
    CHECK(row.second_residual == row.second - row.second_prediction);
    CHECK(row.second >= 0.0);
  }
  CHECK(std::fabs(r.rows[1].smoothed - r.rows[1].smoothed_prediction) < 1e-10);
}
