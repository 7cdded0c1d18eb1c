#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hml/kloosterman.hpp"
#include "hml/numeric.hpp"

using namespace hml;

TEST_CASE("small moduli") {
  for (long m = 1; m < 6; ++m)
    for (long n = 1; n < 6; ++n) CHECK(kloosterman(m, n, 1) == 1.0);
  CHECK(kloosterman(1, 1, 3) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(kloosterman(1, 1, 2) == doctest::Approx(1.0).epsilon(1e-14));
  // a = 1, 4 give phase 2/5 and 3/5; a = 2, 3 give phase 1.
  CHECK(kloosterman(1, 1, 5) == doctest::Approx(2.0 + 2.0 * std::cos(4.0 * pi / 5.0)).epsilon(1e-14));
  auto v = kloosterman_value(2, 3, 7);
  CHECK(v.c == 7);
  CHECK(v.value == kloosterman(2, 3, 7));
}

TEST_CASE("modular inverse") {
  for (long c : {2L, 9L, 97L, 1000L})
    for (long a = 1; a < c; ++a)
      if (gcd(a, c) == 1) CHECK((a * mod_inverse(a, c)) % c == 1);
}

TEST_CASE("realness symmetry trivial bound periodicity") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> mn(1, 500), cd(1, 2000);
  for (int t = 0; t < 300; ++t) {
    const long m = mn(rng), n = mn(rng), c = cd(rng);
    const auto z = kloosterman_complex(m, n, c);
    CHECK(std::fabs(z.imag()) < 1e-10 * c);
    const double s = kloosterman(m, n, c);
    CHECK(std::fabs(s - kloosterman(n, m, c)) < 1e-10);
    CHECK(std::fabs(s) <= c + 1e-9);
    CHECK(std::fabs(s - kloosterman(m + c, n, c)) < 1e-10);
    // Weil bound
    const double g = static_cast<double>(gcd(gcd(m, n), c));
    CHECK(std::fabs(s) <= divisor_count(c) * std::sqrt(g * c) + 1e-8);
  }
}

TEST_CASE("twisted multiplicativity") {
  // S(m, n; qr) = S(m rb^2, n; q) S(m qb^2, n; r) with rb r = 1 mod q, qb q = 1 mod r.
  const long pairs[][2] = {{3, 4}, {5, 7}, {8, 9}, {11, 13}, {16, 25}};
  for (auto [q, r] : pairs)
    for (long m : {1L, 2L, 6L, 35L})
      for (long n : {1L, 3L, 10L}) {
        const long rb = mod_inverse(r % q, q), qb = mod_inverse(q % r, r);
        const double lhs = kloosterman(m, n, q * r);
        const double rhs = kloosterman(m * rb % q * rb % q + q, n, q) * kloosterman(m * qb % r * qb % r + r, n, r);
        CHECK(std::fabs(lhs - rhs) < 1e-10);
      }
}

TEST_CASE("ramanujan sum when the prime divides m") {
  for (long p : {3L, 7L, 31L})
    for (long n = 1; n < 20; ++n) CHECK(kloosterman(p, n, p) == doctest::Approx(n % p == 0 ? p - 1.0 : -1.0).epsilon(1e-12));
}

TEST_CASE("table route agrees with direct summation") {
  for (long c : {1L, 2L, 12L, 97L, 360L, 1001L}) {
    KloostermanModulus K(c);
    CHECK(K.modulus() == c);
    for (long m = 1; m < 15; m += 3)
      for (long n = 1; n < 40; n += 7) CHECK(std::fabs(K(m, n) - kloosterman(m, n, c)) < 1e-11);
  }
}
