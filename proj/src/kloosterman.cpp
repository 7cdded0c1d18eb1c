#include "hml/kloosterman.hpp"

#include <cmath>

#include "hml/errors.hpp"
#include "hml/numeric.hpp"

namespace hml {

namespace {

std::vector<long> units_mod(long c) {
  if (c == 1) return {0};
  std::vector<char> coprime(c, 1);
  coprime[0] = 0;
  long r = c;
  for (long p = 2; p * p <= r; ++p) {
    if (r % p != 0) continue;
    while (r % p == 0) r /= p;
    for (long a = 0; a < c; a += p) coprime[a] = 0;
  }
  if (r > 1)
    for (long a = 0; a < c; a += r) coprime[a] = 0;
  std::vector<long> u;
  for (long a = 0; a < c; ++a)
    if (coprime[a]) u.push_back(a);
  return u;
}

long reduce(long v, long c) {
  v %= c;
  return v < 0 ? v + c : v;
}

}  // namespace

long mod_inverse(long a, long c) {
  if (c == 1) return 0;
  long old_r = reduce(a, c), r = c, old_s = 1, s = 0;
  while (r != 0) {
    const long q = old_r / r;
    long t = old_r - q * r;
    old_r = r;
    r = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  if (old_r != 1) throw DomainError("mod_inverse: not a unit");
  return reduce(old_s, c);
}

std::complex<double> kloosterman_complex(long m, long n, long c) {
  if (m < 1 || n < 1 || c < 1) throw DomainError("kloosterman: arguments must be positive");
  CompensatedSum re, im;
  for (long a : units_mod(c)) {
    const long ai = mod_inverse(a, c);
    const long r = reduce((ai * reduce(m, c)) % c + (a * reduce(n, c)) % c, c);
    const double th = 2.0 * pi * static_cast<double>(r) / static_cast<double>(c);
    re += std::cos(th);
    im += std::sin(th);
  }
  return {re.value(), im.value()};
}

double kloosterman(long m, long n, long c) { return kloosterman_complex(m, n, c).real(); }

KloostermanValue kloosterman_value(long m, long n, long c) { return {m, n, c, kloosterman(m, n, c)}; }

KloostermanModulus::KloostermanModulus(long c) : c_(c) {
  if (c < 1) throw DomainError("KloostermanModulus: modulus must be positive");
  units_ = units_mod(c);
  for (long a : units_) inverses_.push_back(mod_inverse(a, c));
  cos_table_.resize(c);
  for (long r = 0; r < c; ++r) cos_table_[r] = std::cos(2.0 * pi * static_cast<double>(r) / static_cast<double>(c));
}

double KloostermanModulus::operator()(long m, long n) const {
  const long mr = reduce(m, c_), nr = reduce(n, c_);
  CompensatedSum s;
  for (std::size_t i = 0; i < units_.size(); ++i) {
    const long r = (inverses_[i] * mr + units_[i] * nr) % c_;
    s += cos_table_[r];
  }
  return s.value();
}

}  // namespace hml
