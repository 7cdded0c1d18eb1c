#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace hml {

using mpz = boost::multiprecision::mpz_int;
using mpreal = boost::multiprecision::mpfr_float;

unsigned bits_to_digits10(unsigned bits);

// Sets the default mpfr precision (in bits) for the lifetime of the guard.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned bits);
  ~PrecisionGuard();
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_digits10_;
};

}  // namespace hml
