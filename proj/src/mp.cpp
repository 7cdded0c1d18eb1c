#include "hml/mp.hpp"

#include <cmath>

namespace hml {

unsigned bits_to_digits10(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

PrecisionGuard::PrecisionGuard(unsigned bits) : saved_digits10_(mpreal::default_precision()) {
  mpreal::default_precision(bits_to_digits10(bits));
}

PrecisionGuard::~PrecisionGuard() { mpreal::default_precision(saved_digits10_); }

}  // namespace hml
