#pragma once

#include <complex>
#include <vector>

namespace hml {

struct KloostermanValue {
  long m = 0;
  long n = 0;
  long c = 0;
  double value = 0.0;
};

// S(m, n; c) = sum over units a mod c of e((a* m + a n) / c).
double kloosterman(long m, long n, long c);
std::complex<double> kloosterman_complex(long m, long n, long c);
KloostermanValue kloosterman_value(long m, long n, long c);

long mod_inverse(long a, long c);

// Units and inverses for one modulus, reused across many (m, n).
class KloostermanModulus {
 public:
  explicit KloostermanModulus(long c);
  long modulus() const { return c_; }
  double operator()(long m, long n) const;

 private:
  long c_;
  std::vector<long> units_;
  std::vector<long> inverses_;
  std::vector<double> cos_table_;
};

}  // namespace hml
