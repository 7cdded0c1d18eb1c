#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hml/mp.hpp"

namespace hml {

// q-expansion a(0) + a(1) q + ... + a(N-1) q^(N-1), exact.
struct IntegerSeries {
  int weight = 0;
  std::vector<mpz> coeffs;

  std::size_t length() const { return coeffs.size(); }
  const mpz& operator[](std::size_t n) const { return coeffs[n]; }
};

IntegerSeries multiply(const IntegerSeries& a, const IntegerSeries& b);
IntegerSeries power(const IntegerSeries& a, int e, std::size_t length);

IntegerSeries eisenstein(int k, std::size_t N);
IntegerSeries delta(std::size_t N);

// dim S_k counted as the number of monomials E4^a E6^b of weight k - 12.
int cusp_dimension_oracle(int k);

struct MillerBasis {
  int k = 0;
  int d = 0;
  std::vector<IntegerSeries> forms;

  std::size_t length() const { return forms.empty() ? 0 : forms.front().length(); }
};

MillerBasis miller_basis(int k, std::size_t N);

using IntMatrix = std::vector<std::vector<mpz>>;

// M[i][j] = coefficient of q^(i+1) in T_p applied to basis form j.
IntMatrix hecke_matrix(int k, int p, const MillerBasis& basis);

// Coefficients c_0..c_d of det(X I - M), c_d = 1.
std::vector<mpz> characteristic_polynomial(const IntMatrix& M);

struct EigenBasis {
  int k = 0;
  int d = 0;
  std::size_t N = 0;
  unsigned precision_bits = 0;
  // lambda[f][n] for n = 0..N; lambda[f][0] is unused and set to zero.
  std::vector<std::vector<mpreal>> lambda;
  std::vector<std::vector<double>> lambda_d;
  double eigen_residual = 0.0;
  // Relative residual of T_3 on the same eigenvectors, when computed.
  std::optional<double> t3_residual;

  double lam(int f, std::size_t n) const { return lambda_d[f][n]; }
};

EigenBasis eigenforms(int k, std::size_t N, unsigned precision_bits = 256);

// max over m, n <= M of |l(m)l(n) - sum_{e | (m,n)} l(mn/e^2)|.
mpreal hecke_consistency(const EigenBasis& basis, int M);

double sum_S(double x, const EigenBasis& basis, int f);

// Cache of eigenvalue tables as JSON with decimal strings.
std::string cache_file_name(int k, std::size_t N, unsigned precision_bits);
void save_eigenbasis(const EigenBasis& basis, const std::string& path);
std::optional<EigenBasis> load_eigenbasis(const std::string& path);
EigenBasis cached_eigenforms(int k, std::size_t N, unsigned precision_bits,
                             const std::string& cache_dir, bool allow_compute = true);

}  // namespace hml
