#pragma once

#include <utility>
#include <vector>

#include "hml/modforms.hpp"

namespace hml {

struct GeometricSide {
  double value = 0.0;
  // Bound on the dropped terms c > c_used, from |J_nu(z)| <= (z/2)^nu / nu!.
  double tail_bound = 0.0;
  // Floating-point error estimate of the retained sum.
  double rounding_bound = 0.0;
  // 2 pi sum_{c <= c_used} |S(m,n;c)| |J_{k-1}(4 pi sqrt(mn)/c)| / c.
  double abs_sum = 0.0;
  long c_max = 0;
  // Terms beyond c_used are below 1e-40 and are counted in tail_bound instead.
  long c_used = 0;
  // Set when 4 pi sqrt(mn)/c_max > k/4, i.e. the tail is not in the decay regime.
  bool tail_uncertified = false;
};

long default_c_max(long m, long n, int k);

// delta_{mn} + 2 pi (-1)^{k/2} sum_{c <= c_max} S(m,n;c)/c J_{k-1}(4 pi sqrt(mn)/c).
GeometricSide geometric_side(long m, long n, int k, long c_max);
GeometricSide geometric_side(long m, long n, int k);

// All pairs 1 <= m <= n <= M sharing one Kloosterman table per modulus; entry [m-1][n-1].
std::vector<std::vector<GeometricSide>> geometric_side_table(int M, int k, long c_max);

// Arbitrary list of pairs, one Kloosterman table per modulus.
std::vector<GeometricSide> geometric_side_pairs(const std::vector<std::pair<long, long>>& pairs, int k, long c_max);

struct HarmonicWeights {
  int k = 0;
  std::vector<double> omegas;
  // Max |spectral - geometric| over the held-out pairs.
  double fit_residual = 0.0;
  // Least-squares residual on the fitted pairs, floored at their rounding bound.
  double in_sample_residual = 0.0;
  long c_max = 0;
  // Largest tail bound among the geometric values used.
  double tail_bound = 0.0;
  // Bound on |geometric_side(1,1) - 1|: the whole Kloosterman sum plus its tail.
  double normalization_envelope = 0.0;
  double condition_number = 0.0;
  std::vector<std::pair<int, int>> held_out;

  double total() const;
};

double spectral_side(long m, long n, const EigenBasis& basis, const HarmonicWeights& weights);

struct WeightOptions {
  // Number of fit pairs (1, n); 0 means 2d.
  int pair_budget = 0;
  // 0 means default_c_max per pair.
  long c_max = 0;
  double max_condition = 1e12;
  unsigned precision_bits = 128;
};

HarmonicWeights recover_weights(const EigenBasis& basis, const WeightOptions& opt = {});

struct TraceResidual {
  double residual = 0.0;
  int m = 0;
  int n = 0;
  double tail_bound = 0.0;
  bool tail_uncertified = false;
};

TraceResidual trace_residual(const EigenBasis& basis, const HarmonicWeights& weights, int M, long c_max);
// Computes eigendata with N = M^2 and fits the weights at the same c_max.
TraceResidual trace_residual(int k, int M, long c_max);

}  // namespace hml
