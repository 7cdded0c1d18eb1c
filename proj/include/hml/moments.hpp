#pragma once

#include <string>
#include <vector>

#include "hml/modforms.hpp"
#include "hml/oscint.hpp"
#include "hml/petersson.hpp"

namespace hml {

// 0 on [0,1], log xi on [1, sqrt 2], log(2/xi) on [sqrt 2, 2], 0 beyond.
double L_func(double xi);

enum class MomentRegime { below_first_transition, first_transition, mid, second_transition, above_second_transition };
std::string regime_name(MomentRegime r);

// Boundaries: k/(8 pi), k/(4 pi) for the second-moment window,
// k^2/(32 pi^2 - 1), k^2/(16 pi^2 + 1) for the first-moment window.
MomentRegime moment_regime(int k, double x);

double first_moment(double x, const EigenBasis& basis, const HarmonicWeights& weights);
double second_moment(double x, const EigenBasis& basis, const HarmonicWeights& weights);

// sum_f omega(f) (sum_n lambda_f(n) w(n/x))^2.
double smoothed_second_moment(double x, double delta, const EigenBasis& basis, const HarmonicWeights& weights);
// sum_n w(n/x)^2.
double window_diagonal(double x, double delta);

// (-1)^{k/2}/(4 pi) int_{4 pi sqrt x}^{4 pi sqrt(2x)} y J_{k-1}(y) dy.
double voronoi_main_term(int k, double x);

struct OffDiagonal {
  double value = 0.0;
  double tail_bound = 0.0;
  double rounding_bound = 0.0;
  long c_max = 0;
  long c_used = 0;
  std::size_t pairs = 0;
};

// 2 pi (-1)^{k/2} sum_{m,n} w(n/x) w(m/x) sum_c S(m,n;c)/c J_{k-1}(4 pi sqrt(mn)/c).
OffDiagonal offdiag_direct(int k, double x, double delta, long c_max = 0, std::size_t max_pairs = 4'000'000);

struct MaintermCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double envelope_78 = 0.0;  // k^{7/8}
  double envelope_23 = 0.0;  // k^{2/3}
};

// int_{4 pi x}^{8 pi x} y L(y/(4 pi x)) J_{k-1}(y) dy against L(k/(4 pi x)) k.
MaintermCheck mainterm_integral_check(int k, double x, const QuadOptions& opt = {});

struct DiagtermsCheck {
  double lhs = 0.0;
  double residual = 0.0;
  double envelope = 0.0;  // C (x/delta + x^{3/2} log^3 k / k)
  double tail_bound = 0.0;
  double c4 = 0.0;
  long terms = 0;
};

// 4 pi^2 x^2 sum_n w~(n x / (k^2 + delta^2))^2, truncated where c4 xi^{-2} bounds the tail.
DiagtermsCheck diagterms_check(int k, double x, double delta, double C = 10.0, const QuadOptions& opt = {},
                               double tail_tol = 0.0);

struct MomentRow {
  double x = 0.0;
  MomentRegime regime = MomentRegime::below_first_transition;
  double first = 0.0;
  double second = 0.0;
  double first_prediction = 0.0;
  double second_prediction = 0.0;
  double first_residual = 0.0;
  double second_residual = 0.0;
  // Only when a smoothing parameter is given.
  double smoothed = 0.0;
  double smoothed_prediction = 0.0;
};

struct MomentReport {
  int k = 0;
  double delta = 0.0;
  double C = 10.0;
  std::vector<MomentRow> rows;
};

// first prediction: 0 below the first-moment window, (-1)^{k/2} k/(4 pi) inside it;
// second prediction: x + (-1)^{k/2} L(k/(4 pi x)) k/(2 pi).
MomentReport moment_report(const EigenBasis& basis, const HarmonicWeights& weights, const std::vector<double>& xs,
                           double delta = 0.0, double C = 10.0);

}  // namespace hml
