#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace hml {

struct AiryValue {
  double ai = 0.0;
  double aip = 0.0;
};

// Ai and Ai' : Maclaurin series for |x| <= cutoff, asymptotic expansions beyond.
AiryValue airy(double x, double cutoff = 6.0);
AiryValue airy_series(double x);
AiryValue airy_asymptotic(double x);

struct OracleOptions {
  unsigned precision_bits = 113;
  // Panels per unit of (n + z); 1 keeps each panel within half an oscillation.
  double panels_per_unit = 1.0;
  std::size_t panel_budget = 4'000'000;
  // Permit the power series when z^2 <= 64 (n + 1).
  bool allow_series = true;
};

// J_n(z) from the integral (1/pi) int_0^pi cos(n t - z sin t) dt by composite
// 16-point Gauss-Legendre panels (or the power series at small z).
double bessel_j_oracle(int n, double z, const OracleOptions& opt = {});
double bessel_j_oracle_quadrature(int n, double z, const OracleOptions& opt = {});
double bessel_j_oracle_series(int n, double z, unsigned precision_bits = 113);

// log |J_n(z)| from the power series, in enough precision to survive cancellation.
double log_abs_bessel_j_series(int n, double z);

// Fast double-precision J_n(z): series, forward recurrence above the turning
// point, Miller's backward recurrence below it.
double bessel_j(int n, double z);

// J_0(z), ..., J_nmax(z) from one backward recurrence.
std::vector<double> bessel_j_orders(int nmax, double z);

enum class BesselRegime { series, langer_airy, quadrature_oracle, airy_transition, oscillatory };
std::string regime_name(BesselRegime r);

struct BesselEval {
  double value = 0.0;
  BesselRegime regime = BesselRegime::series;
  double error_estimate = 0.0;
};

struct UniformOptions {
  double eps0 = 0.1;
  double C = 10.0;
};

BesselEval bessel_j_uniform(double nu, double z, const UniformOptions& opt = {});

// Airy-form uniform approximation on both sides of the turning point.
double bessel_langer(double nu, double z);
// 2^{1/3} nu^{-1/3} Ai(-2^{1/3} y) at z = nu + y nu^{1/3}.
double bessel_transition(double nu, double y);
// sqrt(2/pi) (z^2 - nu^2)^{-1/4} cos(omega(z)).
double bessel_oscillatory(double nu, double z);

double langer_error(double nu, double C = 10.0);
double transition_error(double nu, double y, double C = 10.0);
double oscillatory_error(double nu, double z, double C = 10.0);

struct PhasePoint {
  double nu = 0.0;
  double z = 0.0;
  double omega = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
};

PhasePoint phase(double nu, double z);

struct BoundCheck {
  bool applies = false;
  bool pass = true;
  double value = 0.0;  // |J| (log scale for the small-argument bound)
  double bound = 0.0;
  double margin = 0.0;  // bound / value, or log difference for the small-argument bound
};

struct BoundSuiteResult {
  double nu = 0.0;
  double z = 0.0;
  double C = 10.0;
  double delta = 0.0;
  BoundCheck small_argument;
  BoundCheck below_transition;
  BoundCheck uniform;
  bool all_pass() const { return small_argument.pass && below_transition.pass && uniform.pass; }
};

// Uses the largest admissible delta <= 2/3 for the below-transition bound.
BoundSuiteResult bound_suite(int nu, double z, double C = 10.0);

// 16-point Gauss-Legendre nodes and weights on [-1, 1].
const std::array<double, 16>& gl16_nodes();
const std::array<double, 16>& gl16_weights();

}  // namespace hml
