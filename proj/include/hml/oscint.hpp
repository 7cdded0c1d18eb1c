#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace hml {

// Smooth bump on [1, 2], identically 1 on [1 + 1/delta, 2 - 1/delta]:
// w(xi) = g(delta (xi - 1)) g(delta (2 - xi)), g(t) = h(t) / (h(t) + h(1 - t)), h(t) = exp(-1/t).
class SmoothingWindow {
 public:
  static constexpr int j_max = 4;

  explicit SmoothingWindow(double delta);
  double delta() const { return delta_; }
  double operator()(double xi) const;
  // j-th derivative, 0 <= j <= j_max.
  double derivative(double xi, int j) const;
  double plateau_lo() const { return 1.0 + 1.0 / delta_; }
  double plateau_hi() const { return 2.0 - 1.0 / delta_; }
  bool has_plateau() const { return plateau_lo() < plateau_hi(); }

  // sup |g^{(j)}| on [0, 1]; |w^{(j)}| <= C_j delta^j when delta >= 2.
  static double derivative_constant(int j);

 private:
  double delta_;
};

enum class KernelKind { automatic, exact, langer };

struct QuadOptions {
  // Converged when two successive panel levels agree within tol * int |integrand|.
  double tol = 1e-12;
  double abs_tol = 0.0;
  // Panel width as a fraction of one local oscillation period at the first level.
  double resolution = 1.0;
  std::size_t panel_budget = 4'000'000;
  // Angular frequency of an extra factor in g, e.g. 1 for e^{iy}.
  double extra_frequency = 0.0;
  // Length scale on which g varies; panels are kept below it.
  double g_scale = std::numeric_limits<double>::infinity();
  KernelKind kernel = KernelKind::automatic;
  // Skip the part of [a, b] where J_nu < exp(-skip_exponent) (0 disables).
  double skip_exponent = 60.0;
};

struct QuadResult {
  double value = 0.0;
  // Difference between the last two refinement levels.
  double error = 0.0;
  double l1 = 0.0;
  std::size_t panels = 0;
  int levels = 0;
};

// J_nu(y) as used by the engine for the given kernel choice.
double engine_kernel(double nu, double y, KernelKind kind);

// int_a^b g(y) J_nu(y) dy by composite 16-point Gauss-Legendre panels sized by the
// local oscillation (omega'(y) above the turning point, the Airy scale near it and
// the decay rate below it).
QuadResult integrate_bessel_kernel(const std::function<double(double)>& g, double nu, double a, double b,
                                   const QuadOptions& opt = {});

// Smooth integrand without a Bessel factor, same refinement rule.
QuadResult integrate_smooth(const std::function<double(double)>& f, double a, double b, double scale,
                            const QuadOptions& opt = {});

// int_0^Y y J_nu(y) dy = Y J_{nu+1}(Y) + 2 nu sum_{j>=1} J_{nu+2j}(Y), integer nu.
double integral_y_bessel(int nu, double Y);
// int_0^Y J_nu(y) dy = 2 sum_{j>=0} J_{nu+2j+1}(Y).
double integral_bessel(int nu, double Y);

struct HankelWindow {
  int k = 0;
  double delta = 0.0;
  double scale = 0.0;  // k^2 + delta^2
  SmoothingWindow window;
  QuadOptions quad;

  HankelWindow(int k, double delta, const QuadOptions& quad = {});
};

// w~(xi) = int_0^infty w(t) J_{k-1}(4 pi sqrt(scale xi t)) dt.
// The plateau w = 1 is integrated in closed form; only the two ramps use quadrature.
double tilde_w(double xi, const HankelWindow& hw);
QuadResult tilde_w_detail(double xi, const HankelWindow& hw);

// Smallest xi at which the Bessel factor of w~ leaves the skipped range.
double tilde_w_onset(const HankelWindow& hw);
// Geometric grid (ratio 1 + 1/64) over four decades from the onset, used to measure decay constants.
std::vector<double> decay_grid(const HankelWindow& hw);

// sup over the grid of xi^{A/2} |w~(xi)|.
double decay_constant(const HankelWindow& hw, int A, const std::vector<double>& grid);

std::complex<double> log_gamma(std::complex<double> z);

struct MellinOptions {
  double sigma0 = 0.01;
  double tol = 1e-13;
};

// int_1^2 y^{-s} w(y) dy.
std::complex<double> window_mellin(std::complex<double> s, const SmoothingWindow& w, double tol = 1e-13);

// phi(s) = int_0^infty xi^{s-1} w~(xi) dxi in closed form.
std::complex<double> mellin_phi(std::complex<double> s, int k, double delta, const MellinOptions& opt = {});

struct MellinDirect {
  std::complex<double> value;
  double cutoff = 0.0;
  double tail_bound = 0.0;
  double c4 = 0.0;
};

// Quadrature of xi^{s-1} w~(xi) up to a cutoff where c4 xi^{-2} certifies the tail.
MellinDirect mellin_phi_direct(std::complex<double> s, const HankelWindow& hw, double tail_tol = 1e-6);

struct TransitionMoment {
  double value = 0.0;
  double error = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// int y J_nu(y) dy over [(nu+1) - sqrt(nu+1), (nu+1) + sqrt(nu+1)] by quadrature.
TransitionMoment transition_moment(double nu, const QuadOptions& opt = {});
// The same integral from the closed form, integer nu.
double transition_moment_closed(int nu);

// int_{4 pi x/c}^{8 pi x/c} y^{1/2} J_{k-1}(y) e^{i sign y} dy.
std::complex<double> errorterm_integral(int k, double x, double c, int sign, const QuadOptions& opt = {});

}  // namespace hml
