#include "hml/moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hml/errors.hpp"
#include "hml/numeric.hpp"

namespace hml {

namespace {

double parity_sign(int k) { return (k / 2) % 2 == 0 ? 1.0 : -1.0; }

void check_table(double x, const EigenBasis& basis, const char* what) {
  if (!(x >= 0.0)) throw DomainError(std::string(what) + ": x must be non-negative");
  if (std::floor(2.0 * x) > static_cast<double>(basis.N))
    throw TableError(std::string(what) + ": 2x exceeds table length " + std::to_string(basis.N));
}

void check_weights(const EigenBasis& basis, const HarmonicWeights& weights) {
  if (static_cast<int>(weights.omegas.size()) != basis.d || weights.k != basis.k)
    throw ParameterError("weights do not match the eigenbasis");
}

// Integers n with w(n/x) != 0, i.e. x < n < 2x.
std::pair<long, long> window_range(double x) {
  const long lo = static_cast<long>(std::floor(x)) + 1;
  long hi = static_cast<long>(std::ceil(2.0 * x)) - 1;
  return {lo, hi};
}

}  // namespace

double L_func(double xi) {
  if (!(xi >= 0.0)) throw DomainError("L_func: argument must be non-negative");
  if (xi <= 1.0 || xi >= 2.0) return 0.0;
  if (xi <= std::sqrt(2.0)) return std::log(xi);
  return std::log(2.0 / xi);
}

std::string regime_name(MomentRegime r) {
  switch (r) {
    case MomentRegime::below_first_transition: return "below-first-transition";
    case MomentRegime::first_transition: return "first-transition";
    case MomentRegime::mid: return "mid";
    case MomentRegime::second_transition: return "second-transition";
    case MomentRegime::above_second_transition: return "above-second-transition";
  }
  return "unknown";
}

MomentRegime moment_regime(int k, double x) {
  const double kk = static_cast<double>(k);
  if (x < kk / (8.0 * pi)) return MomentRegime::below_first_transition;
  if (x <= kk / (4.0 * pi)) return MomentRegime::first_transition;
  if (x < kk * kk / (32.0 * pi * pi - 1.0)) return MomentRegime::mid;
  if (x <= kk * kk / (16.0 * pi * pi + 1.0)) return MomentRegime::second_transition;
  return MomentRegime::above_second_transition;
}

double first_moment(double x, const EigenBasis& basis, const HarmonicWeights& weights) {
  check_table(x, basis, "first_moment");
  check_weights(basis, weights);
  CompensatedSum s;
  for (int f = 0; f < basis.d; ++f) s += weights.omegas[f] * sum_S(x, basis, f);
  return s.value();
}

double second_moment(double x, const EigenBasis& basis, const HarmonicWeights& weights) {
  check_table(x, basis, "second_moment");
  check_weights(basis, weights);
  CompensatedSum s;
  for (int f = 0; f < basis.d; ++f) {
    const double v = sum_S(x, basis, f);
    s += weights.omegas[f] * v * v;
  }
  return s.value();
}

double smoothed_second_moment(double x, double delta, const EigenBasis& basis, const HarmonicWeights& weights) {
  check_table(x, basis, "smoothed_second_moment");
  check_weights(basis, weights);
  const SmoothingWindow w(delta);
  const auto [lo, hi] = window_range(x);
  CompensatedSum s;
  for (int f = 0; f < basis.d; ++f) {
    CompensatedSum inner;
    for (long n = lo; n <= hi; ++n) inner += basis.lam(f, n) * w(n / x);
    s += weights.omegas[f] * inner.value() * inner.value();
  }
  return s.value();
}

double window_diagonal(double x, double delta) {
  const SmoothingWindow w(delta);
  const auto [lo, hi] = window_range(x);
  CompensatedSum s;
  for (long n = lo; n <= hi; ++n) {
    const double v = w(n / x);
    s += v * v;
  }
  return s.value();
}

double voronoi_main_term(int k, double x) {
  const double kk = static_cast<double>(k);
  if (x < kk * kk / (64.0 * pi * pi) || x > kk * kk * kk * kk)
    throw DomainError("voronoi_main_term: requires k^2/(64 pi^2) <= x <= k^4");
  const QuadResult r =
      integrate_bessel_kernel([](double y) { return y; }, k - 1.0, 4.0 * pi * std::sqrt(x), 4.0 * pi * std::sqrt(2.0 * x));
  return parity_sign(k) / (4.0 * pi) * r.value;
}

OffDiagonal offdiag_direct(int k, double x, double delta, long c_max, std::size_t max_pairs) {
  if (!(x > 0.0) || x > 1e3) throw DomainError("offdiag_direct: requires 0 < x <= 1000");
  const SmoothingWindow w(delta);
  OffDiagonal out;
  const long need = static_cast<long>(std::ceil(32.0 * pi * x / k));
  out.c_max = std::max(c_max > 0 ? c_max : 1000L, need);
  const auto [lo, hi] = window_range(x);
  std::vector<std::pair<long, long>> pairs;
  std::vector<double> mult;
  for (long m = lo; m <= hi; ++m)
    for (long n = m; n <= hi; ++n) {
      pairs.emplace_back(m, n);
      mult.push_back((m == n ? 1.0 : 2.0) * w(m / x) * w(n / x));
    }
  out.pairs = pairs.size();
  if (out.pairs > max_pairs) throw ResourceError("offdiag_direct: pair grid exceeds the limit");
  if (pairs.empty()) return out;
  const std::vector<GeometricSide> g = geometric_side_pairs(pairs, k, out.c_max);
  CompensatedSum s;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double delta_mn = pairs[i].first == pairs[i].second ? 1.0 : 0.0;
    s += mult[i] * (g[i].value - delta_mn);
    out.tail_bound += mult[i] * g[i].tail_bound;
    out.rounding_bound += mult[i] * g[i].rounding_bound;
    out.c_used = std::max(out.c_used, g[i].c_used);
  }
  out.value = s.value();
  return out;
}

MaintermCheck mainterm_integral_check(int k, double x, const QuadOptions& opt) {
  if (k < 2) throw ParameterError("mainterm_integral_check: weight too small");
  if (!(x > 0.0)) throw DomainError("mainterm_integral_check: x must be positive");
  const double s = 4.0 * pi * x;
  auto g = [s](double y) { return y * L_func(y / s); };
  const double nu = k - 1.0;
  MaintermCheck c;
  c.lhs = integrate_bessel_kernel(g, nu, s, s * std::sqrt(2.0), opt).value +
          integrate_bessel_kernel(g, nu, s * std::sqrt(2.0), 2.0 * s, opt).value;
  c.rhs = L_func(k / s) * k;
  c.residual = c.lhs - c.rhs;
  c.envelope_78 = std::pow(static_cast<double>(k), 7.0 / 8.0);
  c.envelope_23 = std::pow(static_cast<double>(k), 2.0 / 3.0);
  return c;
}

DiagtermsCheck diagterms_check(int k, double x, double delta, double C, const QuadOptions& opt, double tail_tol) {
  if (!(x > 0.0)) throw DomainError("diagterms_check: x must be positive");
  if (delta > k) throw ParameterError("diagterms_check: requires delta <= k");
  const HankelWindow hw(k, delta, opt);
  DiagtermsCheck d;
  d.c4 = decay_constant(hw, 4, decay_grid(hw));
  if (tail_tol <= 0.0) tail_tol = 1e-5 * x;
  const double K = hw.scale;
  // 4 pi^2 x^2 sum_{n > N} c4^2 xi_n^{-4} <= 4 pi^2 x K c4^2 / (3 xi_N^3).
  const double xi_end = std::cbrt(4.0 * pi * pi * x * K * d.c4 * d.c4 / (3.0 * tail_tol));
  const long n_lo = std::max(1L, static_cast<long>(std::floor(tilde_w_onset(hw) * K / x)));
  const long n_hi = std::max(n_lo, static_cast<long>(std::ceil(xi_end * K / x)));
  const double xi_last = n_hi * x / K;
  d.tail_bound = 4.0 * pi * pi * x * K * d.c4 * d.c4 / (3.0 * xi_last * xi_last * xi_last);
  CompensatedSum s;
  for (long n = n_lo; n <= n_hi; ++n) {
    const double v = tilde_w(n * x / K, hw);
    s += v * v;
  }
  d.terms = n_hi - n_lo + 1;
  d.lhs = 4.0 * pi * pi * x * x * s.value();
  d.residual = std::fabs(d.lhs - x);
  d.envelope = C * (x / delta + std::pow(x, 1.5) * std::pow(std::log(static_cast<double>(k)), 3) / k);
  return d;
}

MomentReport moment_report(const EigenBasis& basis, const HarmonicWeights& weights, const std::vector<double>& xs,
                           double delta, double C) {
  MomentReport rep;
  rep.k = basis.k;
  rep.delta = delta;
  rep.C = C;
  const int k = basis.k;
  const double kk = static_cast<double>(k);
  const double sign = parity_sign(k);
  for (double x : xs) {
    MomentRow r;
    r.x = x;
    r.regime = moment_regime(k, x);
    r.first = first_moment(x, basis, weights);
    r.second = second_moment(x, basis, weights);
    if (x <= kk * kk / (32.0 * pi * pi + 1.0)) {
      r.first_prediction = 0.0;
    } else if (x >= kk * kk / (32.0 * pi * pi - 1.0) && x <= kk * kk / (16.0 * pi * pi + 1.0)) {
      r.first_prediction = sign * kk / (4.0 * pi);
    } else {
      r.first_prediction = voronoi_main_term(k, x);
    }
    r.second_prediction = x + sign * L_func(kk / (4.0 * pi * x)) * kk / (2.0 * pi);
    r.first_residual = r.first - r.first_prediction;
    r.second_residual = r.second - r.second_prediction;
    if (delta > 0.0) {
      r.smoothed = smoothed_second_moment(x, delta, basis, weights);
      r.smoothed_prediction = window_diagonal(x, delta) + offdiag_direct(k, x, delta).value;
    }
    rep.rows.push_back(r);
  }
  return rep;
}

}  // namespace hml
