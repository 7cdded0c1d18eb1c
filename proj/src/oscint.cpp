#include "hml/oscint.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "hml/errors.hpp"
#include "hml/numeric.hpp"
#include "hml/specfun.hpp"

namespace hml {

namespace {

constexpr int kJet = SmoothingWindow::j_max + 1;
using Jet = std::array<double, kJet>;

Jet jet_var(double t0, double slope) {
  Jet j{};
  j[0] = t0;
  j[1] = slope;
  return j;
}

Jet jet_mul(const Jet& a, const Jet& b) {
  Jet c{};
  for (int k = 0; k < kJet; ++k)
    for (int i = 0; i <= k; ++i) c[k] += a[i] * b[k - i];
  return c;
}

Jet jet_recip(const Jet& a) {
  Jet b{};
  b[0] = 1.0 / a[0];
  for (int k = 1; k < kJet; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += a[i] * b[k - i];
    b[k] = -s / a[0];
  }
  return b;
}

Jet jet_exp(const Jet& a) {
  Jet e{};
  e[0] = std::exp(a[0]);
  for (int k = 1; k < kJet; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += i * a[i] * e[k - i];
    e[k] = s / k;
  }
  return e;
}

// exp(-1/t) for t > 0, else 0.
Jet jet_h(const Jet& t) {
  if (t[0] <= 0.0) return Jet{};
  Jet r = jet_recip(t);
  for (double& v : r) v = -v;
  return jet_exp(r);
}

// g(t) with t = t0 + slope * (xi - xi0).
Jet jet_g(double t0, double slope) {
  Jet out{};
  if (t0 <= 0.0) return out;
  if (t0 >= 1.0) {
    out[0] = 1.0;
    return out;
  }
  const Jet h = jet_h(jet_var(t0, slope));
  const Jet h1 = jet_h(jet_var(1.0 - t0, -slope));
  Jet den{};
  for (int i = 0; i < kJet; ++i) den[i] = h[i] + h1[i];
  return jet_mul(h, jet_recip(den));
}

Jet window_jet(double delta, double xi) {
  if (xi <= 1.0 || xi >= 2.0) return Jet{};
  return jet_mul(jet_g(delta * (xi - 1.0), delta), jet_g(delta * (2.0 - xi), -delta));
}

double factorial(int j) {
  double f = 1.0;
  for (int i = 2; i <= j; ++i) f *= i;
  return f;
}

bool is_integer(double v) { return v == std::floor(v); }

double local_frequency(double nu, double y) {
  const double n = std::max(nu, 1.0);
  const double f = std::sqrt(std::fabs((y - nu) * (y + nu))) / std::max(y, 1.0);
  return std::max(f, std::pow(n, -1.0 / 3.0));
}

// Exponent of the bound J_nu(nu sech a) <= exp(nu (tanh a - a)) below the turning point.
double below_turning_exponent(double nu, double y) {
  if (y >= nu) return 0.0;
  if (y <= 0.0) return -std::numeric_limits<double>::infinity();
  const double a = std::acosh(nu / y);
  return nu * (std::tanh(a) - a);
}

double skip_start(double nu, double a, double b, double skip) {
  if (skip <= 0.0 || nu < 2.0) return a;
  const double top = std::min(b, nu);
  if (a >= top || below_turning_exponent(nu, a) >= -skip) return a;
  if (below_turning_exponent(nu, top) < -skip) return top;
  double lo = a, hi = top;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (below_turning_exponent(nu, mid) < -skip)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

struct LevelSum {
  double value = 0.0;
  double l1 = 0.0;
  std::size_t panels = 0;
};

template <class Integrand, class Width>
LevelSum march(const Integrand& f, double a, double b, const Width& width, std::size_t budget) {
  const auto& x = gl16_nodes();
  const auto& w = gl16_weights();
  CompensatedSum s;
  double l1 = 0.0;
  std::size_t panels = 0;
  double y = a;
  while (y < b) {
    double h = width(y);
    const double h2 = width(std::min(b, y + h));
    h = std::min(h, h2);
    if (!(h > 0.0)) throw Error("integration panel width collapsed");
    if (y + h > b || b - (y + h) < 1e-12 * h) h = b - y;
    const double c = y + 0.5 * h, r = 0.5 * h;
    for (int i = 0; i < 16; ++i) {
      const double v = r * w[i] * f(c + r * x[i]);
      s += v;
      l1 += std::fabs(v);
    }
    y += h;
    if (++panels > budget) throw ResourceError("panel budget exhausted", s.value(), std::numeric_limits<double>::infinity());
  }
  return {s.value(), l1, panels};
}

template <class Integrand, class WidthAt>
QuadResult refine(const Integrand& f, double a, double b, const WidthAt& width_at, const QuadOptions& opt) {
  QuadResult res;
  if (!(b > a)) return res;
  double factor = opt.resolution;
  std::size_t used = 0;
  LevelSum prev = march(f, a, b, [&](double y) { return factor * width_at(y); }, opt.panel_budget);
  used += prev.panels;
  for (int level = 1; level < 40; ++level) {
    factor *= 0.5;
    LevelSum cur;
    try {
      cur = march(f, a, b, [&](double y) { return factor * width_at(y); }, opt.panel_budget - std::min(used, opt.panel_budget));
    } catch (const ResourceError&) {
      throw ResourceError("integration did not converge within the panel budget", prev.value,
                          std::fabs(prev.value) + prev.l1);
    }
    used += cur.panels;
    const double gap = std::fabs(cur.value - prev.value);
    if (gap <= std::max(opt.tol * cur.l1, opt.abs_tol)) {
      res.value = cur.value;
      res.error = gap;
      res.l1 = cur.l1;
      res.panels = used;
      res.levels = level + 1;
      return res;
    }
    prev = cur;
    if (used >= opt.panel_budget) break;
  }
  throw ResourceError("integration did not converge within the panel budget", prev.value, std::fabs(prev.value));
}

}  // namespace

SmoothingWindow::SmoothingWindow(double delta) : delta_(delta) {
  if (!(delta >= 1.0)) throw ParameterError("SmoothingWindow: delta must be >= 1");
}

double SmoothingWindow::operator()(double xi) const {
  if (xi <= 1.0 || xi >= 2.0) return 0.0;
  auto g = [](double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double h = std::exp(-1.0 / t), h1 = std::exp(-1.0 / (1.0 - t));
    return h / (h + h1);
  };
  return g(delta_ * (xi - 1.0)) * g(delta_ * (2.0 - xi));
}

double SmoothingWindow::derivative(double xi, int j) const {
  if (j < 0 || j > j_max) throw ParameterError("SmoothingWindow: derivative order out of range");
  return window_jet(delta_, xi)[j] * factorial(j);
}

double SmoothingWindow::derivative_constant(int j) {
  if (j < 0 || j > j_max) throw ParameterError("SmoothingWindow: derivative order out of range");
  static const std::array<double, kJet> table = [] {
    std::array<double, kJet> sup{};
    const int n = 200000;
    for (int i = 1; i < n; ++i) {
      const Jet g = jet_g(static_cast<double>(i) / n, 1.0);
      for (int k = 0; k < kJet; ++k) sup[k] = std::max(sup[k], std::fabs(g[k] * factorial(k)));
    }
    return sup;
  }();
  return table[j];
}

double engine_kernel(double nu, double y, KernelKind kind) {
  if (kind == KernelKind::automatic) kind = (is_integer(nu) && nu <= 20000.0) ? KernelKind::exact : KernelKind::langer;
  if (kind == KernelKind::exact) {
    if (!is_integer(nu)) throw DomainError("exact Bessel kernel needs an integer order");
    return bessel_j(static_cast<int>(nu), y);
  }
  if (nu < 30.0) throw DomainError("Langer kernel needs order >= 30");
  return bessel_langer(nu, y);
}

QuadResult integrate_bessel_kernel(const std::function<double(double)>& g, double nu, double a, double b,
                                   const QuadOptions& opt) {
  if (!(a >= 0.0) || !(b >= a)) throw DomainError("integrate_bessel_kernel: need 0 <= a <= b");
  if (!(nu >= 0.0)) throw DomainError("integrate_bessel_kernel: order must be non-negative");
  if (a == b) return {};
  const double start = skip_start(nu, a, b, opt.skip_exponent);
  KernelKind kind = opt.kernel;
  if (kind == KernelKind::automatic) kind = (is_integer(nu) && nu <= 20000.0) ? KernelKind::exact : KernelKind::langer;
  auto f = [&](double y) { return g(y) * engine_kernel(nu, y, kind); };
  auto width = [&](double y) {
    const double w = 2.0 * pi / (local_frequency(nu, y) + opt.extra_frequency);
    return std::min(w, opt.g_scale);
  };
  return refine(f, start, b, width, opt);
}

QuadResult integrate_smooth(const std::function<double(double)>& f, double a, double b, double scale,
                            const QuadOptions& opt) {
  if (!(b >= a)) throw DomainError("integrate_smooth: need a <= b");
  if (!(scale > 0.0)) throw ParameterError("integrate_smooth: scale must be positive");
  return refine(f, a, b, [&](double) { return std::min(scale, opt.g_scale); }, opt);
}

double integral_y_bessel(int nu, double Y) {
  if (nu < 0 || Y < 0.0) throw DomainError("integral_y_bessel: order and argument must be non-negative");
  if (Y == 0.0) return 0.0;
  const int nmax = static_cast<int>(std::max<double>(nu + 4, Y + 12.0 * std::cbrt(Y) + 40.0));
  const std::vector<double> J = bessel_j_orders(nmax, Y);
  CompensatedSum s;
  for (int m = nu + 2; m <= nmax; m += 2) s += J[m];
  return Y * J[nu + 1] + 2.0 * nu * s.value();
}

double integral_bessel(int nu, double Y) {
  if (nu < 0 || Y < 0.0) throw DomainError("integral_bessel: order and argument must be non-negative");
  if (Y == 0.0) return 0.0;
  const int nmax = static_cast<int>(std::max<double>(nu + 4, Y + 12.0 * std::cbrt(Y) + 40.0));
  const std::vector<double> J = bessel_j_orders(nmax, Y);
  CompensatedSum s;
  for (int m = nu + 1; m <= nmax; m += 2) s += J[m];
  return 2.0 * s.value();
}

HankelWindow::HankelWindow(int k_, double delta_, const QuadOptions& q)
    : k(k_), delta(delta_), scale(static_cast<double>(k_) * k_ + delta_ * delta_), window(delta_), quad(q) {
  if (k < 2 || k % 2 != 0) throw ParameterError("HankelWindow: weight must be even and >= 2");
}

QuadResult tilde_w_detail(double xi, const HankelWindow& hw) {
  if (!(xi >= 0.0)) throw DomainError("tilde_w: xi must be non-negative");
  QuadResult out;
  if (xi == 0.0) return out;
  const double nu = hw.k - 1.0;
  const double a = 4.0 * pi * std::sqrt(hw.scale * xi);
  const double a2 = a * a;
  const SmoothingWindow& w = hw.window;
  auto g = [&](double y) { return y * w(y * y / a2); };
  const double top = a * std::sqrt(2.0);
  QuadOptions q = hw.quad;
  double inner = 0.0, err = 0.0, l1 = 0.0;
  std::size_t panels = 0;
  auto add = [&](double lo, double hi) {
    q.g_scale = std::min(hw.quad.g_scale, (hi - lo) / 8.0);
    const QuadResult r = integrate_bessel_kernel(g, nu, lo, hi, q);
    inner += r.value;
    err += r.error;
    l1 += r.l1;
    panels += r.panels;
  };
  if (w.has_plateau()) {
    const double y1 = a * std::sqrt(w.plateau_lo()), y2 = a * std::sqrt(w.plateau_hi());
    add(a, y1);
    add(y2, top);
    inner += integral_y_bessel(hw.k - 1, y2) - integral_y_bessel(hw.k - 1, y1);
  } else {
    add(a, top);
  }
  out.value = 2.0 / a2 * inner;
  out.error = 2.0 / a2 * err;
  out.l1 = 2.0 / a2 * l1;
  out.panels = panels;
  return out;
}

double tilde_w(double xi, const HankelWindow& hw) { return tilde_w_detail(xi, hw).value; }

double tilde_w_onset(const HankelWindow& hw) {
  const double nu = hw.k - 1.0;
  const double y0 = skip_start(nu, 0.0, nu, hw.quad.skip_exponent);
  const double u0 = y0 / (4.0 * pi * std::sqrt(2.0 * hw.scale));
  return u0 * u0;
}

std::vector<double> decay_grid(const HankelWindow& hw) {
  const double lo = std::max(tilde_w_onset(hw), 1e-12);
  const double hi = 1e4 * std::max(lo, 1e-3);
  std::vector<double> grid;
  for (double xi = lo; xi <= hi; xi *= 1.0 + 1.0 / 64.0) grid.push_back(xi);
  return grid;
}

double decay_constant(const HankelWindow& hw, int A, const std::vector<double>& grid) {
  double c = 0.0;
  for (double xi : grid) c = std::max(c, std::pow(xi, 0.5 * A) * std::fabs(tilde_w(xi, hw)));
  return c;
}

std::complex<double> log_gamma(std::complex<double> z) {
  if (z.real() <= 0.0 && z.imag() == 0.0 && z.real() == std::floor(z.real()))
    throw DomainError("log_gamma: pole");
  if (z.real() < 0.5) {
    // Reflection: log Gamma(z) = log pi - log sin(pi z) - log Gamma(1 - z).
    return std::log(pi) - std::log(std::sin(pi * z)) - log_gamma(1.0 - z);
  }
  std::complex<double> shift = 0.0;
  while (std::abs(z) < 15.0 || z.real() < 15.0) {
    shift += std::log(z);
    z += 1.0;
  }
  static const double b2j[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6, -3617.0 / 510};
  const std::complex<double> inv = 1.0 / z, inv2 = inv * inv;
  std::complex<double> series = 0.0, p = inv;
  for (int j = 1; j <= 8; ++j) {
    series += b2j[j - 1] / (2.0 * j * (2.0 * j - 1.0)) * p;
    p *= inv2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * pi) + series - shift;
}

std::complex<double> window_mellin(std::complex<double> s, const SmoothingWindow& w, double tol) {
  QuadOptions q;
  q.tol = tol;
  q.abs_tol = 1e-300;
  auto piece = [&](double lo, double hi) {
    const double scale = std::max((hi - lo) / 4.0, 1e-6);
    const auto re = integrate_smooth([&](double y) { return (std::exp(-s * std::log(y)) * w(y)).real(); }, lo, hi, scale, q);
    const auto im = integrate_smooth([&](double y) { return (std::exp(-s * std::log(y)) * w(y)).imag(); }, lo, hi, scale, q);
    return std::complex<double>(re.value, im.value);
  };
  if (!w.has_plateau()) return piece(1.0, 2.0);
  const double p = w.plateau_lo(), r = w.plateau_hi();
  const std::complex<double> one_s = 1.0 - s;
  const std::complex<double> flat = (std::exp(one_s * std::log(r)) - std::exp(one_s * std::log(p))) / one_s;
  return piece(1.0, p) + flat + piece(r, 2.0);
}

std::complex<double> mellin_phi(std::complex<double> s, int k, double delta, const MellinOptions& opt) {
  if (!(opt.sigma0 > 0.0 && opt.sigma0 < 0.5)) throw ParameterError("mellin_phi: sigma0 must lie in (0, 1/2)");
  if (s.real() < opt.sigma0 || s.real() > 1.0 - opt.sigma0) throw DomainError("mellin_phi: Re s outside the strip");
  if (k < 2 || k % 2 != 0) throw ParameterError("mellin_phi: weight must be even");
  const double K = static_cast<double>(k) * k + delta * delta;
  const std::complex<double> lg = -s * std::log(4.0 * pi * pi * K) + log_gamma(0.5 * (k - 1) + s) - log_gamma(0.5 * (k + 1) - s);
  return std::exp(lg) * window_mellin(s, SmoothingWindow(delta), opt.tol);
}

MellinDirect mellin_phi_direct(std::complex<double> s, const HankelWindow& hw, double tail_tol) {
  const double sigma = s.real();
  if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("mellin_phi_direct: Re s must lie in (0, 1)");
  const double freq = 4.0 * pi * std::sqrt(2.0 * hw.scale);  // in u = sqrt(xi)
  const double u0 = std::sqrt(tilde_w_onset(hw));
  MellinDirect out;
  out.c4 = decay_constant(hw, 4, decay_grid(hw));
  out.cutoff = std::pow(tail_tol * (2.0 - sigma) / out.c4, 1.0 / (sigma - 2.0));
  out.tail_bound = out.c4 * std::pow(out.cutoff, sigma - 2.0) / (2.0 - sigma);
  const double U = std::sqrt(out.cutoff);
  QuadOptions q;
  q.tol = 1e-10;
  q.abs_tol = 1e-3 * tail_tol;
  auto integrand = [&](double u, bool imag) {
    const std::complex<double> v = 2.0 * std::exp((2.0 * s - 1.0) * std::log(u)) * tilde_w(u * u, hw);
    return imag ? v.imag() : v.real();
  };
  const double scale = 2.0 * pi / freq;
  const auto re = integrate_smooth([&](double u) { return integrand(u, false); }, u0, U, scale, q);
  double im = 0.0;
  if (s.imag() != 0.0) im = integrate_smooth([&](double u) { return integrand(u, true); }, u0, U, scale, q).value;
  out.value = {re.value, im};
  return out;
}

TransitionMoment transition_moment(double nu, const QuadOptions& opt) {
  if (!(nu >= 50.0)) throw DomainError("transition_moment: order must be >= 50");
  TransitionMoment t;
  const double r = std::sqrt(nu + 1.0);
  t.lo = nu + 1.0 - r;
  t.hi = nu + 1.0 + r;
  const QuadResult q = integrate_bessel_kernel([](double y) { return y; }, nu, t.lo, t.hi, opt);
  t.value = q.value;
  t.error = q.error;
  return t;
}

double transition_moment_closed(int nu) {
  if (nu < 1) throw DomainError("transition_moment_closed: order must be positive");
  const double r = std::sqrt(nu + 1.0);
  return integral_y_bessel(nu, nu + 1.0 + r) - integral_y_bessel(nu, nu + 1.0 - r);
}

std::complex<double> errorterm_integral(int k, double x, double c, int sign, const QuadOptions& opt) {
  if (sign != 1 && sign != -1) throw ParameterError("errorterm_integral: sign must be +1 or -1");
  if (!(x > 0.0) || !(c >= 1.0)) throw DomainError("errorterm_integral: need x > 0 and c >= 1");
  if (c > 32.0 * pi * x / k) throw DomainError("errorterm_integral: requires c <= 32 pi x / k");
  const double lo = 4.0 * pi * x / c, hi = 8.0 * pi * x / c;
  QuadOptions q = opt;
  q.extra_frequency = 1.0;
  if (q.abs_tol == 0.0) q.abs_tol = 1e-14;
  const double nu = k - 1.0;
  const auto re = integrate_bessel_kernel([](double y) { return std::sqrt(y) * std::cos(y); }, nu, lo, hi, q);
  const auto im = integrate_bessel_kernel([](double y) { return std::sqrt(y) * std::sin(y); }, nu, lo, hi, q);
  return {re.value, sign * im.value};
}

}  // namespace hml
