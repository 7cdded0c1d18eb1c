#include "hml/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/float128.hpp>

#include "hml/errors.hpp"
#include "hml/mp.hpp"
#include "hml/numeric.hpp"

namespace hml {

namespace {

using f128 = boost::multiprecision::float128;

template <class T>
void gauss_legendre(int m, std::vector<T>& x, std::vector<T>& w, const T& eps) {
  x.assign(m, T(0));
  w.assign(m, T(0));
  const T pi_t = boost::math::constants::pi<T>();
  for (int i = 0; i < (m + 1) / 2; ++i) {
    T z = cos(pi_t * (i + T(0.75)) / (m + T(0.5)));
    T pp = 0;
    for (int it = 0; it < 200; ++it) {
      T p0 = 1, p1 = z;
      for (int j = 2; j <= m; ++j) {
        T p2 = ((2 * j - 1) * z * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = m * (z * p1 - p0) / (z * z - 1);
      T dz = p1 / pp;
      z -= dz;
      if (abs(dz) < eps) break;
    }
    x[i] = -z;
    x[m - 1 - i] = z;
    w[i] = w[m - 1 - i] = 2 / ((1 - z * z) * pp * pp);
  }
}

const std::vector<f128>& gl16_f128_nodes(bool weights) {
  static std::vector<f128> x, w;
  static std::once_flag once;
  std::call_once(once, [] { gauss_legendre<f128>(16, x, w, f128(1e-33)); });
  return weights ? w : x;
}

template <class T>
T oracle_quadrature(int n, const T& z, std::size_t panels, const std::vector<T>& x,
                    const std::vector<T>& w) {
  const T pi_t = boost::math::constants::pi<T>();
  const T h = pi_t / panels;
  T total = 0;
  for (std::size_t p = 0; p < panels; ++p) {
    const T mid = (p + T(0.5)) * h;
    T panel = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const T th = mid + (h / 2) * x[i];
      panel += w[i] * cos(n * th - z * sin(th));
    }
    total += panel;
  }
  return total * (h / 2) / pi_t;
}

// Returns the series sum normalised by its leading term, and log of that term.
template <class T>
std::pair<T, T> series_parts(int n, const T& z, const T& eps) {
  const T x = z / 2;
  const T log_lead = n * log(x) - boost::math::lgamma(T(n + 1));
  const T x2 = x * x;
  T term = 1, sum = 1;
  for (int j = 1; j < 1000000; ++j) {
    term *= -x2 / (T(j) * T(n + j));
    sum += term;
    if (abs(term) < eps * abs(sum) && T(j) > x2 / T(n + 1)) break;
  }
  return {sum, log_lead};
}

// Asymptotic coefficients u_k, v_k.
const std::vector<double>& airy_u() {
  static const std::vector<double> u = [] {
    std::vector<double> v{1.0};
    for (int k = 1; k < 60; ++k)
      v.push_back(v.back() * (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k));
    return v;
  }();
  return u;
}

double airy_v(int k) {
  if (k == 0) return 1.0;
  return -(6.0 * k + 1) / (6.0 * k - 1) * airy_u()[k];
}

double series_real_order(double nu, double z) {
  const double x = 0.5 * z;
  const double x2 = x * x;
  double term = 1.0, sum = 1.0;
  for (int j = 1; j < 500; ++j) {
    term *= -x2 / (j * (nu + j));
    sum += term;
    if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
  }
  return std::exp(nu * std::log(x) - std::lgamma(nu + 1.0)) * sum;
}

// d/t^3 where d = atanh(t) - t (sign = +1) or t - atan(t) (sign = -1).
double cubic_ratio(double t, int sign) {
  if (t < 0.1) {
    const double t2 = t * t;
    double sum = 0.0, p = 1.0;
    for (int j = 0; j < 12; ++j) {
      const double c = 1.0 / (2 * j + 3);
      sum += (sign < 0 && (j % 2) ? -c : c) * p;
      p *= t2;
    }
    return sum;
  }
  const double d = sign > 0 ? std::atanh(t) - t : t - std::atan(t);
  return d / (t * t * t);
}

void hankel_j01(double z, double& j0, double& j1) {
  auto pq = [z](double mu, double& P, double& Q) {
    P = 0.0;
    Q = 0.0;
    double a = 1.0, prev = 1e300;
    for (int k = 0; k < 200; ++k) {
      if (k > 0) {
        const double odd = 2.0 * k - 1;
        a *= (mu - odd * odd) / (k * 8.0 * z);
      }
      const double aa = std::fabs(a);
      if (aa > prev) break;
      prev = aa;
      const int r = k % 4;
      if (r == 0) P += a;
      if (r == 1) Q += a;
      if (r == 2) P -= a;
      if (r == 3) Q -= a;
      if (aa < 1e-18) break;
    }
  };
  double P0, Q0, P1, Q1;
  pq(0.0, P0, Q0);
  pq(4.0, P1, Q1);
  const double s = std::sin(z), c = std::cos(z);
  const double r2 = std::sqrt(0.5);
  // chi0 = z - pi/4, chi1 = z - 3 pi/4
  const double c0 = r2 * (c + s), s0 = r2 * (s - c);
  const double c1 = r2 * (s - c), s1 = -r2 * (c + s);
  const double amp = std::sqrt(2.0 / (pi * z));
  j0 = amp * (P0 * c0 - Q0 * s0);
  j1 = amp * (P1 * c1 - Q1 * s1);
}

// Miller's backward recurrence normalised by J_0 + 2 sum J_{2k} = 1.
double miller(int n, double z) {
  const double top = std::max<double>(n, z);
  const int m = 2 * ((static_cast<int>(top + 12.0 * std::cbrt(top) + 30.0)) / 2 + 1);
  const double tox = 2.0 / z;
  double bjp = 0.0, bj = 1.0, ans = 0.0, sum = 0.0;
  bool jsum = false;
  for (int j = m; j > 0; --j) {
    const double bjm = j * tox * bj - bjp;
    bjp = bj;
    bj = bjm;
    if (std::fabs(bj) > 1e250) {
      bj *= 1e-250;
      bjp *= 1e-250;
      ans *= 1e-250;
      sum *= 1e-250;
    }
    if (jsum) sum += bj;
    jsum = !jsum;
    if (j == n) ans = bjp;
  }
  sum = 2.0 * sum - bj;
  return n == 0 ? bj / sum : ans / sum;
}

}  // namespace

const std::array<double, 16>& gl16_nodes() {
  static const std::array<double, 16> a = [] {
    std::array<double, 16> r{};
    const auto& x = gl16_f128_nodes(false);
    for (int i = 0; i < 16; ++i) r[i] = x[i].convert_to<double>();
    return r;
  }();
  return a;
}

const std::array<double, 16>& gl16_weights() {
  static const std::array<double, 16> a = [] {
    std::array<double, 16> r{};
    const auto& w = gl16_f128_nodes(true);
    for (int i = 0; i < 16; ++i) r[i] = w[i].convert_to<double>();
    return r;
  }();
  return a;
}

AiryValue airy_series(double xd) {
  const f128 x = xd;
  const f128 x3 = x * x * x;
  f128 f = 1, fp = 0, g = x, gp = 1;
  f128 tf = 1, tg = x;
  for (int k = 1; k < 400; ++k) {
    tf *= x3 / (f128(3 * k - 1) * (3 * k));
    tg *= x3 / (f128(3 * k) * (3 * k + 1));
    f += tf;
    g += tg;
    if (xd != 0.0) {
      fp += tf * (3 * k) / x;
      gp += tg * (3 * k + 1) / x;
    }
    if (abs(tf) + abs(tg) < f128(1e-36) * (abs(f) + abs(g)) && k > 3) break;
  }
  const f128 c1 = f128("0.355028053887817239260063186004183176397979174199177");
  const f128 c2 = f128("0.258819403792806798405183560189203963479091138354934");
  AiryValue r;
  r.ai = (c1 * f - c2 * g).convert_to<double>();
  r.aip = (c1 * fp - c2 * gp).convert_to<double>();
  return r;
}

AiryValue airy_asymptotic(double x) {
  const auto& u = airy_u();
  AiryValue r;
  if (x > 0) {
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    double su = 0.0, sv = 0.0, pz = 1.0, prev = 1e300;
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double tu = u[k] * pz, tv = airy_v(static_cast<int>(k)) * pz;
      if (std::fabs(tu) > prev) break;
      prev = std::fabs(tu);
      const double sgn = (k % 2) ? -1.0 : 1.0;
      su += sgn * tu;
      sv += sgn * tv;
      if (std::fabs(tu) < 1e-18) break;
      pz /= zeta;
    }
    const double e = std::exp(-zeta) / (2.0 * std::sqrt(pi));
    const double q = std::pow(x, 0.25);
    r.ai = e / q * su;
    r.aip = -e * q * sv;
    return r;
  }
  const double X = -x;
  const double zeta = 2.0 / 3.0 * X * std::sqrt(X);
  double ue = 0.0, uo = 0.0, ve = 0.0, vo = 0.0, pz = 1.0, prev = 1e300;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double tu = u[k] * pz, tv = airy_v(static_cast<int>(k)) * pz;
    if (std::fabs(tu) > prev) break;
    prev = std::fabs(tu);
    const double sgn = ((k / 2) % 2) ? -1.0 : 1.0;
    if (k % 2 == 0) {
      ue += sgn * tu;
      ve += sgn * tv;
    } else {
      uo += sgn * tu;
      vo += sgn * tv;
    }
    if (std::fabs(tu) < 1e-18) break;
    pz /= zeta;
  }
  const double th = zeta - pi / 4.0;
  const double c = std::cos(th), s = std::sin(th);
  const double q = std::pow(X, 0.25);
  r.ai = (c * ue + s * uo) / (std::sqrt(pi) * q);
  r.aip = q / std::sqrt(pi) * (s * ve - c * vo);
  return r;
}

AiryValue airy(double x, double cutoff) {
  if (std::fabs(x) <= cutoff) return airy_series(x);
  return airy_asymptotic(x);
}

double bessel_j_oracle_quadrature(int n, double z, const OracleOptions& opt) {
  if (n < 0 || z < 0) throw DomainError("bessel_j_oracle: order and argument must be non-negative");
  const double want = std::ceil((n + z) * opt.panels_per_unit);
  if (want > static_cast<double>(opt.panel_budget))
    throw ResourceError("bessel_j_oracle: panel budget exceeded");
  const std::size_t panels = std::max<std::size_t>(8, static_cast<std::size_t>(want));
  if (opt.precision_bits <= 113) {
    return oracle_quadrature<f128>(n, f128(z), panels, gl16_f128_nodes(false), gl16_f128_nodes(true))
        .convert_to<double>();
  }
  PrecisionGuard pg(opt.precision_bits);
  static std::mutex mu;
  static std::map<unsigned, std::pair<std::vector<mpreal>, std::vector<mpreal>>> cache;
  std::pair<std::vector<mpreal>, std::vector<mpreal>> nodes;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(opt.precision_bits);
    if (it == cache.end()) {
      std::vector<mpreal> x, w;
      gauss_legendre<mpreal>(16, x, w, pow(mpreal(2), -static_cast<int>(opt.precision_bits) + 4));
      it = cache.emplace(opt.precision_bits, std::make_pair(x, w)).first;
    }
    nodes = it->second;
  }
  return oracle_quadrature<mpreal>(n, mpreal(z), panels, nodes.first, nodes.second).convert_to<double>();
}

double bessel_j_oracle_series(int n, double z, unsigned precision_bits) {
  if (n < 0 || z < 0) throw DomainError("bessel_j_oracle: order and argument must be non-negative");
  if (z == 0.0) return n == 0 ? 1.0 : 0.0;
  if (precision_bits <= 113) {
    auto [s, l] = series_parts<f128>(n, f128(z), f128(1e-36));
    return (s * exp(l)).convert_to<double>();
  }
  PrecisionGuard pg(precision_bits);
  auto [s, l] = series_parts<mpreal>(n, mpreal(z), pow(mpreal(2), -static_cast<int>(precision_bits)));
  return mpreal(s * exp(l)).convert_to<double>();
}

double bessel_j_oracle(int n, double z, const OracleOptions& opt) {
  if (n < 0 || z < 0) throw DomainError("bessel_j_oracle: order and argument must be non-negative");
  if (n > 1000000 || z > 1e8) throw DomainError("bessel_j_oracle: order or argument out of range");
  if (z == 0.0) return n == 0 ? 1.0 : 0.0;
  if (opt.allow_series && z * z <= 64.0 * (n + 1)) return bessel_j_oracle_series(n, z, opt.precision_bits);
  return bessel_j_oracle_quadrature(n, z, opt);
}

double log_abs_bessel_j_series(int n, double z) {
  if (z == 0.0) return n == 0 ? 0.0 : -INFINITY;
  const double loss = z * z / (2.0 * (n + 1)) / std::log(2.0);
  const unsigned bits = 128 + static_cast<unsigned>(std::ceil(loss));
  PrecisionGuard pg(bits);
  auto [s, l] = series_parts<mpreal>(n, mpreal(z), pow(mpreal(2), -static_cast<int>(bits)));
  return mpreal(log(abs(s)) + l).convert_to<double>();
}

double bessel_j(int n, double z) {
  if (n < 0) return (n % 2 ? -1.0 : 1.0) * bessel_j(-n, z);
  if (z < 0) return (n % 2 ? -1.0 : 1.0) * bessel_j(n, -z);
  if (z == 0.0) return n == 0 ? 1.0 : 0.0;
  if (z * z <= 4.0 * (n + 1)) return series_real_order(n, z);
  if (z > n) {
    double j0, j1;
    if (z >= 25.0) {
      hankel_j01(z, j0, j1);
    } else {
      j0 = miller(0, z);
      j1 = miller(1, z);
    }
    if (n == 0) return j0;
    double jm = j0, jc = j1;
    for (int m = 1; m < n; ++m) {
      const double jn = 2.0 * m / z * jc - jm;
      jm = jc;
      jc = jn;
    }
    return jc;
  }
  return miller(n, z);
}

std::vector<double> bessel_j_orders(int nmax, double z) {
  if (nmax < 0) throw DomainError("bessel_j_orders: nmax must be non-negative");
  std::vector<double> out(nmax + 1, 0.0);
  if (z == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (z < 0) throw DomainError("bessel_j_orders: z must be non-negative");
  const double top = std::max<double>(nmax, z);
  const int m = 2 * ((static_cast<int>(top + 12.0 * std::cbrt(top) + 30.0)) / 2 + 1);
  const double tox = 2.0 / z;
  double bjp = 0.0, bj = 1.0, sum = 0.0;
  bool jsum = false;
  for (int j = m; j > 0; --j) {
    const double bjm = j * tox * bj - bjp;
    bjp = bj;
    bj = bjm;
    if (std::fabs(bj) > 1e250) {
      bj *= 1e-250;
      bjp *= 1e-250;
      sum *= 1e-250;
      for (int i = j; i <= nmax; ++i) out[i] *= 1e-250;
    }
    if (jsum) sum += bj;
    jsum = !jsum;
    if (j - 1 <= nmax) out[j - 1] = bj;
  }
  sum = 2.0 * sum - bj;
  for (double& v : out) v /= sum;
  return out;
}

std::string regime_name(BesselRegime r) {
  switch (r) {
    case BesselRegime::series: return "series";
    case BesselRegime::langer_airy: return "langer-airy";
    case BesselRegime::quadrature_oracle: return "quadrature-oracle";
    case BesselRegime::airy_transition: return "airy-transition";
    case BesselRegime::oscillatory: return "oscillatory";
  }
  return "unknown";
}

double bessel_langer(double nu, double z) {
  if (z <= 0.0) return 0.0;
  static const double pref0 = std::cbrt(2.0) * std::pow(3.0, 1.0 / 6.0);
  const double pref = pref0 / std::cbrt(nu);
  if (z == nu) return std::cbrt(2.0) / std::cbrt(nu) * airy(0.0).ai;
  if (z < nu) {
    const double t = std::sqrt((nu - z) * (nu + z)) / nu;
    const double r = cubic_ratio(t, +1);
    const double d = r * t * t * t;
    const double arg = std::pow(1.5 * nu * d, 2.0 / 3.0);
    return pref * std::pow(r, 1.0 / 6.0) * airy(arg).ai;
  }
  const double s = std::sqrt((z - nu) * (z + nu)) / nu;
  const double r = cubic_ratio(s, -1);
  const double d = r * s * s * s;
  const double arg = -std::pow(1.5 * nu * d, 2.0 / 3.0);
  return pref * std::pow(r, 1.0 / 6.0) * airy(arg).ai;
}

double bessel_transition(double nu, double y) {
  const double c = std::cbrt(2.0);
  return c / std::cbrt(nu) * airy(-c * y).ai;
}

PhasePoint phase(double nu, double z) {
  if (!(z > nu)) throw DomainError("phase: requires z > nu");
  PhasePoint p;
  p.nu = nu;
  p.z = z;
  const double root = std::sqrt((z - nu) * (z + nu));
  const double s = root / nu;
  p.omega = nu * (cubic_ratio(s, -1) * s * s * s) - pi / 4.0;
  p.omega1 = root / z;
  p.omega2 = nu * nu / (z * z * root);
  return p;
}

double bessel_oscillatory(double nu, double z) {
  const PhasePoint p = phase(nu, z);
  const double root = std::sqrt((z - nu) * (z + nu));
  return std::sqrt(2.0 / pi) / std::sqrt(root) * std::cos(p.omega);
}

double langer_error(double nu, double C) { return C * std::pow(nu, -4.0 / 3.0); }

double transition_error(double nu, double y, double C) {
  return C * (1.0 + std::pow(std::fabs(y), 2.25)) / nu;
}

double oscillatory_error(double nu, double z, double C) {
  const double r2 = (z - nu) * (z + nu);
  return C * z * z / std::pow(r2, 1.75);
}

BesselEval bessel_j_uniform(double nu, double z, const UniformOptions& opt) {
  if (!(nu > 0) || z < 0) throw DomainError("bessel_j_uniform: requires nu > 0 and z >= 0");
  BesselEval e;
  if (nu < 30.0) {
    if (nu != std::floor(nu)) throw DomainError("bessel_j_uniform: non-integer order below 30");
    e.value = bessel_j_oracle(static_cast<int>(nu), z);
    e.regime = BesselRegime::quadrature_oracle;
    e.error_estimate = 1e-20;
    return e;
  }
  if (z * z <= nu + 1.0) {
    e.value = series_real_order(nu, z);
    e.regime = BesselRegime::series;
    // Relative error of exp() grows with the magnitude of its argument.
    const double expo = z > 0.0 ? std::fabs(nu * std::log(0.5 * z)) + std::lgamma(nu + 1.0) : 0.0;
    e.error_estimate = (8.0 + expo) * 2.2e-16 * std::fabs(e.value) + 1e-300;
    return e;
  }
  const double w = std::pow(nu, 0.6);
  const double osc_start = nu + std::pow(nu, 1.0 / 3.0 + opt.eps0);
  if (z <= nu - w) {
    e.value = bessel_langer(nu, z);
    e.regime = BesselRegime::langer_airy;
    e.error_estimate = langer_error(nu, opt.C);
    return e;
  }
  if (z <= nu + w || z < osc_start) {
    e.value = bessel_langer(nu, z);
    e.regime = std::fabs(z - nu) <= w ? BesselRegime::airy_transition : BesselRegime::langer_airy;
    e.error_estimate = langer_error(nu, opt.C);
    if (z >= osc_start) {
      const double o = bessel_oscillatory(nu, z);
      if (std::fabs(o - e.value) > e.error_estimate + oscillatory_error(nu, z, opt.C))
        throw ConsistencyError("bessel_j_uniform: overlapping formulas disagree");
    }
    return e;
  }
  e.value = bessel_oscillatory(nu, z);
  e.regime = BesselRegime::oscillatory;
  e.error_estimate = oscillatory_error(nu, z, opt.C);
  return e;
}

BoundSuiteResult bound_suite(int nu, double z, double C) {
  if (nu < 30) throw DomainError("bound_suite: requires nu >= 30");
  if (z < 0) throw DomainError("bound_suite: requires z >= 0");
  BoundSuiteResult r;
  r.nu = nu;
  r.z = z;
  r.C = C;
  const double J = std::fabs(bessel_j_oracle(nu, z));

  if (z <= (nu + 1.0) / 4.0) {
    auto& b = r.small_argument;
    b.applies = true;
    b.value = log_abs_bessel_j_series(nu, z);
    b.bound = z > 0 ? std::log(C) + 2.0 * std::log(z) - 14.0 * nu / 13.0 : -INFINITY;
    b.pass = (z == 0.0) || b.value <= b.bound;
    b.margin = z > 0 ? b.bound - b.value : INFINITY;
  }
  if (z < nu + 1.0) {
    const double dmax = std::log(nu + 1.0 - z) / std::log(nu + 1.0) - 1.0 / 3.0;
    if (dmax > 0.0) {
      const double delta = std::min(dmax, 2.0 / 3.0);
      r.delta = delta;
      auto& b = r.below_transition;
      b.applies = true;
      b.value = J;
      b.bound = C * std::exp(-std::pow(static_cast<double>(nu), delta));
      b.pass = J <= b.bound;
      b.margin = J > 0 ? b.bound / J : INFINITY;
    }
  }
  {
    auto& b = r.uniform;
    b.applies = true;
    b.value = J;
    b.bound = C * std::pow(static_cast<double>(nu), -1.0 / 3.0);
    b.pass = J <= b.bound;
    b.margin = J > 0 ? b.bound / J : INFINITY;
  }
  return r;
}

}  // namespace hml
