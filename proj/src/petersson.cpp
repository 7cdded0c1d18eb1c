#include "hml/petersson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hml/errors.hpp"
#include "hml/kloosterman.hpp"
#include "hml/numeric.hpp"
#include "hml/specfun.hpp"

namespace hml {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kBesselAbsError = 1e-15;
const double kLogSkip = std::log(1e-40);

long euler_phi(long c) {
  long r = c, out = c;
  for (long p = 2; p * p <= r; ++p) {
    if (r % p != 0) continue;
    while (r % p == 0) r /= p;
    out -= out / p;
  }
  if (r > 1) out -= out / r;
  return out;
}

// log of 2 pi (A / 2c)^nu / nu!, a bound for one term of the c-sum.
double log_term_bound(double A, long c, double nu) {
  return std::log(2.0 * pi) + nu * std::log(A / (2.0 * static_cast<double>(c))) - std::lgamma(nu + 1.0);
}

double tail_after(double A, long C, double nu) {
  if (A == 0.0) return 0.0;
  const double lead = std::log(2.0 * pi) + nu * std::log(A / 2.0) - std::lgamma(nu + 1.0);
  if (C == 0) return std::exp(lead) * (1.0 + 1.0 / (nu - 1.0));
  return std::exp(lead + (1.0 - nu) * std::log(static_cast<double>(C)) - std::log(nu - 1.0));
}

struct Accum {
  long m = 0, n = 0;
  double A = 0.0;
  CompensatedSum sum;
  double rounding = 0.0;
  double abs_sum = 0.0;
  long c_used = 0;
  bool done = false;
};

void run_pairs(std::vector<Accum>& acc, int k, long c_max) {
  const double nu = k - 1.0;
  for (long c = 1; c <= c_max; ++c) {
    bool any = false;
    for (auto& a : acc) {
      if (a.done) continue;
      if (log_term_bound(a.A, c, nu) < kLogSkip) {
        a.done = true;
        continue;
      }
      any = true;
    }
    if (!any) break;
    const KloostermanModulus K(c);
    const double phi = static_cast<double>(euler_phi(c));
    for (auto& a : acc) {
      if (a.done) continue;
      const double S = K(a.m, a.n);
      const double J = bessel_j(k - 1, a.A / static_cast<double>(c));
      const double t = 2.0 * pi * S / static_cast<double>(c) * J;
      a.sum += t;
      a.abs_sum += std::fabs(t);
      a.rounding += 2.0 * pi * (phi * 2.0 * kEps * std::fabs(J) + std::fabs(S) * kBesselAbsError) / static_cast<double>(c) +
                    2.0 * kEps * std::fabs(t);
      a.c_used = c;
    }
  }
}

GeometricSide finish(const Accum& a, int k, long c_max) {
  GeometricSide g;
  const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
  const double off = a.sum.value();
  g.value = (a.m == a.n ? 1.0 : 0.0) + sign * off;
  g.tail_bound = tail_after(a.A, a.c_used, k - 1.0);
  g.rounding_bound = a.rounding + kEps * std::fabs(g.value);
  g.abs_sum = a.abs_sum;
  g.c_max = c_max;
  g.c_used = a.c_used;
  g.tail_uncertified = a.A / static_cast<double>(c_max) > k / 4.0;
  return g;
}

void check_args(long m, long n, int k, long c_max) {
  if (m < 1 || n < 1) throw DomainError("geometric_side: m and n must be positive");
  if (k < 12 || k % 2 != 0) throw ParameterError("geometric_side: weight must be even and >= 12");
  if (c_max < 1) throw ParameterError("geometric_side: c_max must be positive");
}

// One-sided Jacobi SVD: A (rows x cols) = U diag(s) V^T.
struct Svd {
  std::vector<std::vector<mpreal>> U;  // columns of A after rotation, U[j] is column j times s_j
  std::vector<std::vector<mpreal>> V;
  std::vector<mpreal> s;
};

Svd jacobi_svd(std::vector<std::vector<mpreal>> cols, const mpreal& tol) {
  const std::size_t d = cols.size();
  const std::size_t rows = cols.empty() ? 0 : cols[0].size();
  std::vector<std::vector<mpreal>> V(d, std::vector<mpreal>(d, mpreal(0)));
  for (std::size_t i = 0; i < d; ++i) V[i][i] = 1;
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) {
        mpreal alpha = 0, beta = 0, gamma = 0;
        for (std::size_t i = 0; i < rows; ++i) {
          alpha += cols[p][i] * cols[p][i];
          beta += cols[q][i] * cols[q][i];
          gamma += cols[p][i] * cols[q][i];
        }
        if (abs(gamma) <= tol * sqrt(alpha * beta)) continue;
        rotated = true;
        const mpreal zeta = (beta - alpha) / (2 * gamma);
        const mpreal t = (zeta >= 0 ? 1 : -1) / (abs(zeta) + sqrt(1 + zeta * zeta));
        const mpreal cs = 1 / sqrt(1 + t * t);
        const mpreal sn = cs * t;
        for (std::size_t i = 0; i < rows; ++i) {
          const mpreal x = cols[p][i], y = cols[q][i];
          cols[p][i] = cs * x - sn * y;
          cols[q][i] = sn * x + cs * y;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const mpreal x = V[i][p], y = V[i][q];
          V[i][p] = cs * x - sn * y;
          V[i][q] = sn * x + cs * y;
        }
      }
    if (!rotated) break;
  }
  Svd out;
  out.s.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    mpreal n2 = 0;
    for (std::size_t i = 0; i < rows; ++i) n2 += cols[j][i] * cols[j][i];
    out.s[j] = sqrt(n2);
  }
  out.U = std::move(cols);
  out.V = std::move(V);
  return out;
}

}  // namespace

long default_c_max(long m, long n, int k) {
  const double need = std::ceil(64.0 * pi * std::sqrt(static_cast<double>(m) * static_cast<double>(n)) / k) * 8.0;
  return std::max(1000L, static_cast<long>(need));
}

GeometricSide geometric_side(long m, long n, int k, long c_max) {
  check_args(m, n, k, c_max);
  std::vector<Accum> acc(1);
  acc[0].m = m;
  acc[0].n = n;
  acc[0].A = 4.0 * pi * std::sqrt(static_cast<double>(m) * static_cast<double>(n));
  run_pairs(acc, k, c_max);
  return finish(acc[0], k, c_max);
}

GeometricSide geometric_side(long m, long n, int k) { return geometric_side(m, n, k, default_c_max(m, n, k)); }

std::vector<std::vector<GeometricSide>> geometric_side_table(int M, int k, long c_max) {
  check_args(1, M, k, c_max);
  std::vector<Accum> acc;
  for (int m = 1; m <= M; ++m)
    for (int n = m; n <= M; ++n) {
      Accum a;
      a.m = m;
      a.n = n;
      a.A = 4.0 * pi * std::sqrt(static_cast<double>(m) * n);
      acc.push_back(a);
    }
  run_pairs(acc, k, c_max);
  std::vector<std::vector<GeometricSide>> out(M, std::vector<GeometricSide>(M));
  for (const auto& a : acc) {
    out[a.m - 1][a.n - 1] = finish(a, k, c_max);
    out[a.n - 1][a.m - 1] = out[a.m - 1][a.n - 1];
  }
  return out;
}

std::vector<GeometricSide> geometric_side_pairs(const std::vector<std::pair<long, long>>& pairs, int k, long c_max) {
  std::vector<Accum> acc;
  for (auto [m, n] : pairs) {
    check_args(m, n, k, c_max);
    Accum a;
    a.m = m;
    a.n = n;
    a.A = 4.0 * pi * std::sqrt(static_cast<double>(m) * static_cast<double>(n));
    acc.push_back(a);
  }
  run_pairs(acc, k, c_max);
  std::vector<GeometricSide> out;
  for (const auto& a : acc) out.push_back(finish(a, k, c_max));
  return out;
}

double HarmonicWeights::total() const {
  CompensatedSum s;
  for (double w : omegas) s += w;
  return s.value();
}

double spectral_side(long m, long n, const EigenBasis& basis, const HarmonicWeights& weights) {
  if (m < 1 || n < 1) throw DomainError("spectral_side: m and n must be positive");
  if (static_cast<std::size_t>(std::max(m, n)) > basis.N)
    throw TableError("spectral_side: index " + std::to_string(std::max(m, n)) + " exceeds table length " +
                     std::to_string(basis.N));
  if (static_cast<int>(weights.omegas.size()) != basis.d) throw ParameterError("spectral_side: weight count mismatch");
  CompensatedSum s;
  for (int f = 0; f < basis.d; ++f) s += weights.omegas[f] * (basis.lam(f, m) * basis.lam(f, n));
  return s.value();
}

HarmonicWeights recover_weights(const EigenBasis& basis, const WeightOptions& opt) {
  const int d = basis.d;
  const int P = opt.pair_budget > 0 ? opt.pair_budget : 2 * d;
  if (P < d) throw ParameterError("recover_weights: pair_budget must be at least the dimension");
  if (static_cast<std::size_t>(P) > basis.N) throw TableError("recover_weights: pair_budget exceeds table length");

  HarmonicWeights w;
  w.k = basis.k;

  std::vector<GeometricSide> rhs;
  for (int n = 1; n <= P; ++n) rhs.push_back(geometric_side(1, n, basis.k, opt.c_max > 0 ? opt.c_max : default_c_max(1, n, basis.k)));

  PrecisionGuard guard(opt.precision_bits);
  std::vector<std::vector<mpreal>> cols(d, std::vector<mpreal>(P));
  for (int f = 0; f < d; ++f)
    for (int i = 0; i < P; ++i) cols[f][i] = basis.lambda[f][i + 1];
  const Svd svd = jacobi_svd(cols, mpreal(std::ldexp(1.0, -static_cast<int>(opt.precision_bits) + 8)));

  mpreal smax = 0, smin = svd.s[0];
  for (const auto& s : svd.s) {
    smax = std::max(smax, s);
    smin = std::min(smin, s);
  }
  w.condition_number = smin > 0 ? static_cast<double>(smax / smin) : std::numeric_limits<double>::infinity();
  if (!(w.condition_number <= opt.max_condition))
    throw ConditioningError("recover_weights: design matrix condition number " + std::to_string(w.condition_number) +
                            " exceeds limit; use more or different fit pairs");

  // x = V diag(1/s^2) U^T b, with U columns unnormalised.
  std::vector<mpreal> coef(d);
  for (int j = 0; j < d; ++j) {
    mpreal dot = 0;
    for (int i = 0; i < P; ++i) dot += svd.U[j][i] * mpreal(rhs[i].value);
    coef[j] = dot / (svd.s[j] * svd.s[j]);
  }
  w.omegas.assign(d, 0.0);
  for (int f = 0; f < d; ++f) {
    mpreal x = 0;
    for (int j = 0; j < d; ++j) x += svd.V[f][j] * coef[j];
    w.omegas[f] = static_cast<double>(x);
  }
  for (int f = 0; f < d; ++f)
    if (!(w.omegas[f] > 0.0))
      throw ConsistencyError("recover_weights: non-positive weight for form " + std::to_string(f));

  double floor = 0.0;
  for (int i = 0; i < P; ++i) {
    const double s = spectral_side(1, i + 1, basis, w);
    w.in_sample_residual = std::max(w.in_sample_residual, std::fabs(s - rhs[i].value));
    floor = std::max(floor, rhs[i].rounding_bound + rhs[i].tail_bound);
    w.tail_bound = std::max(w.tail_bound, rhs[i].tail_bound);
    w.c_max = std::max(w.c_max, rhs[i].c_max);
  }
  w.in_sample_residual = std::max(w.in_sample_residual, floor);
  w.normalization_envelope = rhs[0].abs_sum + rhs[0].tail_bound;

  for (int m = 2; m <= 4; ++m)
    for (int n = m; n <= 4; ++n)
      if (static_cast<std::size_t>(n) <= basis.N) w.held_out.emplace_back(m, n);
  for (auto [m, n] : w.held_out) {
    const GeometricSide g = geometric_side(m, n, basis.k, opt.c_max > 0 ? opt.c_max : default_c_max(m, n, basis.k));
    w.tail_bound = std::max(w.tail_bound, g.tail_bound);
    w.fit_residual = std::max(w.fit_residual, std::fabs(spectral_side(m, n, basis, w) - g.value));
  }
  return w;
}

TraceResidual trace_residual(const EigenBasis& basis, const HarmonicWeights& weights, int M, long c_max) {
  if (static_cast<std::size_t>(M) > basis.N) throw TableError("trace_residual: M exceeds table length");
  const auto table = geometric_side_table(M, basis.k, c_max);
  TraceResidual r;
  for (int m = 1; m <= M; ++m)
    for (int n = m; n <= M; ++n) {
      const GeometricSide& g = table[m - 1][n - 1];
      const double e = std::fabs(spectral_side(m, n, basis, weights) - g.value);
      if (e >= r.residual) {
        r.residual = e;
        r.m = m;
        r.n = n;
      }
      r.tail_bound = std::max(r.tail_bound, g.tail_bound);
      r.tail_uncertified = r.tail_uncertified || g.tail_uncertified;
    }
  return r;
}

TraceResidual trace_residual(int k, int M, long c_max) {
  const EigenBasis basis = eigenforms(k, static_cast<std::size_t>(M) * M);
  WeightOptions opt;
  opt.c_max = c_max;
  return trace_residual(basis, recover_weights(basis, opt), M, c_max);
}

}  // namespace hml
