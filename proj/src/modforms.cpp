#include "hml/modforms.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hml/errors.hpp"
#include "hml/numeric.hpp"

namespace hml {

namespace {

std::vector<mpz> divisor_power_sums(int r, std::size_t N) {
  std::vector<mpz> s(N, 0);
  for (std::size_t d = 1; d < N; ++d) {
    mpz dp = boost::multiprecision::pow(mpz(d), r);
    for (std::size_t m = d; m < N; m += d) s[m] += dp;
  }
  return s;
}

double log2_abs(const mpz& v) {
  if (v == 0) return -1e300;
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, v.backend().data());
  return std::log2(std::fabs(mant)) + static_cast<double>(exp);
}

// Weight split k = 12 d + 4a + 6b used by the basis construction.
struct MillerShape {
  int d, a, b;
};

MillerShape miller_shape(int k) {
  const int r = k % 12;
  const int d = k / 12 - (r == 2 ? 1 : 0);
  const int rest = k - 12 * d;
  switch (rest) {
    case 0: return {d, 0, 0};
    case 4: return {d, 1, 0};
    case 6: return {d, 0, 1};
    case 8: return {d, 2, 0};
    case 10: return {d, 1, 1};
    case 14: return {d, 2, 1};
    default: throw ConsistencyError("miller_shape: unexpected residue");
  }
}

mpreal to_mpreal(const mpz& v) { return mpreal(v); }

mpreal horner(const std::vector<mpreal>& c, const mpreal& x) {
  mpreal acc = c.back();
  for (std::size_t i = c.size() - 1; i-- > 0;) acc = acc * x + c[i];
  return acc;
}

std::vector<mpreal> derivative(const std::vector<mpreal>& c) {
  std::vector<mpreal> d;
  for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * static_cast<long>(i));
  return d;
}

// Real roots of a real-rooted polynomial with simple roots, ascending.
std::vector<mpreal> real_roots(const std::vector<mpreal>& c, const mpreal& bound,
                               unsigned bits) {
  const std::size_t deg = c.size() - 1;
  if (deg == 0) return {};
  if (deg == 1) return {-c[0] / c[1]};
  std::vector<mpreal> crit = real_roots(derivative(c), bound, bits);
  std::vector<mpreal> edges;
  edges.push_back(-bound);
  for (auto& r : crit) edges.push_back(r);
  edges.push_back(bound);
  std::vector<mpreal> roots;
  const int iters = static_cast<int>(bits) + static_cast<int>(log2(bound).convert_to<double>()) + 16;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    mpreal lo = edges[i], hi = edges[i + 1];
    mpreal flo = horner(c, lo), fhi = horner(c, hi);
    if (flo == 0) {
      roots.push_back(lo);
      continue;
    }
    if (fhi == 0) {
      if (i + 2 == edges.size()) roots.push_back(hi);
      continue;
    }
    if ((flo > 0) == (fhi > 0))
      throw DegeneracyError("characteristic polynomial: repeated or non-real roots");
    for (int it = 0; it < iters; ++it) {
      mpreal mid = (lo + hi) / 2;
      if (mid == lo || mid == hi) break;
      mpreal fm = horner(c, mid);
      if (fm == 0) {
        lo = hi = mid;
        break;
      }
      if ((fm > 0) == (flo > 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    roots.push_back((lo + hi) / 2);
  }
  return roots;
}

// Null vector of a (numerically) rank-deficient square matrix, full pivoting.
std::vector<mpreal> null_vector(std::vector<std::vector<mpreal>> A) {
  const std::size_t n = A.size();
  std::vector<std::size_t> col(n);
  for (std::size_t j = 0; j < n; ++j) col[j] = j;
  for (std::size_t s = 0; s + 1 < n; ++s) {
    std::size_t pr = s, pc = s;
    mpreal best = 0;
    for (std::size_t i = s; i < n; ++i)
      for (std::size_t j = s; j < n; ++j) {
        mpreal a = abs(A[i][col[j]]);
        if (a > best) {
          best = a;
          pr = i;
          pc = j;
        }
      }
    std::swap(A[s], A[pr]);
    std::swap(col[s], col[pc]);
    if (best == 0) continue;
    for (std::size_t i = s + 1; i < n; ++i) {
      mpreal f = A[i][col[s]] / A[s][col[s]];
      for (std::size_t j = s; j < n; ++j) A[i][col[j]] -= f * A[s][col[j]];
    }
  }
  // Last pivot is the (near) zero one; set that unknown to 1.
  std::vector<mpreal> x(n, mpreal(0));
  x[col[n - 1]] = 1;
  for (std::size_t s = n - 1; s-- > 0;) {
    mpreal acc = 0;
    for (std::size_t j = s + 1; j < n; ++j) acc += A[s][col[j]] * x[col[j]];
    const mpreal& piv = A[s][col[s]];
    if (piv == 0) throw DegeneracyError("null_vector: eigenspace dimension exceeds one");
    x[col[s]] = -acc / piv;
  }
  return x;
}

double relative_residual(const IntMatrix& M, const std::vector<mpreal>& v, const mpreal& mu) {
  const std::size_t n = v.size();
  mpreal res = 0, mnorm = 0, vnorm = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mpreal row = 0, rowabs = 0;
    for (std::size_t j = 0; j < n; ++j) {
      mpreal mij = to_mpreal(M[i][j]);
      row += mij * v[j];
      rowabs += abs(mij);
    }
    res = std::max(res, mpreal(abs(row - mu * v[i])));
    mnorm = std::max(mnorm, rowabs);
    vnorm = std::max(vnorm, mpreal(abs(v[i])));
  }
  const mpreal denom = std::max(mnorm, mpreal(abs(mu))) * vnorm;
  if (denom == 0) return 0.0;
  return mpreal(res / denom).convert_to<double>();
}

}  // namespace

IntegerSeries multiply(const IntegerSeries& a, const IntegerSeries& b) {
  const std::size_t N = std::min(a.length(), b.length());
  IntegerSeries out;
  out.weight = a.weight + b.weight;
  out.coeffs.assign(N, 0);
  std::size_t a0 = 0, b0 = 0;
  while (a0 < N && a.coeffs[a0] == 0) ++a0;
  while (b0 < N && b.coeffs[b0] == 0) ++b0;
  for (std::size_t i = a0; i < N; ++i) {
    if (a.coeffs[i] == 0) continue;
    for (std::size_t j = b0; i + j < N; ++j) out.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
  }
  return out;
}

IntegerSeries power(const IntegerSeries& a, int e, std::size_t length) {
  IntegerSeries out;
  out.weight = 0;
  out.coeffs.assign(length, 0);
  if (length > 0) out.coeffs[0] = 1;
  IntegerSeries base = a;
  base.coeffs.resize(std::min(length, a.length()));
  out.coeffs.resize(base.length());
  while (e > 0) {
    if (e & 1) out = multiply(out, base);
    e >>= 1;
    if (e > 0) base = multiply(base, base);
  }
  return out;
}

IntegerSeries eisenstein(int k, std::size_t N) {
  if (k != 4 && k != 6) throw ParameterError("eisenstein: weight must be 4 or 6");
  if (N < 1) throw ParameterError("eisenstein: length must be at least 1");
  IntegerSeries e;
  e.weight = k;
  auto s = divisor_power_sums(k - 1, N);
  const long c = (k == 4) ? 240 : -504;
  e.coeffs.assign(N, 0);
  e.coeffs[0] = 1;
  for (std::size_t n = 1; n < N; ++n) e.coeffs[n] = c * s[n];
  return e;
}

IntegerSeries delta(std::size_t N) {
  if (N < 2) throw ParameterError("delta: length must be at least 2");
  const IntegerSeries e4 = eisenstein(4, N);
  const IntegerSeries e6 = eisenstein(6, N);
  const IntegerSeries e4c = multiply(multiply(e4, e4), e4);
  const IntegerSeries e6s = multiply(e6, e6);
  IntegerSeries d;
  d.weight = 12;
  d.coeffs.assign(N, 0);
  for (std::size_t n = 0; n < N; ++n) {
    mpz diff = e4c.coeffs[n] - e6s.coeffs[n];
    if (diff % 1728 != 0) throw ConsistencyError("delta: division by 1728 is not exact");
    d.coeffs[n] = diff / 1728;
  }
  return d;
}

int cusp_dimension_oracle(int k) {
  if (k < 12 || k % 2 != 0) return 0;
  const int w = k - 12;
  int count = 0;
  for (int a = 0; 4 * a <= w; ++a)
    if ((w - 4 * a) % 6 == 0) ++count;
  return count;
}

MillerBasis miller_basis(int k, std::size_t N) {
  if (k < 12 || k % 2 != 0) throw ParameterError("miller_basis: weight must be even and >= 12");
  const MillerShape sh = miller_shape(k);
  const int d = sh.d;
  if (N < static_cast<std::size_t>(d) + 1)
    throw ParameterError("miller_basis: length must exceed the dimension");

  const IntegerSeries e4 = eisenstein(4, N);
  const IntegerSeries e6 = eisenstein(6, N);
  const IntegerSeries dl = delta(std::max<std::size_t>(N, 2));
  IntegerSeries dlt = dl;
  dlt.coeffs.resize(N);

  IntegerSeries base = power(e4, sh.a, N);
  if (sh.b) base = multiply(base, e6);
  const IntegerSeries e6sq = multiply(e6, e6);

  std::vector<IntegerSeries> e6pow(d);  // e6pow[m] = E6^(2m)
  if (d > 0) {
    e6pow[0] = power(e6sq, 0, N);
    for (int m = 1; m < d; ++m) e6pow[m] = multiply(e6pow[m - 1], e6sq);
  }

  std::vector<IntegerSeries> g(d + 1);
  IntegerSeries dpow = dlt;
  for (int j = 1; j <= d; ++j) {
    if (j > 1) dpow = multiply(dpow, dlt);
    g[j] = multiply(multiply(dpow, e6pow[d - j]), base);
    g[j].weight = k;
  }
  for (int j = d; j >= 1; --j) {
    for (int i = j + 1; i <= d; ++i) {
      const mpz c = g[j].coeffs[i];
      if (c == 0) continue;
      for (std::size_t n = 0; n < N; ++n) g[j].coeffs[n] -= c * g[i].coeffs[n];
    }
  }
  MillerBasis mb;
  mb.k = k;
  mb.d = d;
  for (int j = 1; j <= d; ++j) mb.forms.push_back(std::move(g[j]));
  return mb;
}

IntMatrix hecke_matrix(int k, int p, const MillerBasis& basis) {
  const int d = basis.d;
  if (basis.length() < static_cast<std::size_t>(p) * d + 1)
    throw ParameterError("hecke_matrix: series too short for this prime");
  const mpz pk = boost::multiprecision::pow(mpz(p), k - 1);
  IntMatrix M(d, std::vector<mpz>(d, 0));
  for (int i = 0; i < d; ++i) {
    const int n = i + 1;
    for (int j = 0; j < d; ++j) {
      mpz v = basis.forms[j].coeffs[static_cast<std::size_t>(p) * n];
      if (n % p == 0) v += pk * basis.forms[j].coeffs[n / p];
      M[i][j] = v;
    }
  }
  return M;
}

std::vector<mpz> characteristic_polynomial(const IntMatrix& M) {
  const std::size_t n = M.size();
  std::vector<mpz> c(n + 1, 0);
  c[n] = 1;
  if (n == 0) return c;
  IntMatrix A = M;  // A_1 = M
  for (std::size_t step = 1; step <= n; ++step) {
    mpz tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += A[i][i];
    if (tr % static_cast<long>(step) != 0)
      throw ConsistencyError("characteristic_polynomial: inexact division");
    c[n - step] = -tr / static_cast<long>(step);
    if (step == n) break;
    IntMatrix B = A;
    for (std::size_t i = 0; i < n; ++i) B[i][i] += c[n - step];
    IntMatrix next(n, std::vector<mpz>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) {
        if (M[i][l] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) next[i][j] += M[i][l] * B[l][j];
      }
    A = std::move(next);
  }
  return c;
}

EigenBasis eigenforms(int k, std::size_t N, unsigned precision_bits) {
  if (k < 12 || k % 2 != 0) throw ParameterError("eigenforms: weight must be even and >= 12");
  if (N < 2) throw ParameterError("eigenforms: table length must be at least 2");
  if (precision_bits < 64) throw ParameterError("eigenforms: precision_bits must be >= 64");
  const int d = miller_shape(k).d;
  if (d == 0) throw ParameterError("eigenforms: no cusp forms of this weight");

  const std::size_t L = std::max<std::size_t>(N + 1, 3 * static_cast<std::size_t>(d) + 1);
  const MillerBasis basis = miller_basis(k, L);
  const IntMatrix M2 = hecke_matrix(k, 2, basis);
  const IntMatrix M3 = hecke_matrix(k, 3, basis);

  // Guard bits: cancellation in sum_i v_i b_i(n) relative to n^((k-1)/2),
  // with |v_i| bounded through the divisor bound on a_f(i).
  const double half = 0.5 * (k - 1);
  double vmax = 0.0;
  for (int i = 1; i <= d; ++i)
    vmax = std::max(vmax, half * std::log2(static_cast<double>(i)) +
                              std::log2(static_cast<double>(divisor_count(i))));
  double grow = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    double bm = -1e300;
    for (int i = 0; i < d; ++i) bm = std::max(bm, log2_abs(basis.forms[i].coeffs[n]));
    grow = std::max(grow, bm - half * std::log2(static_cast<double>(n)));
  }
  const unsigned guard = 64 + static_cast<unsigned>(std::ceil(grow + vmax + std::log2(d + 1.0)));
  const unsigned work_bits = precision_bits + guard;

  EigenBasis eb;
  eb.k = k;
  eb.d = d;
  eb.N = N;
  eb.precision_bits = precision_bits;

  std::vector<std::vector<mpreal>> vecs;
  std::vector<mpreal> evals;
  double worst = 0.0, worst3 = 0.0;
  {
    PrecisionGuard pg(work_bits);
    const std::vector<mpz> cp = characteristic_polynomial(M2);
    std::vector<mpreal> c;
    for (auto& v : cp) c.push_back(to_mpreal(v));
    // Fujiwara bound on root moduli.
    mpreal bound = 0;
    for (int i = 1; i <= d; ++i) {
      mpreal a = abs(c[d - i]);
      if (a == 0) continue;
      mpreal r = pow(a, mpreal(1) / i);
      if (r > bound) bound = r;
    }
    bound = 2 * bound + 1;
    evals = real_roots(c, bound, work_bits);
    if (static_cast<int>(evals.size()) != d)
      throw DegeneracyError("eigenforms: could not isolate all eigenvalues of T_2");
    std::sort(evals.begin(), evals.end());
    mpreal scale = 0;
    for (auto& e : evals) scale = std::max(scale, mpreal(abs(e)));
    for (int i = 0; i + 1 < d; ++i) {
      mpreal gap = evals[i + 1] - evals[i];
      if (gap <= scale * pow(mpreal(2), -static_cast<int>(precision_bits / 2)))
        throw DegeneracyError("eigenforms: T_2 eigenvalues collide within tolerance for k=" +
                              std::to_string(k));
    }
    for (int f = 0; f < d; ++f) {
      std::vector<std::vector<mpreal>> A(d, std::vector<mpreal>(d));
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A[i][j] = to_mpreal(M2[i][j]) - (i == j ? evals[f] : mpreal(0));
      std::vector<mpreal> v = d == 1 ? std::vector<mpreal>{mpreal(1)} : null_vector(A);
      if (v[0] == 0) throw ConsistencyError("eigenforms: eigenvector with vanishing first coefficient");
      const mpreal v0 = v[0];
      for (auto& x : v) x /= v0;
      worst = std::max(worst, relative_residual(M2, v, evals[f]));
      mpreal a3 = 0;
      for (int i = 0; i < d; ++i) a3 += v[i] * to_mpreal(basis.forms[i].coeffs[3]);
      worst3 = std::max(worst3, relative_residual(M3, v, a3));
      vecs.push_back(std::move(v));
    }

    const double unit = std::ldexp(1.0, -static_cast<int>(precision_bits));
    if (worst > unit)
      throw PrecisionError("eigenforms: eigenvector residual " + std::to_string(worst) +
                           " exceeds working precision; raise precision_bits");

    eb.lambda.assign(d, std::vector<mpreal>(N + 1));
    for (int f = 0; f < d; ++f) {
      for (std::size_t n = 1; n <= N; ++n) {
        mpreal a = 0;
        for (int i = 0; i < d; ++i) a += vecs[f][i] * to_mpreal(basis.forms[i].coeffs[n]);
        mpreal norm = to_mpreal(boost::multiprecision::pow(mpz(n), (k - 2) / 2)) * sqrt(mpreal(n));
        eb.lambda[f][n] = a / norm;
      }
      eb.lambda[f][1] = 1;
    }
    eb.eigen_residual = std::max(worst, unit);
    eb.t3_residual = worst3;
  }
  {
    const unsigned d10 = bits_to_digits10(precision_bits);
    for (auto& row : eb.lambda)
      for (auto& x : row) x.precision(d10);
  }
  eb.lambda_d.assign(d, std::vector<double>(N + 1, 0.0));
  for (int f = 0; f < d; ++f)
    for (std::size_t n = 1; n <= N; ++n) eb.lambda_d[f][n] = eb.lambda[f][n].convert_to<double>();
  return eb;
}

mpreal hecke_consistency(const EigenBasis& basis, int M) {
  if (static_cast<std::size_t>(M) * M > basis.N)
    throw TableError("hecke_consistency: M^2 exceeds the eigenvalue table length");
  PrecisionGuard pg(basis.precision_bits);
  mpreal worst = 0;
  for (int f = 0; f < basis.d; ++f) {
    const auto& l = basis.lambda[f];
    for (int m = 1; m <= M; ++m)
      for (int n = 1; n <= M; ++n) {
        const long g = gcd(m, n);
        mpreal rhs = 0;
        for (long e = 1; e <= g; ++e)
          if (g % e == 0) rhs += l[static_cast<std::size_t>(m) * n / (e * e)];
        mpreal r = abs(l[m] * l[n] - rhs);
        if (r > worst) worst = r;
      }
  }
  return worst;
}

double sum_S(double x, const EigenBasis& basis, int f) {
  if (x < 0) throw DomainError("sum_S: x must be non-negative");
  const long lo = static_cast<long>(std::floor(x)) + 1;
  const long hi = static_cast<long>(std::floor(2.0 * x));
  if (hi > static_cast<long>(basis.N)) throw TableError("sum_S: 2x exceeds the eigenvalue table length");
  CompensatedSum s;
  for (long n = lo; n <= hi; ++n) s += basis.lambda_d[f][n];
  return s.value();
}

std::string cache_file_name(int k, std::size_t N, unsigned precision_bits) {
  return "eigen_k" + std::to_string(k) + "_N" + std::to_string(N) + "_p" +
         std::to_string(precision_bits) + ".json";
}

void save_eigenbasis(const EigenBasis& basis, const std::string& path) {
  nlohmann::json j;
  j["version"] = 1;
  j["k"] = basis.k;
  j["d"] = basis.d;
  j["N"] = basis.N;
  j["precision_bits"] = basis.precision_bits;
  j["eigen_residual"] = basis.eigen_residual;
  const int digits = static_cast<int>(bits_to_digits10(basis.precision_bits)) + 2;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : basis.lambda) {
    nlohmann::json r = nlohmann::json::array();
    for (std::size_t n = 1; n < row.size(); ++n) r.push_back(row[n].str(digits, std::ios_base::scientific));
    rows.push_back(std::move(r));
  }
  j["lambda"] = std::move(rows);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ResourceError("save_eigenbasis: cannot write " + tmp);
    out << j.dump() << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::optional<EigenBasis> load_eigenbasis(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (j.value("version", 0) != 1) return std::nullopt;
  EigenBasis eb;
  eb.k = j.at("k");
  eb.d = j.at("d");
  eb.N = j.at("N");
  eb.precision_bits = j.at("precision_bits");
  eb.eigen_residual = j.at("eigen_residual");
  PrecisionGuard pg(eb.precision_bits);
  const auto& rows = j.at("lambda");
  if (static_cast<int>(rows.size()) != eb.d) return std::nullopt;
  for (const auto& r : rows) {
    if (r.size() != eb.N) return std::nullopt;
    std::vector<mpreal> row(eb.N + 1, mpreal(0));
    for (std::size_t n = 1; n <= eb.N; ++n) row[n] = mpreal(r[n - 1].get<std::string>());
    eb.lambda.push_back(std::move(row));
  }
  eb.lambda_d.assign(eb.d, std::vector<double>(eb.N + 1, 0.0));
  for (int f = 0; f < eb.d; ++f)
    for (std::size_t n = 1; n <= eb.N; ++n) eb.lambda_d[f][n] = eb.lambda[f][n].convert_to<double>();
  return eb;
}

EigenBasis cached_eigenforms(int k, std::size_t N, unsigned precision_bits,
                             const std::string& cache_dir, bool allow_compute) {
  std::filesystem::path p;
  if (!cache_dir.empty()) {
    p = std::filesystem::path(cache_dir) / cache_file_name(k, N, precision_bits);
    if (auto eb = load_eigenbasis(p.string())) return *eb;
  }
  if (!allow_compute)
    throw ResourceError("eigendata cache miss for k=" + std::to_string(k) + ", N=" + std::to_string(N));
  EigenBasis eb = eigenforms(k, N, precision_bits);
  if (!cache_dir.empty()) {
    std::filesystem::create_directories(cache_dir);
    save_eigenbasis(eb, p.string());
  }
  return eb;
}

}  // namespace hml
