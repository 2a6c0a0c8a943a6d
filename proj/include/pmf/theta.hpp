#pragma once

// eta, theta and dilated theta expansions, theta blocks TB(phi) and
// quotients of dilated thetas, expanded through the Jacobi triple product.

#include <cctype>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pmf/arith.hpp"
#include "pmf/jacobi.hpp"
#include "pmf/series.hpp"

namespace pmf {

/// phi(0) is the eta exponent; phi(r), r >= 1, is the exponent of theta_r / eta.
struct ThetaBlockSpec {
  std::map<int, int> phi;

  int at(int r) const {
    auto it = phi.find(r);
    return it == phi.end() ? 0 : it->second;
  }
  bool without_denominator() const {
    for (const auto& [r, e] : phi)
      if (r >= 1 && e < 0) return false;
    return true;
  }
  /// "TB(k; r1,...,rj)" with repeated entries for multiplicities.
  std::string notation() const;
};

inline Rational tb_weight(const ThetaBlockSpec& s) { return make_rational(s.at(0), 2); }

inline Rational tb_index(const ThetaBlockSpec& s) {
  long long sum = 0;
  for (const auto& [r, e] : s.phi)
    if (r >= 1) sum += static_cast<long long>(r) * r * e;
  Rational q(big(sum), 2);
  q.canonicalize();
  return q;
}

/// q-exponent of the leading factor: phi(0)/24 + sum_{r>=1} phi(r)/12.
inline Rational tb_q_order(const ThetaBlockSpec& s) {
  long long thetas = 0;
  for (const auto& [r, e] : s.phi)
    if (r >= 1) thetas += e;
  Rational q = Rational(s.at(0), 24) + Rational(big(thetas), 12);
  q.canonicalize();
  return q;
}

inline bool tb_trivial_character(const ThetaBlockSpec& s) { return is_integer(tb_q_order(s)); }

inline std::string ThetaBlockSpec::notation() const {
  Rational k = tb_weight(*this);
  std::string out = "TB(" + k.get_str() + ";";
  bool first = true;
  for (const auto& [r, e] : phi) {
    if (r < 1) continue;
    if (e < 0) throw InvalidInput("TB notation cannot express a denominator");
    for (int i = 0; i < e; ++i) {
      out += (first ? " " : ",") + std::to_string(r);
      first = false;
    }
  }
  return out + ")";
}

namespace detail {

inline std::string strip_spaces(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

inline std::vector<long long> parse_int_list(const std::string& s, char sep) {
  std::vector<long long> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t next = s.find(sep, pos);
    std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    if (tok.empty()) throw InvalidInput("empty entry in list: " + s);
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      throw InvalidInput("not an integer: " + tok);
    }
    if (used != tok.size()) throw InvalidInput("not an integer: " + tok);
    out.push_back(v);
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace detail

/// Parses "TB(k; r1,r2,...)" (phi(0) = 2k, each listed r adds one to phi(r)).
inline ThetaBlockSpec parse_theta_block(const std::string& text) {
  std::string s = detail::strip_spaces(text);
  if (s.size() < 5 || s.compare(0, 3, "TB(") != 0 || s.back() != ')')
    throw InvalidInput("theta block must look like TB(k; r1,...): " + text);
  std::string body = s.substr(3, s.size() - 4);
  auto semi = body.find(';');
  ThetaBlockSpec spec;
  std::string kpart = semi == std::string::npos ? body : body.substr(0, semi);
  Rational k;
  try {
    k = Rational(kpart);
    k.canonicalize();
  } catch (const std::exception&) {
    throw InvalidInput("bad weight in theta block: " + text);
  }
  Rational twice = k * 2;
  if (!is_integer(twice)) throw InvalidInput("theta block weight must be a half-integer");
  spec.phi[0] = static_cast<int>(twice.get_num().get_si());
  if (semi != std::string::npos && semi + 1 < body.size()) {
    for (long long r : detail::parse_int_list(body.substr(semi + 1), ',')) {
      if (r < 1) throw InvalidInput("theta block entries must be positive");
      spec.phi[static_cast<int>(r)] += 1;
    }
  }
  if (spec.phi[0] == 0) spec.phi.erase(0);
  return spec;
}

/// Product of quotients theta_d / theta_e with e | d.
struct ThetaQuotientSpec {
  std::vector<std::pair<int, int>> factors;

  std::string notation() const {
    std::string out;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(factors[i].first) + "/" + std::to_string(factors[i].second);
    }
    return out;
  }
};

inline ThetaQuotientSpec parse_theta_quotient(const std::string& text) {
  std::string s = detail::strip_spaces(text);
  ThetaQuotientSpec spec;
  if (s.empty()) throw InvalidInput("empty theta quotient");
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t next = s.find(',', pos);
    std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    auto v = detail::parse_int_list(tok, '/');
    if (v.size() != 2 || v[0] < 1 || v[1] < 1) throw InvalidInput("theta quotient factor must be d/e: " + tok);
    spec.factors.emplace_back(static_cast<int>(v[0]), static_cast<int>(v[1]));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return spec;
}

inline Rational quotient_index(const ThetaQuotientSpec& s) {
  long long sum = 0;
  for (auto [d, e] : s.factors) sum += static_cast<long long>(d) * d - static_cast<long long>(e) * e;
  Rational q(big(sum), 2);
  q.canonicalize();
  return q;
}

/// eta(tau) = q^{1/24} prod (1 - q^n), steps below `precision`.
inline FourierSeries<BigInt> eta_expansion(int precision) {
  if (precision < 1) throw InvalidInput("eta_expansion: precision must be positive");
  std::vector<BigInt> c(precision, BigInt(0));
  c[0] = 1;
  for (int n = 1; n < precision; ++n)
    for (int M = precision - 1; M >= n; --M) c[M] -= c[M - n];
  FourierSeries<BigInt> s(precision, Rational(1, 24));
  for (int M = 0; M < precision; ++M) s.add_term(M, 0, c[M]);
  return s;
}

/// theta_r(tau, z) = sum_n (-1)^n q^{(n+1/2)^2/2} zeta^{r(n+1/2)}.
inline FourierSeries<BigInt> theta_expansion(int r, int precision) {
  if (r < 1) throw InvalidInput("theta_expansion: r must be positive");
  FourierSeries<BigInt> s(precision, Rational(1, 8));
  for (long long n = 0;; ++n) {
    long long step = n * (n + 1) / 2;
    if (step >= precision) break;
    BigInt sign = (n % 2 == 0) ? 1 : -1;
    // n and -n-1 share the q-exponent
    s.add_term(static_cast<int>(step), static_cast<int>(r * (2 * n + 1)), sign);
    s.add_term(static_cast<int>(step), static_cast<int>(-r * (2 * n + 1)), BigInt(-sign));
  }
  return s;
}

namespace detail {

/// prod_{n>=1} (1 - q^n zeta^zeta)^power
struct ProductFactor {
  int zeta;
  int power;
};

/// Dense expansion of q^{q_off} zeta^{z_off} * p0(zeta) * prod_n (1-q^n)^{eta_power}
/// * prod of ProductFactors, on q-steps below P.  p0 has integral exponents.
inline FourierSeries<BigInt> expand_product(int P, const Rational& q_off, const Rational& z_off,
                                            const std::map<long long, BigInt>& p0, int eta_power,
                                            const std::vector<ProductFactor>& factors) {
  if (P < 1) throw InvalidInput("expansion precision must be positive");
  // Bound on |zeta exponent| of every partial product.
  long long kmax = 0;
  while ((kmax + 1) * (kmax + 2) / 2 < P) ++kmax;
  long long R = 0;
  for (const auto& [e, c] : p0) R = std::max(R, e < 0 ? -e : e);
  for (const auto& f : factors) {
    long long z = f.zeta < 0 ? -f.zeta : f.zeta;
    long long pw = f.power < 0 ? -f.power : f.power;
    R += z * pw * (f.power > 0 ? kmax : P - 1);
  }
  const long long W = 2 * R + 1;
  std::vector<BigInt> a(static_cast<std::size_t>(P * W), BigInt(0));
  auto idx = [&](long long M, long long j) { return static_cast<std::size_t>(M * W + (j + R)); };
  for (const auto& [e, c] : p0) a[idx(0, e)] = c;

  auto apply = [&](int n, long long e, bool divide) {
    if (divide) {
      for (long long M = n; M < P; ++M) {
        long long lo = std::max(-R, -R + e), hi = std::min(R, R + e);
        for (long long j = lo; j <= hi; ++j) {
          const BigInt& src = a[idx(M - n, j - e)];
          if (sgn(src) != 0) a[idx(M, j)] += src;
        }
      }
    } else {
      for (long long M = P - 1; M >= n; --M) {
        long long lo = std::max(-R, -R + e), hi = std::min(R, R + e);
        for (long long j = lo; j <= hi; ++j) {
          const BigInt& src = a[idx(M - n, j - e)];
          if (sgn(src) != 0) a[idx(M, j)] -= src;
        }
      }
    }
  };
  for (const auto& f : factors) {
    if (f.power == 0) continue;
    for (int n = 1; n < P; ++n)
      for (int t = 0; t < (f.power < 0 ? -f.power : f.power); ++t) apply(n, f.zeta, f.power < 0);
  }

  // Pure-q factor applied as a final one-dimensional convolution.
  std::vector<BigInt> eta(P, BigInt(0));
  eta[0] = 1;
  for (int n = 1; n < P; ++n)
    for (int t = 0; t < (eta_power < 0 ? -eta_power : eta_power); ++t) {
      if (eta_power > 0) {
        for (int M = P - 1; M >= n; --M) eta[M] -= eta[M - n];
      } else {
        for (int M = n; M < P; ++M) eta[M] += eta[M - n];
      }
    }

  FourierSeries<BigInt> out(P, q_off, z_off);
  std::vector<BigInt> row(W);
  for (long long M = 0; M < P; ++M) {
    for (auto& x : row) x = 0;
    for (long long i = 0; i <= M; ++i) {
      if (sgn(eta[i]) == 0) continue;
      for (long long j = 0; j < W; ++j) {
        const BigInt& v = a[static_cast<std::size_t>((M - i) * W + j)];
        if (sgn(v) != 0) row[j] += eta[i] * v;
      }
    }
    for (long long j = 0; j < W; ++j)
      if (sgn(row[j]) != 0) out.add_term(static_cast<int>(M), static_cast<int>(2 * (j - R)), row[j]);
  }
  return out;
}

/// Exact quotient of Laurent polynomials num / den (integral exponents).
inline std::map<long long, BigInt> laurent_divide(std::map<long long, BigInt> num, const std::map<long long, BigInt>& den) {
  std::map<long long, BigInt> q;
  if (den.empty()) throw InvalidInput("division by zero polynomial");
  const long long dtop = den.rbegin()->first, dlow = den.begin()->first;
  const BigInt& lc = den.rbegin()->second;
  const long long floor_key = num.empty() ? 0 : num.begin()->first - dlow;
  while (!num.empty()) {
    auto top = *num.rbegin();
    long long shift = top.first - dtop;
    if (shift < floor_key || top.second % lc != 0) throw VerificationFailure("theta block q^0 factor is not a Laurent polynomial");
    BigInt f = top.second / lc;
    q[shift] += f;
    for (const auto& [e, c] : den) {
      BigInt& slot = num[e + shift];
      slot -= f * c;
      if (slot == 0) num.erase(e + shift);
    }
  }
  return q;
}

inline std::map<long long, BigInt> laurent_multiply(const std::map<long long, BigInt>& a, const std::map<long long, BigInt>& b) {
  std::map<long long, BigInt> out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      BigInt& slot = out[ea + eb];
      slot += ca * cb;
    }
  for (auto it = out.begin(); it != out.end();) {
    if (it->second == 0) it = out.erase(it); else ++it;
  }
  return out;
}

}  // namespace detail

/// Expansion of TB(phi) = eta^{phi(0)} prod_{r>=1} (theta_r / eta)^{phi(r)} on
/// q-steps below `precision` (relative to the q offset).
inline FourierSeries<BigInt> tb_expand(const ThetaBlockSpec& spec, int precision) {
  // theta_r / eta = q^{1/12} zeta^{r/2} (1 - zeta^{-r}) prod_n (1 - q^n zeta^r)(1 - q^n zeta^{-r})
  std::map<long long, BigInt> num{{0, BigInt(1)}}, den{{0, BigInt(1)}};
  std::vector<detail::ProductFactor> factors;
  Rational z_off = 0;
  for (const auto& [r, e] : spec.phi) {
    if (r < 1 || e == 0) continue;
    std::map<long long, BigInt> lin{{0, BigInt(1)}, {-r, BigInt(-1)}};
    for (int i = 0; i < (e < 0 ? -e : e); ++i) {
      if (e > 0) num = detail::laurent_multiply(num, lin);
      else den = detail::laurent_multiply(den, lin);
    }
    factors.push_back({r, e});
    factors.push_back({-r, e});
    z_off += Rational(static_cast<long>(r) * e, 2);
  }
  z_off.canonicalize();
  auto p0 = detail::laurent_divide(num, den);
  return detail::expand_product(precision, tb_q_order(spec), z_off, p0, spec.at(0), factors);
}

namespace detail {

inline Holomorphy classify(const JacobiExpansion& j) {
  auto d = j.min_discriminant();
  if (!d || *d > 0) return Holomorphy::Cusp;
  for (const auto& [k, c] : j.table())
    if (k.first < 0) return Holomorphy::WeaklyHolomorphic;
  return Holomorphy::Weak;
}

inline JacobiExpansion classified(const FourierSeries<BigInt>& s, int weight, int index) {
  JacobiExpansion tmp = jacobi_from_series(s, weight, index, Holomorphy::WeaklyHolomorphic);
  JacobiExpansion out = jacobi_from_series(s, weight, index, classify(tmp));
  return out;
}

}  // namespace detail

/// Theta block as a Jacobi coefficient table with c(n, r) for n < q_precision.
/// The holomorphy class is read off the computed coefficients.
inline JacobiExpansion tb_jacobi(const ThetaBlockSpec& spec, int q_precision) {
  Rational k = tb_weight(spec), m = tb_index(spec), qo = tb_q_order(spec);
  if (!is_integer(k) || !is_integer(m)) throw InvalidInput("theta block has non-integral weight or index");
  if (!tb_trivial_character(spec)) throw InvalidInput("theta block has a nontrivial character");
  long long off = qo.get_num().get_si();
  int steps = static_cast<int>(q_precision - off);
  if (steps < 1) steps = 1;
  auto s = tb_expand(spec, steps);
  auto j = detail::classified(s, static_cast<int>(k.get_num().get_si()), static_cast<int>(m.get_num().get_si()));
  j.provenance = spec.without_denominator() ? spec.notation() : "TB(phi)";
  return j;
}

/// Series of prod theta_d / theta_e (weight 0), q-steps below `precision`.
inline FourierSeries<BigInt> theta_quotient_series(const ThetaQuotientSpec& spec, int precision) {
  std::map<long long, BigInt> p0{{0, BigInt(1)}};
  std::vector<detail::ProductFactor> factors;
  Rational z_off = 0;
  for (auto [d, e] : spec.factors) {
    if (d < 1 || e < 1 || d % e != 0) throw InvalidInput("theta quotient factor needs e | d");
    if (d == e) continue;
    // (1 - zeta^{-d}) / (1 - zeta^{-e}) = sum_{j < d/e} zeta^{-je}
    std::map<long long, BigInt> g;
    for (int j = 0; j < d / e; ++j) g[-static_cast<long long>(j) * e] = 1;
    p0 = detail::laurent_multiply(p0, g);
    factors.push_back({d, 1});
    factors.push_back({-d, 1});
    factors.push_back({e, -1});
    factors.push_back({-e, -1});
    z_off += Rational(d - e, 2);
  }
  z_off.canonicalize();
  return detail::expand_product(precision, Rational(0), z_off, p0, 0, factors);
}

/// Weight-0 weakly holomorphic Jacobi form prod theta_d / theta_e with
/// c(n, r) for n < q_precision.
inline JacobiExpansion theta_quotient_expand(const ThetaQuotientSpec& spec, int q_precision) {
  Rational m = quotient_index(spec);
  if (!is_integer(m)) throw InvalidInput("theta quotient has non-integral index");
  auto s = theta_quotient_series(spec, q_precision);
  JacobiExpansion j = jacobi_from_series(s, 0, static_cast<int>(m.get_num().get_si()), Holomorphy::WeaklyHolomorphic);
  j.provenance = spec.notation();
  return j;
}

}  // namespace pmf
