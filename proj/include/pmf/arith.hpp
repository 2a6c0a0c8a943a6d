#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pmf {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Raised when an input violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a truncated object does not carry enough terms for a request.
/// `required` is the precision or determinant cap that would have sufficed.
class PrecisionShortfall : public std::runtime_error {
 public:
  PrecisionShortfall(const std::string& what, long long required)
      : std::runtime_error(what + " (required: " + std::to_string(required) + ")"),
        required_(required) {}
  long long required() const noexcept { return required_; }

 private:
  long long required_;
};

/// Raised when an exact consistency check fails (a certificate or an internal
/// invariant that the mathematics guarantees).
class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline long long ceil_div(long long a, long long b) { return -floor_div(-a, b); }

inline long long mod(long long a, long long m) {
  long long r = a % m;
  return r < 0 ? r + m : r;
}

inline long long gcd3(long long a, long long b, long long c) {
  return std::gcd(std::gcd(a, b), c);
}

/// Extended Euclid: returns g = gcd(a,b) >= 0 with x*a + y*b = g.
inline long long ext_gcd(long long a, long long b, long long& x, long long& y) {
  long long old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    long long q = old_r / r;
    long long tmp = old_r - q * r; old_r = r; r = tmp;
    tmp = old_s - q * s; old_s = s; s = tmp;
    tmp = old_t - q * t; old_t = t; t = tmp;
  }
  if (old_r < 0) { old_r = -old_r; old_s = -old_s; old_t = -old_t; }
  x = old_s;
  y = old_t;
  return old_r;
}

/// Least positive inverse of a modulo m (m >= 1). Throws if not invertible.
inline long long inv_mod(long long a, long long m) {
  if (m == 1) return 0;
  long long x, y;
  if (ext_gcd(mod(a, m), m, x, y) != 1) throw InvalidInput("inv_mod: not invertible");
  return mod(x, m);
}

inline long long pow_mod(long long b, long long e, long long m) {
  __int128 r = 1, x = mod(b, m);
  while (e > 0) {
    if (e & 1) r = r * x % m;
    x = x * x % m;
    e >>= 1;
  }
  return static_cast<long long>(r);
}

inline bool is_prime(long long n) {
  if (n < 2) return false;
  for (long long p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

inline std::vector<long long> prime_factors(long long n) {
  std::vector<long long> out;
  if (n < 0) n = -n;
  for (long long p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

inline bool is_squarefree(long long n) {
  if (n < 1) return false;
  for (long long p = 2; p * p <= n; ++p)
    if (n % (p * p) == 0) return false;
  return true;
}

inline std::vector<long long> divisors(long long n) {
  std::vector<long long> small, large;
  if (n < 0) n = -n;
  for (long long d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      small.push_back(d);
      if (d != n / d) large.push_back(n / d);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

inline long long sigma0(long long n) { return static_cast<long long>(divisors(n).size()); }

inline bool is_square(long long n, long long* root = nullptr) {
  if (n < 0) return false;
  long long s = static_cast<long long>(__builtin_sqrtl(static_cast<long double>(n)));
  while (s * s > n) --s;
  while ((s + 1) * (s + 1) <= n) ++s;
  if (root) *root = s;
  return s * s == n;
}

inline long long isqrt(long long n) {
  long long s = 0;
  is_square(n, &s);
  return s;
}

/// gmpxx has no long long constructor; long is 64-bit on supported targets.
inline BigInt big(long long v) { return BigInt(static_cast<long>(v)); }

inline BigInt ipow(const BigInt& b, unsigned long e) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

/// b^e for a possibly negative exponent, as an exact rational.
inline Rational rpow(long long b, long long e) {
  BigInt p = ipow(big(b), static_cast<unsigned long>(e < 0 ? -e : e));
  if (e >= 0) return Rational(p);
  Rational r(BigInt(1), p);
  r.canonicalize();
  return r;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline Rational make_rational(long long num, long long den) {
  Rational r(big(num), big(den));
  r.canonicalize();
  return r;
}

/// Reduces a rational into F_p; throws if p divides the denominator.
inline long long reduce_mod(const Rational& q, long long p) {
  BigInt den = q.get_den();
  BigInt dm = den % static_cast<long>(p);
  if (dm == 0) throw InvalidInput("field characteristic divides a denominator");
  BigInt nm = q.get_num() % static_cast<long>(p);
  long long n = nm.get_si(), d = dm.get_si();
  return mod(mod(n, p) * inv_mod(d, p), p);
}

inline std::string to_string(const Rational& q) { return q.get_str(); }
inline std::string to_string(const BigInt& z) { return z.get_str(); }

}  // namespace pmf
