#pragma once

// Exact truncated two-variable series: q-expansions whose coefficients are
// Laurent polynomials in zeta.  Half-integral zeta exponents are stored with
// doubled keys; fractional q exponents live in a rational offset outside the
// integer-stepped table.

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pmf/arith.hpp"

namespace pmf {

/// Laurent polynomial in zeta.  Keys are 2 * (true exponent); zero
/// coefficients are never stored.
template <class C>
class ZetaPoly {
 public:
  using Map = std::map<int, C>;

  ZetaPoly() = default;
  static ZetaPoly monomial(int key2, const C& c) {
    ZetaPoly p;
    p.add(key2, c);
    return p;
  }

  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const Map& terms() const { return terms_; }
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }

  C at(int key2) const {
    auto it = terms_.find(key2);
    return it == terms_.end() ? C(0) : it->second;
  }

  void add(int key2, const C& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(key2, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  ZetaPoly& operator+=(const ZetaPoly& o) {
    for (const auto& [k, c] : o.terms_) add(k, c);
    return *this;
  }
  ZetaPoly& operator-=(const ZetaPoly& o) {
    for (const auto& [k, c] : o.terms_) add(k, -c);
    return *this;
  }
  ZetaPoly& operator*=(const C& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& kv : terms_) kv.second *= s;
    return *this;
  }

  friend ZetaPoly operator+(ZetaPoly a, const ZetaPoly& b) { return a += b; }
  friend ZetaPoly operator-(ZetaPoly a, const ZetaPoly& b) { return a -= b; }
  friend ZetaPoly operator*(const ZetaPoly& a, const ZetaPoly& b) {
    ZetaPoly r;
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) r.add(ka + kb, C(ca * cb));
    return r;
  }
  friend bool operator==(const ZetaPoly& a, const ZetaPoly& b) { return a.terms_ == b.terms_; }

  ZetaPoly shifted(int key2) const {
    ZetaPoly r;
    for (const auto& [k, c] : terms_) r.terms_.emplace(k + key2, c);
    return r;
  }
  ZetaPoly dilated(int factor) const {
    ZetaPoly r;
    for (const auto& [k, c] : terms_) r.add(k * factor, c);
    return r;
  }
  int min_key() const { return terms_.begin()->first; }
  int max_key() const { return terms_.rbegin()->first; }

 private:
  Map terms_;
};

/// Truncated series sum_{step} q^{q_offset + step} P_step(zeta) * zeta^{zeta_offset}.
/// Terms with step >= precision are unknown, not zero.
template <class C>
class FourierSeries {
 public:
  using Poly = ZetaPoly<C>;

  FourierSeries() = default;
  FourierSeries(int precision, Rational q_offset = 0, Rational zeta_offset = 0)
      : q_offset_(std::move(q_offset)), zeta_offset_(std::move(zeta_offset)), precision_(precision) {
    if (precision < 0) throw InvalidInput("FourierSeries: negative precision");
  }

  static FourierSeries one(int precision) {
    FourierSeries s(precision);
    if (precision > 0) s.add_term(0, 0, C(1));
    return s;
  }

  const Rational& q_offset() const { return q_offset_; }
  const Rational& zeta_offset() const { return zeta_offset_; }
  int precision() const { return precision_; }
  const std::map<int, Poly>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Coefficient at q-step `step` and doubled zeta key.
  C coeff(int step, int key2) const {
    auto it = terms_.find(step);
    return it == terms_.end() ? C(0) : it->second.at(key2);
  }
  const Poly* poly(int step) const {
    auto it = terms_.find(step);
    return it == terms_.end() ? nullptr : &it->second;
  }

  void add_term(int step, int key2, const C& c) {
    if (step < 0) throw InvalidInput("FourierSeries: negative q-step");
    if (step >= precision_ || c == 0) return;
    auto& p = terms_[step];
    p.add(key2, c);
    if (p.empty()) terms_.erase(step);
  }
  void add_poly(int step, const Poly& p) {
    if (step < 0) throw InvalidInput("FourierSeries: negative q-step");
    if (step >= precision_ || p.empty()) return;
    auto& q = terms_[step];
    q += p;
    if (q.empty()) terms_.erase(step);
  }

  /// Smallest step holding a nonzero term; precision() when the series is zero.
  int valuation() const { return terms_.empty() ? precision_ : terms_.begin()->first; }

  FourierSeries operator-() const {
    FourierSeries r = *this;
    for (auto& [s, p] : r.terms_) p *= C(-1);
    return r;
  }
  FourierSeries scaled(const C& s) const {
    FourierSeries r(precision_, q_offset_, zeta_offset_);
    if (s == 0) return r;
    r.terms_ = terms_;
    for (auto& [st, p] : r.terms_) p *= s;
    return r;
  }
  /// z -> factor * z.
  FourierSeries dilated(int factor) const {
    if (factor == 0) throw InvalidInput("dilation by zero");
    FourierSeries r(precision_, q_offset_, zeta_offset_ * factor);
    for (const auto& [s, p] : terms_) r.terms_.emplace(s, p.dilated(factor));
    return r;
  }
  /// Multiplies by zeta^{key2 / 2}.
  FourierSeries zeta_shifted(int key2) const {
    FourierSeries r(precision_, q_offset_, zeta_offset_);
    for (const auto& [s, p] : terms_) r.terms_.emplace(s, p.shifted(key2));
    return r;
  }
  /// Drops terms at or beyond `precision` (which may only shrink).
  FourierSeries truncated(int precision) const {
    FourierSeries r(std::min(precision, precision_), q_offset_, zeta_offset_);
    for (const auto& [s, p] : terms_)
      if (s < r.precision_) r.terms_.emplace(s, p);
    return r;
  }

  /// Moves an integral amount of the offset into the step table so that the
  /// leading step is 0.
  FourierSeries normalized() const {
    if (terms_.empty() || terms_.begin()->first == 0) return *this;
    int v = terms_.begin()->first;
    FourierSeries r(precision_ - v, q_offset_ + v, zeta_offset_);
    for (const auto& [s, p] : terms_) r.terms_.emplace(s - v, p);
    return r;
  }

  /// Absolute q-exponent up to which terms are known (exclusive).
  Rational abs_precision() const { return q_offset_ + precision_; }

  /// Re-expresses the series with a different q offset (must differ by an
  /// integer and not create negative steps) and a different zeta offset
  /// (must differ by a multiple of 1/2).
  FourierSeries realigned(const Rational& new_q_offset, const Rational& new_zeta_offset) const {
    Rational dq = q_offset_ - new_q_offset;
    Rational dz2 = (zeta_offset_ - new_zeta_offset) * 2;
    if (!is_integer(dq) || !is_integer(dz2)) throw InvalidInput("series offsets are not alignable");
    int shift = static_cast<int>(dq.get_num().get_si());
    int zshift = static_cast<int>(dz2.get_num().get_si());
    if (shift < 0 && !terms_.empty() && terms_.begin()->first + shift < 0)
      throw InvalidInput("realignment would create negative steps");
    FourierSeries r(std::max(0, precision_ + shift), new_q_offset, new_zeta_offset);
    for (const auto& [s, p] : terms_) r.terms_.emplace(s + shift, p.shifted(zshift));
    return r;
  }

  friend FourierSeries operator+(const FourierSeries& a, const FourierSeries& b) {
    Rational dq = a.q_offset_ - b.q_offset_;
    if (!is_integer(dq) || !is_integer((a.zeta_offset_ - b.zeta_offset_) * 2))
      throw InvalidInput("add: offsets are not alignable");
    Rational off = dq < 0 ? a.q_offset_ : b.q_offset_;
    Rational zoff = a.zeta_offset_ < b.zeta_offset_ ? a.zeta_offset_ : b.zeta_offset_;
    FourierSeries x = a.realigned(off, zoff), y = b.realigned(off, zoff);
    FourierSeries r(std::min(x.precision_, y.precision_), off, zoff);
    for (const auto& [s, p] : x.terms_) r.add_poly(s, p);
    for (const auto& [s, p] : y.terms_) r.add_poly(s, p);
    return r;
  }
  friend FourierSeries operator-(const FourierSeries& a, const FourierSeries& b) { return a + (-b); }

  friend FourierSeries operator*(const FourierSeries& a, const FourierSeries& b) {
    // Term (i, j) is valid when i < prec_a and j < prec_b; the product is
    // exact below min(prec_a + val_b, prec_b + val_a).
    int prec = std::min(a.precision_ + b.valuation(), b.precision_ + a.valuation());
    FourierSeries r(prec, a.q_offset_ + b.q_offset_, a.zeta_offset_ + b.zeta_offset_);
    for (const auto& [i, pa] : a.terms_) {
      if (i >= prec) break;
      for (const auto& [j, pb] : b.terms_) {
        if (i + j >= prec) break;
        r.add_poly(i + j, pa * pb);
      }
    }
    return r;
  }

  /// Equality of the represented truncated series on the common range of
  /// validity, comparing absolute exponents.
  friend bool operator==(const FourierSeries& a, const FourierSeries& b) {
    Rational dq = a.q_offset_ - b.q_offset_;
    if (!is_integer(dq) || !is_integer((a.zeta_offset_ - b.zeta_offset_) * 2)) {
      return a.is_zero() && b.is_zero();
    }
    Rational off = dq < 0 ? a.q_offset_ : b.q_offset_;
    Rational zoff = a.zeta_offset_ < b.zeta_offset_ ? a.zeta_offset_ : b.zeta_offset_;
    FourierSeries x = a.realigned(off, zoff), y = b.realigned(off, zoff);
    int prec = std::min(x.precision_, y.precision_);
    return x.truncated(prec).terms_ == y.truncated(prec).terms_;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << "q^(" << q_offset_ << ") zeta^(" << zeta_offset_ << ") [";
    bool first = true;
    for (const auto& [s, p] : terms_) {
      for (const auto& [k, c] : p) {
        if (!first) os << " + ";
        first = false;
        os << c << "*q^" << s << "*z^(" << k << "/2)";
      }
    }
    os << "] + O(q^" << precision_ << ")";
    return os.str();
  }

 private:
  Rational q_offset_{0};
  Rational zeta_offset_{0};
  int precision_{0};
  std::map<int, Poly> terms_;
};

namespace detail {

template <class C>
bool is_unit(const C& c) {
  if constexpr (std::is_same_v<C, BigInt>) {
    return c == 1 || c == -1;
  } else {
    return c != 0;
  }
}

}  // namespace detail

/// Multiplicative inverse of a series whose leading q-coefficient is a single
/// zeta monomial with invertible coefficient.
template <class C>
FourierSeries<C> invert(const FourierSeries<C>& a) {
  if (a.is_zero()) throw InvalidInput("invert: zero series");
  const int s = a.valuation();
  const auto& lead = *a.poly(s);
  if (lead.size() != 1 || !detail::is_unit(lead.begin()->second))
    throw InvalidInput("invert: leading coefficient is not a unit monomial");
  const int t = lead.begin()->first;
  const C c = lead.begin()->second;
  const int len = a.precision() - s;
  // b_0 = c^{-1} zeta^{-t};  b_n = -c^{-1} zeta^{-t} sum_{i=1..n} a_{s+i} b_{n-i}
  FourierSeries<C> b(len, -a.q_offset() - s, -a.zeta_offset());
  std::vector<typename FourierSeries<C>::Poly> coeffs(len);
  auto divide_lead = [&](typename FourierSeries<C>::Poly p) {
    typename FourierSeries<C>::Poly r;
    for (const auto& [k, v] : p) {
      if constexpr (std::is_same_v<C, BigInt>) {
        r.add(k - t, C(v * c));  // c = +-1 is its own inverse
      } else {
        r.add(k - t, C(v / c));
      }
    }
    return r;
  };
  for (int n = 0; n < len; ++n) {
    typename FourierSeries<C>::Poly acc;
    if (n == 0) {
      acc.add(0, C(1));
    } else {
      for (int i = 1; i <= n; ++i) {
        const auto* ai = a.poly(s + i);
        if (ai && !coeffs[n - i].empty()) acc -= (*ai) * coeffs[n - i];
      }
    }
    coeffs[n] = divide_lead(acc);
    b.add_poly(n, coeffs[n]);
  }
  return b;
}

/// Exact quotient num / den computed order by order; every per-order division
/// of Laurent polynomials must be exact.  Used for theta-block quotients whose
/// leading coefficient is not a monomial.
template <class C>
FourierSeries<C> divide_exact(const FourierSeries<C>& num, const FourierSeries<C>& den) {
  if (den.is_zero()) throw InvalidInput("divide_exact: zero divisor");
  const int s = den.valuation();
  const auto lead = *den.poly(s);
  const int lead_top = lead.max_key();
  const C lead_c = lead.at(lead_top);
  if (!detail::is_unit(lead_c)) throw InvalidInput("divide_exact: leading coefficient not a unit");
  int len = std::min(num.precision(), num.valuation() + den.precision() - s) - num.valuation();
  if (num.is_zero()) len = num.precision();
  const int v = num.is_zero() ? 0 : num.valuation();
  FourierSeries<C> out(std::max(0, len), num.q_offset() + v - den.q_offset() - s,
                       num.zeta_offset() - den.zeta_offset());
  std::vector<typename FourierSeries<C>::Poly> quo(std::max(0, len));
  for (int n = 0; n < len; ++n) {
    typename FourierSeries<C>::Poly rem;
    if (const auto* p = num.poly(v + n)) rem = *p;
    for (int i = 1; i <= n; ++i) {
      const auto* d = den.poly(s + i);
      if (d && !quo[n - i].empty()) rem -= (*d) * quo[n - i];
    }
    // Long division of rem by lead from the top degree down; the quotient
    // cannot have keys below rem.min_key() - lead.min_key().
    typename FourierSeries<C>::Poly q;
    const int floor_key = rem.empty() ? 0 : rem.min_key() - lead.min_key();
    while (!rem.empty()) {
      int shift = rem.max_key() - lead_top;
      if (shift < floor_key) throw VerificationFailure("divide_exact: division is not exact");
      C c = rem.at(rem.max_key());
      C f;
      if constexpr (std::is_same_v<C, BigInt>) {
        f = c * lead_c;
      } else {
        f = c / lead_c;
      }
      q.add(shift, f);
      typename FourierSeries<C>::Poly sub = lead.shifted(shift);
      sub *= f;
      rem -= sub;
    }
    quo[n] = q;
    out.add_poly(n, q);
  }
  return out;
}

/// exp(-a) for a series with no constant term, using n E_n = -sum i a_i E_{n-i}
/// in the q grading.  The q offset must be integral.
inline FourierSeries<Rational> exp_neg(const FourierSeries<Rational>& a) {
  if (!is_integer(a.q_offset())) throw InvalidInput("exp_neg: fractional q offset");
  if (a.zeta_offset() != 0) throw InvalidInput("exp_neg: nonzero zeta offset");
  const long off = a.q_offset().get_num().get_si();
  for (const auto& [s, p] : a.terms())
    if (off + s <= 0) throw InvalidInput("exp_neg: series has a nonpositive-order term");
  const int prec = static_cast<int>(off + a.precision());
  if (prec <= 0) return FourierSeries<Rational>(0);
  auto a_at = [&](int e) -> const ZetaPoly<Rational>* {
    long st = e - off;
    return st < 0 ? nullptr : a.poly(static_cast<int>(st));
  };
  std::vector<ZetaPoly<Rational>> e(prec);
  e[0].add(0, Rational(1));
  FourierSeries<Rational> out(prec);
  out.add_poly(0, e[0]);
  for (int n = 1; n < prec; ++n) {
    ZetaPoly<Rational> acc;
    for (int i = 1; i <= n; ++i) {
      const auto* ai = a_at(i);
      if (ai && !e[n - i].empty()) {
        ZetaPoly<Rational> t = (*ai) * e[n - i];
        t *= Rational(i);
        acc += t;
      }
    }
    acc *= Rational(-1, n);
    e[n] = acc;
    out.add_poly(n, acc);
  }
  return out;
}

/// exp(-a) for a power series in an outer grading variable (levels 0..L-1)
/// with coefficients in a ring R; requires a[0] == 0.  R must provide +, *,
/// and scaled(Rational).
template <class R>
std::vector<R> graded_exp_neg(const std::vector<R>& a, const R& one) {
  const std::size_t L = a.size();
  std::vector<R> e(L);
  if (L == 0) return e;
  e[0] = one;
  for (std::size_t n = 1; n < L; ++n) {
    R acc = a[1].scaled(Rational(0)) * e[0];
    bool started = false;
    for (std::size_t i = 1; i <= n; ++i) {
      R t = (a[i] * e[n - i]).scaled(Rational(static_cast<long>(i)));
      acc = started ? acc + t : t;
      started = true;
    }
    e[n] = acc.scaled(Rational(-1, static_cast<long>(n)));
  }
  return e;
}

template <class To, class From>
FourierSeries<To> convert(const FourierSeries<From>& s) {
  FourierSeries<To> r(s.precision(), s.q_offset(), s.zeta_offset());
  for (const auto& [st, p] : s.terms())
    for (const auto& [k, c] : p) {
      if constexpr (std::is_same_v<To, BigInt> && std::is_same_v<From, Rational>) {
        if (!is_integer(c)) throw VerificationFailure("series coefficient is not integral");
        r.add_term(st, k, c.get_num());
      } else {
        r.add_term(st, k, To(c));
      }
    }
  return r;
}

}  // namespace pmf
