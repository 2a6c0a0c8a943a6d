#pragma once

// Jacobi form expansions: coefficient tables c(n, r) stored on |r| <= m,
// translation-law lookups, singular parts, the index-raising operator V_l,
// coefficient-matrix ranks, and ingested dimension tables.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "pmf/arith.hpp"
#include "pmf/linalg.hpp"
#include "pmf/series.hpp"

namespace pmf {

enum class Holomorphy { Cusp, Weak, WeaklyHolomorphic };

inline std::string to_string(Holomorphy h) {
  switch (h) {
    case Holomorphy::Cusp: return "cusp";
    case Holomorphy::Weak: return "weak";
    default: return "weakly_holomorphic";
  }
}

inline Holomorphy parse_holomorphy(const std::string& s) {
  if (s == "cusp") return Holomorphy::Cusp;
  if (s == "weak") return Holomorphy::Weak;
  if (s == "weakly_holomorphic") return Holomorphy::WeaklyHolomorphic;
  throw InvalidInput("unknown holomorphy class: " + s);
}

struct ReducedIndex {
  long long n;
  long long r;
  long long lambda;
};

/// Translates (n, r) along c(n - lr + l^2 m, r - 2lm) = c(n, r) so that
/// |r'| <= m, choosing r' in (-m, m].
inline ReducedIndex reduce_r(long long n, long long r, long long m) {
  if (m < 1) throw InvalidInput("reduce_r: index must be positive");
  // lambda = round(r / 2m) with ties sending r' to +m
  long long lambda = floor_div(r + m - 1, 2 * m);
  long long r2 = r - 2 * lambda * m;
  long long n2 = n - lambda * r + lambda * lambda * m;
  return {n2, r2, lambda};
}

/// Coefficient table of a Jacobi form of weight k and index m.  Entries are
/// stored for |r| <= m and 0 <= n - (valuation) with n < q_precision; every
/// other (n, r) is resolved through the translation law.
class JacobiExpansion {
 public:
  JacobiExpansion() = default;
  JacobiExpansion(int weight, int index, Holomorphy cls, int q_precision)
      : weight_(weight), index_(index), cls_(cls), q_precision_(q_precision) {
    if (index < 0) throw InvalidInput("JacobiExpansion: negative index");
  }

  int weight() const { return weight_; }
  int index() const { return index_; }
  Holomorphy holomorphy() const { return cls_; }
  int q_precision() const { return q_precision_; }
  const std::map<std::pair<long long, long long>, BigInt>& table() const { return coeffs_; }
  std::string provenance;

  /// Smallest discriminant 4nm - r^2 carried by a nonzero coefficient.
  std::optional<long long> min_discriminant() const {
    std::optional<long long> best;
    for (const auto& [k, c] : coeffs_) {
      long long d = 4 * k.first * index_ - k.second * k.second;
      if (!best || d < *best) best = d;
    }
    return best;
  }

  void set(long long n, long long r, const BigInt& c) {
    if (index_ > 0 && (r > index_ || r < -index_)) throw InvalidInput("set: |r| exceeds the index");
    if (index_ > 0 && r == -index_) r = index_;  // same translation orbit
    if (n >= q_precision_) return;
    long long d = 4 * n * index_ - r * r;
    if (c != 0) {
      if (cls_ == Holomorphy::Cusp && d <= 0) throw InvalidInput("cusp form with nonpositive discriminant entry");
      if (cls_ == Holomorphy::Weak && n < 0) throw InvalidInput("weak form with negative q-order");
      coeffs_[{n, r}] = c;
    } else {
      coeffs_.erase({n, r});
    }
  }

  /// c(n, r) for arbitrary r; throws PrecisionShortfall when the reduced
  /// q-order is not covered by the stored table.
  BigInt coeff(long long n, long long r) const {
    long long n2 = n, r2 = r;
    if (index_ > 0) {
      auto red = reduce_r(n, r, index_);
      n2 = red.n;
      r2 = red.r;
    } else if (r != 0) {
      return 0;
    }
    if (n2 >= q_precision_) throw PrecisionShortfall("Jacobi coefficient beyond q-precision", n2 + 1);
    auto it = coeffs_.find({n2, r2});
    return it == coeffs_.end() ? BigInt(0) : it->second;
  }

  /// Whether c(n, r) is determined by the stored table.
  bool known(long long n, long long r) const {
    if (index_ == 0) return n < q_precision_;
    return reduce_r(n, r, index_).n < q_precision_;
  }

  /// Values at discriminant D = 4nm - r^2 in class rho mod 2m.
  BigInt coeff_by_discriminant(long long D, long long rho) const {
    long long m = index_;
    long long r = mod(rho, 2 * m);
    if (r > m) r -= 2 * m;
    long long num = D + r * r;
    if (mod(num, 4 * m) != 0) return 0;
    return coeff(num / (4 * m), r);
  }

  JacobiExpansion truncated(int q_precision) const {
    JacobiExpansion out(weight_, index_, cls_, std::min(q_precision, q_precision_));
    out.provenance = provenance;
    for (const auto& [k, c] : coeffs_)
      if (k.first < out.q_precision_) out.coeffs_.emplace(k, c);
    return out;
  }

  friend bool operator==(const JacobiExpansion& a, const JacobiExpansion& b) {
    return a.weight_ == b.weight_ && a.index_ == b.index_ && a.q_precision_ == b.q_precision_ &&
           a.coeffs_ == b.coeffs_;
  }

  JacobiExpansion& operator+=(const JacobiExpansion& o) { return axpy(BigInt(1), o); }
  /// this += s * o on the common precision.
  JacobiExpansion& axpy(const BigInt& s, const JacobiExpansion& o) {
    if (o.index_ != index_ || o.weight_ != weight_) throw InvalidInput("axpy: weight or index mismatch");
    q_precision_ = std::min(q_precision_, o.q_precision_);
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
      if (it->first.first >= q_precision_) it = coeffs_.erase(it); else ++it;
    }
    for (const auto& [k, c] : o.coeffs_) {
      if (k.first >= q_precision_) continue;
      BigInt v = coeff(k.first, k.second) + s * c;
      if (v == 0) coeffs_.erase(k); else coeffs_[k] = v;
    }
    if (cls_ != o.cls_) cls_ = std::max(cls_, o.cls_);
    return *this;
  }

 private:
  int weight_{0};
  int index_{0};
  Holomorphy cls_{Holomorphy::WeaklyHolomorphic};
  int q_precision_{0};
  std::map<std::pair<long long, long long>, BigInt> coeffs_;
};

/// Builds a Jacobi table from a series with integral q and zeta exponents,
/// keeping r in (-m, m].
/// The q-precision of the result is the absolute precision of the series.
inline JacobiExpansion jacobi_from_series(const FourierSeries<BigInt>& s, int weight, int index, Holomorphy cls) {
  if (!is_integer(s.q_offset()) || !is_integer(s.zeta_offset()))
    throw InvalidInput("series does not have integral exponents");
  const long off = s.q_offset().get_num().get_si();
  const long zoff = s.zeta_offset().get_num().get_si();
  JacobiExpansion j(weight, index, cls, static_cast<int>(off + s.precision()));
  for (const auto& [st, p] : s.terms())
    for (const auto& [k2, c] : p) {
      if (k2 % 2 != 0) throw InvalidInput("series has half-integral zeta exponents");
      long long r = k2 / 2 + zoff;
      if (index == 0 || (r > -index && r <= index)) j.set(off + st, r, c);
    }
  return j;
}

struct SingularTerm {
  long long n;
  long long r;
  BigInt c;
  friend bool operator==(const SingularTerm&, const SingularTerm&) = default;
};

/// All nonzero c(n, r) with 4nm - r^2 <= 0, |r| <= m, n <= m/4, sorted by (n, r).
inline std::vector<SingularTerm> singular_part(const JacobiExpansion& psi) {
  const long long m = psi.index();
  const long long nmax = m / 4;
  if (psi.q_precision() <= nmax)
    throw PrecisionShortfall("singular_part needs q-precision above index/4", nmax + 1);
  std::vector<SingularTerm> out;
  for (const auto& [k, c] : psi.table()) {
    auto [n, r] = k;
    if (n > nmax) continue;
    if (4 * n * m - r * r <= 0) out.push_back({n, r, c});
  }
  return out;
}

/// Index-raising operator: c'(n, r) = sum_{j | (n, r, l)} j^{k-1} c(n l / j^2, r / j).
inline JacobiExpansion apply_V(const JacobiExpansion& phi, int l) {
  if (l < 1) throw InvalidInput("apply_V: l must be positive");
  if (phi.weight() < 1) throw InvalidInput("apply_V: weight must be positive");
  if (phi.holomorphy() == Holomorphy::WeaklyHolomorphic) throw InvalidInput("apply_V: input must be holomorphic");
  const long long m = phi.index();
  const int prec = (phi.q_precision() - 1) / l + 1;
  JacobiExpansion out(phi.weight(), static_cast<int>(m * l), phi.holomorphy(), prec);
  out.provenance = phi.provenance.empty() ? "" : phi.provenance + "|V" + std::to_string(l);
  const long long ml = m * l;
  for (long long n = 0; n < prec; ++n)
    for (long long r = -ml + 1; r <= ml; ++r) {
      BigInt acc = 0;
      for (long long j : divisors(l)) {
        if (mod(n, j) != 0 || mod(r, j) != 0) continue;
        acc += ipow(big(j), phi.weight() - 1) * phi.coeff(n * l / (j * j), r / j);
      }
      if (acc != 0) out.set(n, r, acc);
    }
  return out;
}

/// Coefficient positions (n, r) with 0 <= n < q_precision, |r| <= m,
/// ordered by (n, r); the columns used for rank computations.
inline std::vector<std::pair<long long, long long>> coefficient_columns(int index, int q_precision) {
  std::vector<std::pair<long long, long long>> cols;
  for (long long n = 0; n < q_precision; ++n)
    for (long long r = -index; r <= index; ++r) cols.emplace_back(n, r);
  return cols;
}

inline ZMatrix coefficient_matrix(const std::vector<JacobiExpansion>& forms) {
  if (forms.empty()) return {};
  int prec = forms[0].q_precision();
  for (const auto& f : forms) {
    if (f.index() != forms[0].index() || f.weight() != forms[0].weight())
      throw InvalidInput("rank: forms must share weight and index");
    prec = std::min(prec, f.q_precision());
  }
  auto cols = coefficient_columns(forms[0].index(), prec);
  ZMatrix m(forms.size());
  for (std::size_t i = 0; i < forms.size(); ++i) {
    m[i].reserve(cols.size());
    for (auto [n, r] : cols) m[i].push_back(forms[i].coeff(n, r));
  }
  return m;
}

/// Rank of the coefficient matrix; field 0 means Q, otherwise F_field.
inline std::size_t rank(const std::vector<JacobiExpansion>& forms, long long field = kDefaultFieldPrime) {
  ZMatrix m = coefficient_matrix(forms);
  if (m.empty()) return 0;
  if (field == 0) return rank_q(m);
  if (!is_prime(field)) throw InvalidInput("field characteristic must be prime");
  return rank_mod(to_mod(m, field), field);
}

/// Jacobi basis with provenance strings; independence verified on construction.
struct JacobiBasis {
  int weight{0};
  int index{0};
  std::vector<JacobiExpansion> elements;

  static JacobiBasis make(std::vector<JacobiExpansion> elems) {
    JacobiBasis b;
    if (!elems.empty()) {
      b.weight = elems[0].weight();
      b.index = elems[0].index();
    }
    if (rank(elems, 0) != elems.size()) throw VerificationFailure("basis elements are linearly dependent");
    b.elements = std::move(elems);
    return b;
  }
};

/// Tabulated dimensions keyed by (weight, index).
class DimensionTable {
 public:
  struct Entry {
    long long dim;
    std::string source;
  };

  void insert(int k, int m, long long dim, std::string source) {
    if (dim < 0) throw InvalidInput("negative dimension");
    entries_[{k, m}] = {dim, std::move(source)};
  }

  long long lookup(int k, int m) const {
    auto it = entries_.find({k, m});
    if (it == entries_.end())
      throw InvalidInput("table gap: no dimension for weight " + std::to_string(k) + " index " + std::to_string(m));
    return it->second.dim;
  }
  const Entry& entry(int k, int m) const {
    lookup(k, m);
    return entries_.at({k, m});
  }
  bool contains(int k, int m) const { return entries_.count({k, m}) > 0; }
  std::size_t size() const { return entries_.size(); }

  static DimensionTable parse(std::istream& in) {
    DimensionTable t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      std::istringstream ls(line);
      int k, m;
      long long d;
      std::string src;
      if (!(ls >> k)) continue;
      if (!(ls >> m >> d >> src)) throw InvalidInput("malformed dimension table line " + std::to_string(lineno));
      t.insert(k, m, d, src);
    }
    return t;
  }
  static DimensionTable load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidInput("cannot open dimension table " + path);
    return parse(f);
  }

 private:
  std::map<std::pair<int, int>, Entry> entries_;
};

inline long long dim_lookup(int k, int m, const DimensionTable& t) { return t.lookup(k, m); }

}  // namespace pmf
