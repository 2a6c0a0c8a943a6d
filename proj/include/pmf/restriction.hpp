#pragma once

// Jacobi restriction: a putative paramodular form is a tuple of Jacobi cusp
// forms (phi_1, ..., phi_M) of indices N, 2N, ..., MN; its coefficients must
// agree along level-subgroup classes and satisfy the Fricke eigenform rule.
// The dimension of the solution space bounds dim S_k(K(N))^eps.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pmf/jacobi.hpp"
#include "pmf/linalg.hpp"
#include "pmf/quadform.hpp"

namespace pmf {

/// Jacobi coefficient position: c(n, r; phi_m), r reduced into (-mN, mN].
struct CoeffSlot {
  long long m, n, r;
  auto operator<=>(const CoeffSlot&) const = default;
};

struct Relation {
  enum class Kind { Siegel, Fricke };
  Kind kind;
  CoeffSlot a, b;
  int sign;  // a = sign * b; sign 0 means a = 0
};

struct RestrictionProblem {
  long long N{1};
  int k{2};
  int epsilon{1};
  int m_max{1};
  std::vector<std::vector<JacobiExpansion>> bases;  // bases[m-1]: index mN, weight k
  long long det_cap{0};
  long long field{kDefaultFieldPrime};  // 0 selects the rationals
  bool use_siegel{true};
  bool use_fricke{true};
};

inline CoeffSlot make_slot(long long n, long long r, long long m, long long N) {
  auto red = reduce_r(n, r, m * N);
  return {m, red.n, red.r == -m * N ? m * N : red.r};
}

/// Every positive-discriminant slot with m <= m_max and determinant <= cap.
inline std::vector<CoeffSlot> slots_up_to(long long N, int m_max, long long cap) {
  std::vector<CoeffSlot> out;
  for (long long m = 1; m <= m_max; ++m)
    for (long long r = -m * N + 1; r <= m * N; ++r)
      for (long long n = 1;; ++n) {
        long long D = 4 * n * m * N - r * r;
        if (D > cap) break;
        if (D > 0) out.push_back({m, n, r});
      }
  return out;
}

inline std::vector<Relation> build_relations(const RestrictionProblem& p) {
  if (p.epsilon != 1 && p.epsilon != -1) throw InvalidInput("epsilon must be +1 or -1");
  Level level(p.N);
  std::vector<Relation> out;
  if (p.use_siegel) {
    // group slots by class; chain consecutive members
    std::map<IndexForm, std::vector<std::pair<CoeffSlot, int>>> groups;
    for (const auto& s : slots_up_to(p.N, p.m_max, p.det_cap)) {
      auto ci = level.canonical({s.n, s.r, s.m});
      int sign = 1;
      if (p.k % 2 != 0) {
        if (ci.plus && ci.minus) sign = 0;
        else if (ci.minus) sign = -1;
      }
      groups[ci.key].push_back({s, sign});
    }
    for (const auto& [key, members] : groups) {
      for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& [s, sign] = members[i];
        if (sign == 0) {
          out.push_back({Relation::Kind::Siegel, s, s, 0});
        } else if (i > 0) {
          // a(s) = sign_s a(key), a(first) = sign_0 a(key)
          out.push_back({Relation::Kind::Siegel, s, members[0].first, sign * members[0].second});
        }
      }
    }
  }
  if (p.use_fricke) {
    std::set<std::pair<CoeffSlot, CoeffSlot>> seen;
    for (long long m = 1; m <= p.m_max; ++m)
      for (long long n = m; n <= p.m_max; ++n) {
        long long rb = isqrt(4 * n * m * p.N);
        for (long long r = (n == m ? 0 : -rb); r <= rb; ++r) {
          long long D = 4 * n * m * p.N - r * r;
          if (D <= 0 || D > p.det_cap) continue;
          auto a = make_slot(n, r, m, p.N), b = make_slot(m, -r, n, p.N);
          if (!seen.insert(std::minmax(a, b)).second) continue;
          out.push_back({Relation::Kind::Fricke, a, b, p.epsilon});
        }
      }
  }
  return out;
}

/// Coefficient of a slot for each basis element of its level.
inline std::vector<BigInt> slot_row(const RestrictionProblem& p, const CoeffSlot& s) {
  if (s.m < 1 || s.m > static_cast<long long>(p.bases.size())) throw InvalidInput("slot level outside the bases");
  std::vector<BigInt> v;
  for (const auto& b : p.bases[s.m - 1]) {
    if (!b.known(s.n, s.r))
      throw PrecisionShortfall("basis of index " + std::to_string(s.m * p.N) + " too short at (" +
                                   std::to_string(s.n) + "," + std::to_string(s.r) + ")",
                               reduce_r(s.n, s.r, s.m * p.N).n + 1);
    v.push_back(b.coeff(s.n, s.r));
  }
  return v;
}

inline ZMatrix constraint_matrix(const RestrictionProblem& p, const std::vector<Relation>& rels) {
  std::vector<std::size_t> offset{0};
  for (const auto& b : p.bases) offset.push_back(offset.back() + b.size());
  const std::size_t cols = offset.back();
  ZMatrix out;
  for (const auto& rel : rels) {
    std::vector<BigInt> row(cols, BigInt(0));
    auto a = slot_row(p, rel.a);
    for (std::size_t j = 0; j < a.size(); ++j) row[offset[rel.a.m - 1] + j] += a[j];
    if (rel.sign != 0) {
      auto b = slot_row(p, rel.b);
      for (std::size_t j = 0; j < b.size(); ++j) row[offset[rel.b.m - 1] + j] -= big(rel.sign) * b[j];
    }
    bool zero = true;
    for (const auto& x : row) zero = zero && x == 0;
    if (!zero) out.push_back(std::move(row));
  }
  return out;
}

struct RestrictionReport {
  std::size_t dim_bases{0};
  std::size_t relations{0};
  std::size_t rank{0};
  std::size_t bound{0};
};

inline RestrictionReport dim_bound(const RestrictionProblem& p) {
  if (static_cast<int>(p.bases.size()) < p.m_max) throw InvalidInput("need a basis for every index up to m_max*N");
  RestrictionReport rep;
  for (int m = 0; m < p.m_max; ++m) rep.dim_bases += p.bases[m].size();
  RestrictionProblem q = p;
  q.bases.resize(p.m_max);
  auto rels = build_relations(q);
  rep.relations = rels.size();
  auto mat = constraint_matrix(q, rels);
  if (mat.empty()) {
    rep.rank = 0;
  } else if (p.field == 0) {
    rep.rank = rank_q(mat);
  } else {
    if (!is_prime(p.field)) throw InvalidInput("field characteristic must be prime");
    rep.rank = rank_mod(to_mod(mat, p.field), p.field);
  }
  rep.bound = rep.dim_bases - rep.rank;
  return rep;
}

/// Basis of the solution space over the rationals as tuples (phi_1, ..., phi_M)
/// scaled to primitive integral coordinates.
inline std::vector<std::vector<JacobiExpansion>> extract_solution_basis(const RestrictionProblem& p) {
  if (p.field != 0) throw InvalidInput("solution extraction needs the rationals");
  RestrictionProblem q = p;
  q.bases.resize(p.m_max);
  std::size_t cols = 0;
  for (const auto& b : q.bases) cols += b.size();
  auto mat = constraint_matrix(q, build_relations(q));
  QMatrix qm;
  for (const auto& row : mat) {
    std::vector<Rational> r;
    for (const auto& x : row) r.emplace_back(x);
    qm.push_back(std::move(r));
  }
  auto ker = kernel(qm, cols);
  std::vector<std::vector<JacobiExpansion>> out;
  for (const auto& v : ker) {
    auto z = primitive_integer(v);
    std::vector<JacobiExpansion> tuple;
    std::size_t off = 0;
    for (const auto& b : q.bases) {
      JacobiExpansion phi(p.k, static_cast<int>(b.empty() ? 0 : b[0].index()), Holomorphy::Cusp,
                          b.empty() ? 0 : b[0].q_precision());
      for (std::size_t j = 0; j < b.size(); ++j)
        if (z[off + j] != 0) phi.axpy(z[off + j], b[j]);
      off += b.size();
      tuple.push_back(std::move(phi));
    }
    out.push_back(std::move(tuple));
  }
  return out;
}

/// Relations evaluated on an explicit tuple; returns the number violated.
inline std::size_t residual(const std::vector<Relation>& rels, const std::vector<JacobiExpansion>& tuple) {
  std::size_t bad = 0;
  for (const auto& rel : rels) {
    BigInt a = tuple.at(rel.a.m - 1).coeff(rel.a.n, rel.a.r);
    BigInt b = rel.sign == 0 ? BigInt(0) : tuple.at(rel.b.m - 1).coeff(rel.b.n, rel.b.r);
    if (a != big(rel.sign) * b) ++bad;
  }
  return bad;
}

}  // namespace pmf
