#pragma once

// Building and re-verifying Borcherds-product certificates.  Verification
// works from the stored singular part and the theta-block basis only.

#include <string>
#include <vector>

#include "pmf/borcherds.hpp"
#include "pmf/io.hpp"
#include "pmf/theta.hpp"

namespace pmf {

/// Theta block read off the q^0 row of psi: phi(0) = c(0,0), phi(r) = c(0,r).
inline ThetaBlockSpec leading_theta_block(const std::vector<SingularTerm>& singular) {
  ThetaBlockSpec spec;
  for (const auto& t : singular) {
    if (t.n != 0 || t.r < 0) continue;
    if (!t.c.fits_sint_p()) throw InvalidInput("leading exponent out of range");
    int e = static_cast<int>(t.c.get_si());
    if (e < 0) throw InvalidInput("negative leading exponent: the leading Fourier-Jacobi coefficient is not a theta block");
    if (e != 0) spec.phi[static_cast<int>(t.r)] = e;
  }
  return spec;
}

/// Weight-0 expansion carrying exactly the singular terms.
inline JacobiExpansion from_singular(const std::vector<SingularTerm>& singular, long long N) {
  JacobiExpansion psi(0, static_cast<int>(N), Holomorphy::WeaklyHolomorphic, static_cast<int>(N / 4 + 1));
  for (const auto& t : singular) psi.set(t.n, t.r, t.c);
  return psi;
}

inline JacobiExpansion combine_theta_blocks(const std::vector<std::string>& basis, const std::vector<BigInt>& comb,
                                            int q_precision) {
  if (basis.empty() || basis.size() != comb.size()) throw InvalidInput("basis and combination lengths differ");
  std::optional<JacobiExpansion> acc;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    auto b = tb_jacobi(parse_theta_block(basis[i]), q_precision);
    if (!acc) {
      acc = JacobiExpansion(b.weight(), b.index(), b.holomorphy(), b.q_precision());
    }
    acc->axpy(comb[i], b);
  }
  acc->provenance = basis.size() == 1 && comb[0] == 1 ? basis[0] : "";
  return *acc;
}

/// Certificate for psi = a theta quotient (holomorphy of BL(psi) via the
/// Humbert multiplicities); the leading coefficient is kept to q_extra
/// orders past its leading q-power.
inline BPCertificate bp_plus_certificate(const JacobiExpansion& psi, int q_extra = 3) {
  BPCertificate c;
  c.kind = "BP+";
  c.N = psi.index();
  c.singular = singular_part(psi);
  auto hc = certify_holomorphic(psi);
  c.inv = hc.inv;
  c.humbert = hc.humbert;
  auto spec = leading_theta_block(c.singular);
  Rational order = tb_q_order(spec);
  if (!is_integer(order)) throw InvalidInput("leading theta block has a nontrivial character");
  int prec = static_cast<int>(order.get_num().get_si()) + q_extra;
  auto lead = tb_jacobi(spec, prec);
  c.leading_fj = lead;
  c.combination = {BigInt(1)};
  c.basis = {spec.notation()};
  return c;
}

/// phi and phi|V2 / phi, with phi expanded far enough that the quotient
/// reaches q^(N/4).
inline std::pair<JacobiExpansion, JacobiExpansion> minus_quotient(const std::vector<std::string>& basis,
                                                                  const std::vector<BigInt>& comb, long long N) {
  auto phi = combine_theta_blocks(basis, comb, static_cast<int>(N / 4 + 2));
  if (phi.index() != N) throw InvalidInput("theta-block combination has index " + std::to_string(phi.index()));
  if (phi.table().empty()) throw InvalidInput("theta-block combination vanishes");
  const long long ord = phi.table().begin()->first.first;
  phi = combine_theta_blocks(basis, comb, static_cast<int>(2 * (N / 4 + 1 + ord) + 1));
  return {phi, bp_minus_input(phi)};
}

/// Certificate for psi = phi|V2 / phi with phi a combination of theta blocks.
inline BPCertificate bp_minus_certificate(const std::vector<std::string>& basis, const std::vector<BigInt>& comb, long long N) {
  auto [phi, psi] = minus_quotient(basis, comb, N);
  BPCertificate c;
  c.kind = "BP-";
  c.N = N;
  c.singular = singular_part(psi);
  auto hc = certify_holomorphic(psi);
  c.inv = hc.inv;
  c.humbert = hc.humbert;
  c.leading_fj = phi.truncated(static_cast<int>(phi.table().begin()->first.first) + 3);
  c.combination = comb;
  c.basis = basis;
  return c;
}

struct VerifyReport {
  std::vector<std::string> failures;
  bool holomorphic{false};
  bool ok() const { return failures.empty(); }
};

inline bool invariants_equal(const BorcherdsInvariants& a, const BorcherdsInvariants& b) {
  return a.k == b.k && a.A == b.A && a.B == b.B && a.C == b.C && a.D0 == b.D0 && a.epsilon == b.epsilon;
}

inline VerifyReport verify_certificate(const BPCertificate& c) {
  VerifyReport rep;
  auto psi = from_singular(c.singular, c.N);
  auto hc = certify_holomorphic(psi);
  if (!invariants_equal(hc.inv, c.inv)) rep.failures.push_back("INVARIANTS do not match the singular part");
  if (hc.humbert != c.humbert) rep.failures.push_back("HUMBERT rows do not match the singular part");
  rep.holomorphic = hc.holomorphic;
  if (!hc.holomorphic) rep.failures.push_back("holomorphy conditions fail");
  if (!c.leading_fj) {
    rep.failures.push_back("missing LEADING_FJ");
    return rep;
  }
  const auto& lead = *c.leading_fj;
  JacobiExpansion combo;
  try {
    combo = combine_theta_blocks(c.basis, c.combination, lead.q_precision());
  } catch (const InvalidInput& e) {
    rep.failures.push_back(std::string("BASIS/COMBINATION unusable: ") + e.what());
    return rep;
  }
  if (combo.table() != lead.table() || combo.index() != lead.index() || combo.weight() != lead.weight())
    rep.failures.push_back("LEADING_FJ differs from the basis combination");
  if (c.kind == "BP+") {
    auto spec = leading_theta_block(c.singular);
    auto tb = tb_jacobi(spec, lead.q_precision());
    if (tb.table() != lead.table()) rep.failures.push_back("LEADING_FJ is not the theta block of the singular part");
  } else {
    if (singular_part(minus_quotient(c.basis, c.combination, c.N).second) != c.singular)
      rep.failures.push_back("SINGULAR does not match phi|V2/phi");
  }
  return rep;
}

}  // namespace pmf
