#pragma once

// Line-oriented text formats with exact integers: Jacobi basis files,
// Siegel expansion files, and Borcherds-product certificates.

#include <algorithm>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pmf/borcherds.hpp"
#include "pmf/jacobi.hpp"
#include "pmf/paramodular.hpp"
#include "pmf/theta.hpp"

namespace pmf {

namespace io_detail {

/// Next line that is neither blank nor a comment.
inline bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    line = line.substr(first);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    return true;
  }
  return false;
}

inline BigInt parse_big(const std::string& s) {
  BigInt v;
  if (s.empty() || v.set_str(s, 10) != 0) throw InvalidInput("not an integer: " + s);
  return v;
}

inline long long parse_ll(const std::string& s) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw InvalidInput("not an integer: " + s);
  }
  if (pos != s.size()) throw InvalidInput("not an integer: " + s);
  return v;
}

inline std::vector<std::string> words(const std::string& line) {
  std::istringstream ls(line);
  std::vector<std::string> out;
  std::string w;
  while (ls >> w) out.push_back(w);
  return out;
}

}  // namespace io_detail

// ---- Jacobi basis files: "J k m prec class", then per element "E provenance"
// followed by "n r c" lines.

inline void write_jacobi_basis(std::ostream& out, const std::vector<JacobiExpansion>& basis) {
  if (basis.empty()) throw InvalidInput("cannot write an empty basis");
  const auto& f0 = basis[0];
  out << "J " << f0.weight() << ' ' << f0.index() << ' ' << f0.q_precision() << ' ' << to_string(f0.holomorphy()) << '\n';
  for (const auto& f : basis) {
    if (f.weight() != f0.weight() || f.index() != f0.index() || f.q_precision() != f0.q_precision() ||
        f.holomorphy() != f0.holomorphy())
      throw InvalidInput("basis elements disagree in weight, index, precision or class");
    out << "E " << (f.provenance.empty() ? std::string("-") : f.provenance) << '\n';
    for (const auto& [k, c] : f.table()) out << k.first << ' ' << k.second << ' ' << c.get_str() << '\n';
  }
}

inline std::vector<JacobiExpansion> read_jacobi_basis(std::istream& in) {
  std::string line;
  if (!io_detail::next_line(in, line)) throw InvalidInput("empty basis file");
  auto h = io_detail::words(line);
  if (h.size() != 5 || h[0] != "J") throw InvalidInput("basis header must be 'J k m prec class'");
  const int k = static_cast<int>(io_detail::parse_ll(h[1])), m = static_cast<int>(io_detail::parse_ll(h[2]));
  const int prec = static_cast<int>(io_detail::parse_ll(h[3]));
  const Holomorphy cls = parse_holomorphy(h[4]);
  std::vector<JacobiExpansion> out;
  while (io_detail::next_line(in, line)) {
    if (line.rfind("E", 0) == 0 && (line.size() == 1 || line[1] == ' ')) {
      out.emplace_back(k, m, cls, prec);
      std::string prov = line.size() > 2 ? line.substr(2) : "";
      out.back().provenance = prov == "-" ? "" : prov;
      continue;
    }
    auto w = io_detail::words(line);
    if (w.size() != 3 || out.empty()) throw InvalidInput("malformed basis line: " + line);
    out.back().set(io_detail::parse_ll(w[0]), io_detail::parse_ll(w[1]), io_detail::parse_big(w[2]));
  }
  if (out.empty()) throw InvalidInput("basis file has no elements");
  return out;
}

// ---- Siegel expansion files: "SP k N detcap [sign]", then "n r m value"
// over canonical keys.

inline void write_siegel(std::ostream& out, const SiegelExpansion& f) {
  out << "SP " << f.weight() << ' ' << f.N() << ' ' << f.det_cap();
  if (f.fricke_sign) out << ' ' << (*f.fricke_sign > 0 ? '+' : '-');
  out << '\n';
  for (const auto& [k, v] : f.table()) out << k.n << ' ' << k.r << ' ' << k.m << ' ' << v.get_str() << '\n';
}

inline SiegelExpansion read_siegel(std::istream& in) {
  std::string line;
  if (!io_detail::next_line(in, line)) throw InvalidInput("empty Siegel expansion file");
  auto h = io_detail::words(line);
  if ((h.size() != 4 && h.size() != 5) || h[0] != "SP") throw InvalidInput("Siegel header must be 'SP k N detcap [sign]'");
  const int k = static_cast<int>(io_detail::parse_ll(h[1]));
  const long long N = io_detail::parse_ll(h[2]), cap = io_detail::parse_ll(h[3]);
  if (N < 1 || cap < 0) throw InvalidInput("bad level or cap in Siegel header");
  auto level = std::make_shared<const Level>(N);
  SiegelExpansion f(k, level, cap);
  if (h.size() == 5) {
    if (h[4] != "+" && h[4] != "-") throw InvalidInput("Fricke sign must be + or -");
    f.fricke_sign = h[4] == "+" ? 1 : -1;
  }
  while (io_detail::next_line(in, line)) {
    auto w = io_detail::words(line);
    if (w.size() != 4) throw InvalidInput("malformed Siegel line: " + line);
    IndexForm t{io_detail::parse_ll(w[0]), io_detail::parse_ll(w[1]), io_detail::parse_ll(w[2])};
    long long D = level->disc(t);
    if (D <= 0 || D > cap) throw InvalidInput("Siegel entry outside the stored window: " + line);
    if (level->canonical(t).key != t) throw InvalidInput("Siegel entry is not a canonical key: " + line);
    f.set_canonical(t, io_detail::parse_big(w[3]));
  }
  return f;
}

// ---- Borcherds-product certificates.

struct BPCertificate {
  std::string kind;  // "BP+" or "BP-"
  long long N{1};
  std::vector<SingularTerm> singular;
  BorcherdsInvariants inv;
  std::vector<HumbertRow> humbert;
  std::optional<JacobiExpansion> leading_fj;
  std::vector<BigInt> combination;
  std::vector<std::string> basis;
};

inline void write_certificate(std::ostream& out, const BPCertificate& c) {
  out << "CERT " << c.kind << ' ' << c.N << '\n';
  out << "SINGULAR\n";
  for (const auto& t : c.singular) out << t.n << ' ' << t.r << ' ' << t.c.get_str() << '\n';
  out << "INVARIANTS\n";
  out << c.inv.k << ' ' << c.inv.A.get_str() << ' ' << c.inv.B.get_str() << ' ' << c.inv.C.get_str() << ' ' << c.inv.D0
      << ' ' << c.inv.epsilon << '\n';
  out << "HUMBERT\n";
  for (const auto& h : c.humbert) out << h.d << ' ' << h.r << ' ' << h.mult.get_str() << '\n';
  if (c.leading_fj) {
    out << "LEADING_FJ\n";
    write_jacobi_basis(out, {*c.leading_fj});
  }
  out << "COMBINATION\n";
  for (std::size_t i = 0; i < c.combination.size(); ++i) out << (i ? " " : "") << c.combination[i].get_str();
  out << '\n';
  out << "BASIS\n";
  for (const auto& b : c.basis) out << b << '\n';
  out << "END\n";
}

inline BPCertificate read_certificate(std::istream& in) {
  std::string line;
  if (!io_detail::next_line(in, line)) throw InvalidInput("empty certificate");
  auto h = io_detail::words(line);
  if (h.size() != 3 || h[0] != "CERT" || (h[1] != "BP+" && h[1] != "BP-"))
    throw InvalidInput("certificate header must be 'CERT BP+|BP- N'");
  BPCertificate c;
  c.kind = h[1];
  c.N = io_detail::parse_ll(h[2]);
  std::string section;
  std::ostringstream fj;
  bool ended = false, have_inv = false;
  const std::vector<std::string> sections{"SINGULAR", "INVARIANTS", "HUMBERT", "LEADING_FJ", "COMBINATION", "BASIS"};
  while (io_detail::next_line(in, line)) {
    if (line == "END") {
      ended = true;
      break;
    }
    if (std::find(sections.begin(), sections.end(), line) != sections.end()) {
      section = line;
      continue;
    }
    auto w = io_detail::words(line);
    if (section == "SINGULAR") {
      if (w.size() != 3) throw InvalidInput("malformed SINGULAR line: " + line);
      c.singular.push_back({io_detail::parse_ll(w[0]), io_detail::parse_ll(w[1]), io_detail::parse_big(w[2])});
    } else if (section == "INVARIANTS") {
      if (w.size() != 6 || have_inv) throw InvalidInput("malformed INVARIANTS line: " + line);
      c.inv.k = static_cast<int>(io_detail::parse_ll(w[0]));
      for (int i = 0; i < 3; ++i) {
        Rational q;
        if (q.set_str(w[1 + i], 10) != 0) throw InvalidInput("not a rational: " + w[1 + i]);
        q.canonicalize();
        (i == 0 ? c.inv.A : i == 1 ? c.inv.B : c.inv.C) = q;
      }
      c.inv.D0 = io_detail::parse_ll(w[4]);
      c.inv.epsilon = static_cast<int>(io_detail::parse_ll(w[5]));
      have_inv = true;
    } else if (section == "HUMBERT") {
      if (w.size() != 3) throw InvalidInput("malformed HUMBERT line: " + line);
      c.humbert.push_back({io_detail::parse_ll(w[0]), io_detail::parse_ll(w[1]), io_detail::parse_big(w[2])});
    } else if (section == "LEADING_FJ") {
      fj << line << '\n';
    } else if (section == "COMBINATION") {
      for (const auto& x : w) c.combination.push_back(io_detail::parse_big(x));
    } else if (section == "BASIS") {
      c.basis.push_back(line);
    } else {
      throw InvalidInput("certificate line outside any section: " + line);
    }
  }
  if (!ended) throw InvalidInput("certificate is missing END");
  if (!have_inv) throw InvalidInput("certificate is missing INVARIANTS");
  if (!fj.str().empty()) {
    std::istringstream fin(fj.str());
    auto b = read_jacobi_basis(fin);
    if (b.size() != 1) throw InvalidInput("LEADING_FJ must hold one expansion");
    c.leading_fj = b[0];
  }
  return c;
}

template <class T, class Writer>
std::string serialize(const T& x, Writer w) {
  std::ostringstream out;
  w(out, x);
  return out.str();
}

}  // namespace pmf
