// Command-line front end.  Exit codes: 0 success, 1 verification failure,
// 2 usage error, 3 precision or cap shortfall.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pmf/pmf.hpp"

using namespace pmf;

namespace {

constexpr const char* kVersion = "pmf 1.0";

std::string data_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("PMF_DATA_DIR")) return env;
  return PMF_DATA_DIR;
}

void log_run(const std::string& cmd, const std::vector<std::pair<std::string, std::string>>& cfg) {
  std::cerr << "# " << kVersion << " " << cmd;
  for (const auto& [k, v] : cfg) std::cerr << " " << k << "=" << v;
  std::cerr << "\n";
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot open " + path);
  return f;
}

template <class F>
void emit(const std::string& path, F write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot write " + path);
  write(f);
}

std::vector<BigInt> parse_vector(const std::string& s) {
  std::vector<BigInt> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    out.push_back(io_detail::parse_big(tok));
  }
  return out;
}

void print_bp_summary(const BPCertificate& c, std::ostream& out) {
  out << "INVARIANTS k=" << c.inv.k << " A=" << c.inv.A.get_str() << " B=" << c.inv.B.get_str()
      << " C=" << c.inv.C.get_str() << " D0=" << c.inv.D0 << " eps=" << (c.inv.epsilon > 0 ? "+1" : "-1") << "\n";
  out << "HUMBERT rows=" << c.humbert.size() << "\n";
  for (const auto& h : c.humbert) out << "  " << h.d << " " << h.r << " " << h.mult.get_str() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact computations with Siegel paramodular forms of degree 2"};
  app.require_subcommand(1);
  std::string data_flag;
  app.add_option("--data", data_flag, "data directory (default: PMF_DATA_DIR or the build's data/)");
  app.set_version_flag("--version", kVersion);

  // tb
  auto* tb = app.add_subcommand("tb", "expand a theta block");
  std::string tb_spec, tb_out;
  int tb_prec = 5;
  tb->add_option("--spec", tb_spec, "theta block, e.g. TB(2;1,1,2,3)")->required();
  tb->add_option("--prec", tb_prec, "q-precision")->check(CLI::PositiveNumber);
  tb->add_option("--out", tb_out, "basis file (default stdout)");

  // jacobi
  auto* jac = app.add_subcommand("jacobi", "Jacobi form basis from the weak ring");
  int jk = 0, jm = 0, jprec = 5;
  bool jcusp = false;
  std::string jout;
  jac->add_option("--weight", jk)->required();
  jac->add_option("--index", jm)->required()->check(CLI::PositiveNumber);
  jac->add_option("--prec", jprec)->check(CLI::PositiveNumber);
  jac->add_flag("--cusp", jcusp, "cusp forms only");
  jac->add_option("--out", jout);

  // grit
  auto* grit = app.add_subcommand("grit", "Gritsenko lift of a Jacobi cusp form");
  std::string grit_in, grit_out;
  std::size_t grit_elem = 0;
  long long grit_cap = 0;
  grit->add_option("--in", grit_in, "basis file")->required();
  grit->add_option("--element", grit_elem, "element of the basis file (from 0)");
  grit->add_option("--detcap", grit_cap)->required()->check(CLI::PositiveNumber);
  grit->add_option("--out", grit_out);

  // bp
  auto* bp = app.add_subcommand("bp", "Borcherds products");
  bp->require_subcommand(1);
  auto* bp_cert = bp->add_subcommand("certify", "certify a theta-quotient Borcherds product");
  std::string bp_thetas, bp_out;
  long long bp_level = 0;
  bp_cert->add_option("--thetas", bp_thetas, "theta quotient d1/e1,d2/e2,...")->required();
  bp_cert->add_option("--level", bp_level)->required()->check(CLI::PositiveNumber);
  bp_cert->add_option("--out", bp_out, "certificate file");
  auto* bp_minus = bp->add_subcommand("minus", "certify phi|V2/phi for a theta-block combination");
  std::vector<std::string> bpm_tb;
  std::string bpm_comb, bpm_out;
  long long bpm_level = 0;
  bp_minus->add_option("--tb", bpm_tb, "theta blocks (repeatable)")->required();
  bp_minus->add_option("--comb", bpm_comb, "integer coefficients c1,c2,... (default all 1)");
  bp_minus->add_option("--level", bpm_level)->required()->check(CLI::PositiveNumber);
  bp_minus->add_option("--out", bpm_out, "certificate file");

  // jr
  auto* jr = app.add_subcommand("jr", "Jacobi restriction dimension bound");
  long long jr_level = 0, jr_cap = 0, jr_mod = kDefaultFieldPrime;
  int jr_k = 2, jr_mmax = 1, jr_prec = 0;
  std::string jr_sign = "+";
  jr->add_option("--level", jr_level)->required()->check(CLI::PositiveNumber);
  jr->add_option("--weight", jr_k)->required();
  jr->add_option("--mmax", jr_mmax)->required()->check(CLI::PositiveNumber);
  jr->add_option("--detcap", jr_cap)->required()->check(CLI::PositiveNumber);
  jr->add_option("--prec", jr_prec, "q-precision of the bases (default from the cap)");
  jr->add_option("--sign", jr_sign)->check(CLI::IsMember({"+", "-"}));
  jr->add_option("--mod", jr_mod, "field characteristic, 0 for the rationals");

  // h4
  auto* h4 = app.add_subcommand("h4", "weight-4 certification test from recorded numbers");
  std::string h4_test, h4_replay;
  H4Inputs h4_in;
  h4->add_option("--test", h4_test)->check(CLI::IsMember({"DD+", "D1", "D1+", "D1-"}));
  h4->add_option("--level", h4_in.N);
  h4->add_option("--d", h4_in.d);
  h4->add_option("--dims4", h4_in.dim_S4);
  h4->add_option("--dimj", h4_in.dim_J);
  h4->add_option("--plus", h4_in.dim_plus);
  h4->add_option("--minus", h4_in.dim_minus);
  h4->add_option("--rank", h4_in.rank);
  h4->add_option("--replay", h4_replay, "recompute a report line");

  // trace-down
  auto* td = app.add_subcommand("trace-down", "trace from level Nq to level N");
  long long td_level = 0, td_q = 0, td_cap = 0;
  int td_k = 0;
  std::string td_in, td_out;
  td->add_option("--level", td_level)->required()->check(CLI::PositiveNumber);
  td->add_option("--q", td_q)->required();
  td->add_option("--weight", td_k)->required();
  td->add_option("--in", td_in)->required();
  td->add_option("--out", td_out);
  td->add_option("--detcap", td_cap)->required()->check(CLI::PositiveNumber);

  // hecke
  auto* hk = app.add_subcommand("hecke", "Hecke operator T(n), n coprime to the level");
  long long hk_n = 0, hk_cap = 0;
  std::string hk_in, hk_out;
  hk->add_option("--n", hk_n)->required()->check(CLI::PositiveNumber);
  hk->add_option("--in", hk_in)->required();
  hk->add_option("--detcap", hk_cap, "output cap (default: input cap / n^2)");
  hk->add_option("--out", hk_out);

  // euler
  auto* eu = app.add_subcommand("euler", "spin Euler factor from Hecke eigenvalues");
  long long eu_p = 0;
  std::string eu_lp, eu_lp2;
  int eu_k = 2;
  eu->add_option("--p", eu_p)->required();
  eu->add_option("--lp", eu_lp)->required();
  eu->add_option("--lp2", eu_lp2)->required();
  eu->add_option("--weight", eu_k);
  bool eu_line = false;
  eu->add_flag("--line", eu_line, "print a report line accepted by verify");

  // verify
  auto* vf = app.add_subcommand("verify", "re-verify a certificate or report file");
  std::string vf_in;
  vf->add_option("--in", vf_in)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string data = data_dir(data_flag);
  try {
    if (*tb) {
      log_run("tb", {{"spec", tb_spec}, {"prec", std::to_string(tb_prec)}});
      auto spec = parse_theta_block(tb_spec);
      auto phi = tb_jacobi(spec, tb_prec);
      std::cerr << "# " << spec.notation() << " weight " << phi.weight() << " index " << phi.index() << " class "
                << to_string(phi.holomorphy()) << "\n";
      emit(tb_out, [&](std::ostream& o) { write_jacobi_basis(o, {phi}); });
    } else if (*jac) {
      log_run("jacobi", {{"weight", std::to_string(jk)}, {"index", std::to_string(jm)}, {"prec", std::to_string(jprec)},
                         {"cusp", jcusp ? "1" : "0"}, {"data", data}});
      auto basis = jacobi_basis_from_weak_ring(jk, jm, jprec, jcusp);
      auto table = DimensionTable::load(data + "/dims.txt");
      if (jcusp && table.contains(jk, jm)) {
        const auto& e = table.entry(jk, jm);
        if (static_cast<long long>(basis.size()) != e.dim)
          throw VerificationFailure("basis has " + std::to_string(basis.size()) + " elements, table (" + e.source +
                                    ") records " + std::to_string(e.dim));
      }
      std::cerr << "# dimension " << basis.size() << "\n";
      emit(jout, [&](std::ostream& o) { write_jacobi_basis(o, basis); });
    } else if (*grit) {
      log_run("grit", {{"in", grit_in}, {"element", std::to_string(grit_elem)}, {"detcap", std::to_string(grit_cap)}});
      auto in = open_in(grit_in);
      auto basis = read_jacobi_basis(in);
      if (grit_elem >= basis.size()) throw InvalidInput("basis file has " + std::to_string(basis.size()) + " elements");
      const auto& phi = basis[grit_elem];
      auto f = gritsenko_lift(phi, std::make_shared<Level>(phi.index()), grit_cap);
      emit(grit_out, [&](std::ostream& o) { write_siegel(o, f); });
    } else if (*bp_cert) {
      log_run("bp certify", {{"thetas", bp_thetas}, {"level", std::to_string(bp_level)}});
      auto spec = parse_theta_quotient(bp_thetas);
      auto psi = theta_quotient_expand(spec, static_cast<int>(bp_level / 4 + 1));
      if (psi.index() != bp_level)
        throw InvalidInput("theta quotient has index " + std::to_string(psi.index()) + ", not the level");
      auto c = bp_plus_certificate(psi);
      print_bp_summary(c, std::cout);
      auto rep = verify_certificate(c);
      std::cout << "holomorphic " << (rep.holomorphic ? "yes" : "no") << "\n";
      if (rep.holomorphic) std::cout << "cusp " << to_string(is_paramodular_cusp(c.inv, c.N)) << "\n";
      if (!bp_out.empty()) emit(bp_out, [&](std::ostream& o) { write_certificate(o, c); });
      if (!rep.ok()) {
        for (const auto& f : rep.failures) std::cerr << "failed: " << f << "\n";
        return 1;
      }
    } else if (*bp_minus) {
      log_run("bp minus", {{"tb", std::to_string(bpm_tb.size()) + " blocks"}, {"level", std::to_string(bpm_level)}});
      std::vector<BigInt> comb = bpm_comb.empty() ? std::vector<BigInt>(bpm_tb.size(), BigInt(1)) : parse_vector(bpm_comb);
      if (comb.size() != bpm_tb.size()) throw InvalidInput("--comb needs one coefficient per theta block");
      auto c = bp_minus_certificate(bpm_tb, comb, bpm_level);
      print_bp_summary(c, std::cout);
      auto rep = verify_certificate(c);
      std::cout << "holomorphic " << (rep.holomorphic ? "yes" : "no") << "\n";
      if (rep.holomorphic) std::cout << "cusp " << to_string(is_paramodular_cusp(c.inv, c.N)) << "\n";
      if (!bpm_out.empty()) emit(bpm_out, [&](std::ostream& o) { write_certificate(o, c); });
      if (!rep.ok()) {
        for (const auto& f : rep.failures) std::cerr << "failed: " << f << "\n";
        return 1;
      }
    } else if (*jr) {
      log_run("jr", {{"level", std::to_string(jr_level)}, {"weight", std::to_string(jr_k)}, {"mmax", std::to_string(jr_mmax)},
                     {"detcap", std::to_string(jr_cap)}, {"sign", jr_sign}, {"mod", std::to_string(jr_mod)}});
      RestrictionProblem p;
      p.N = jr_level;
      p.k = jr_k;
      p.epsilon = jr_sign == "+" ? 1 : -1;
      p.m_max = jr_mmax;
      p.det_cap = jr_cap;
      p.field = jr_mod;
      for (int m = 1; m <= jr_mmax; ++m) {
        const long long index = m * jr_level;
        int prec = jr_prec > 0 ? jr_prec : lift_precision_needed(index, jr_cap);
        p.bases.push_back(jacobi_basis_from_weak_ring(jr_k, static_cast<int>(index), prec, true));
      }
      auto rep = dim_bound(p);
      std::cout << "JR " << p.N << " " << p.k << " " << jr_sign << " " << p.m_max << " " << p.det_cap << " "
                << (p.field == 0 ? std::string("Q") : "F" + std::to_string(p.field)) << " " << rep.dim_bases << " "
                << rep.rank << " " << rep.bound << "\n";
    } else if (*h4) {
      TestReport rep;
      if (!h4_replay.empty()) {
        log_run("h4", {{"replay", h4_replay}});
        rep = replay(h4_replay);
      } else {
        if (h4_test.empty()) throw InvalidInput("h4 needs --test or --replay");
        log_run("h4", {{"test", h4_test}, {"level", std::to_string(h4_in.N)}, {"d", std::to_string(h4_in.d)}});
        H4Test t = h4_test == "DD+" ? H4Test::DD_Plus : h4_test == "D1" ? H4Test::D1 : h4_test == "D1+" ? H4Test::D1_Plus
                                                                                                         : H4Test::D1_Minus;
        rep = run_test(t, h4_in);
      }
      std::cout << rep.line() << "\n";
    } else if (*td) {
      log_run("trace-down", {{"level", std::to_string(td_level)}, {"q", std::to_string(td_q)}, {"weight", std::to_string(td_k)},
                             {"in", td_in}, {"detcap", std::to_string(td_cap)}});
      auto in = open_in(td_in);
      auto f = read_siegel(in);
      if (f.N() != td_level * td_q) throw InvalidInput("input level " + std::to_string(f.N()) + " is not level*q");
      if (f.weight() != td_k) throw InvalidInput("input weight " + std::to_string(f.weight()) + " differs from --weight");
      auto plan = plan_trace_down(td_level, td_q);
      auto res = trace_down(plan, f, td_cap);
      std::cout << "denominator " << res.denominator.get_str() << "\n";
      emit(td_out, [&](std::ostream& o) {
        o << "# coefficients scaled by " << res.denominator.get_str() << "\n";
        write_siegel(o, res.scaled);
      });
    } else if (*hk) {
      auto in = open_in(hk_in);
      auto f = read_siegel(in);
      long long cap = hk_cap > 0 ? hk_cap : f.det_cap() / (hk_n * hk_n);
      log_run("hecke", {{"n", std::to_string(hk_n)}, {"in", hk_in}, {"detcap", std::to_string(cap)}});
      auto g = hecke_T(f, hk_n, cap);
      // eigenvalue on the output window, if g is a multiple of f there
      std::optional<Rational> lambda;
      bool eigen = true;
      const auto window = f.truncated(cap);
      for (const auto& [key, v] : window.table()) {
        Rational r(g.coeff(key), v);
        r.canonicalize();
        if (!lambda) lambda = r;
        else if (*lambda != r) eigen = false;
      }
      for (const auto& [key, v] : g.table())
        if (f.coeff(key) == 0) eigen = false;
      if (eigen && lambda) std::cout << "eigenvalue " << lambda->get_str() << "\n";
      else std::cout << "eigenvalue none\n";
      if (!hk_out.empty()) emit(hk_out, [&](std::ostream& o) { write_siegel(o, g); });
    } else if (*eu) {
      log_run("euler", {{"p", std::to_string(eu_p)}, {"lp", eu_lp}, {"lp2", eu_lp2}, {"weight", std::to_string(eu_k)}});
      auto c = spin_euler_factor(io_detail::parse_big(eu_lp), io_detail::parse_big(eu_lp2), eu_p, eu_k);
      if (eu_line) std::cout << "EULER " << eu_p << " " << eu_lp << " " << eu_lp2 << " " << eu_k << " ";
      std::cout << polynomial_string(c, "T") << "\n";
    } else if (*vf) {
      log_run("verify", {{"in", vf_in}});
      auto in = open_in(vf_in);
      std::string line;
      if (!io_detail::next_line(in, line)) throw InvalidInput("empty file " + vf_in);
      if (line.rfind("CERT", 0) == 0) {
        in.clear();
        in.seekg(0);
        auto c = read_certificate(in);
        auto rep = verify_certificate(c);
        print_bp_summary(c, std::cout);
        std::cout << "holomorphic " << (rep.holomorphic ? "yes" : "no") << "\n";
        for (const auto& f : rep.failures) std::cout << "failed: " << f << "\n";
        std::cout << (rep.ok() ? "verified" : "rejected") << "\n";
        return rep.ok() ? 0 : 1;
      }
      // report lines: H4 lines and "EULER p lp lp2 k poly" lines
      std::size_t bad = 0, count = 0;
      do {
        auto w = io_detail::words(line);
        std::string expect;
        if (w[0] == "H4") {
          expect = replay(line).line();
        } else if (w[0] == "EULER" && w.size() == 6) {
          auto c = spin_euler_factor(io_detail::parse_big(w[2]), io_detail::parse_big(w[3]), io_detail::parse_ll(w[1]),
                                     static_cast<int>(io_detail::parse_ll(w[4])));
          expect = "EULER " + w[1] + " " + w[2] + " " + w[3] + " " + w[4] + " " + polynomial_string(c, "T");
        } else {
          throw InvalidInput("unrecognized report line: " + line);
        }
        ++count;
        if (expect != line) {
          ++bad;
          std::cout << "mismatch: " << line << "\n  recomputed: " << expect << "\n";
        }
      } while (io_detail::next_line(in, line));
      std::cout << count - bad << "/" << count << " lines verified\n";
      return bad == 0 ? 0 : 1;
    }
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return 1;
  } catch (const PrecisionShortfall& e) {
    std::cerr << "precision shortfall: " << e.what() << "\n";
    return 3;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
