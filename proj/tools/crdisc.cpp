// crdisc: classify CR singularities of graphs w = F_m(z) + R(z) by their
// Maslov-type index and construct families of attached analytic discs.
//
// Subcommands: examples, index, classify, family, probe, verify.
// Exit codes: 0 ok, 1 input error, 2 math error.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crdisc/bishop.hpp"
#include "crdisc/spec_format.hpp"

using nlohmann::json;
using namespace crdisc;

namespace {

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spec file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct ReportContext {
  std::string command;
  std::string digest;
  bool timing = false;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  void emit(const json& outputs) const {
    json doc;
    doc["command"] = command;
    doc["input_digest"] = digest;
    doc["outputs"] = outputs;
    if (timing) {
      const auto dt = std::chrono::steady_clock::now() - start;
      doc["timing_ms"] =
          std::chrono::duration<double, std::milli>(dt).count();
    }
    std::cout << doc.dump(2) << "\n";
  }
};

json index_report_json(const IndexReport& rep) {
  json j;
  j["ind_winding"] = rep.ind_winding;
  j["ind_zero_count"] = rep.ind_zero_count;
  j["ind_roots"] = rep.ind_roots;
  j["agree"] = rep.agree;
  j["zero_count"] = rep.zero_count;
  j["classification"] = rep.classification == Classification::positive_index
                            ? "positive_index"
                            : "nonpositive_index";
  if (rep.nondegenerate_class)
    j["nondegenerate_class"] =
        *rep.nondegenerate_class == ConicClass::elliptic ? "elliptic"
                                                         : "hyperbolic";
  return j;
}

PolyZZbar parse_rem_terms(const std::vector<std::string>& specs) {
  PolyZZbar rem;
  for (const auto& s : specs) {
    int mu = 0, nu = 0;
    double re = 0.0, im = 0.0;
    const int got =
        std::sscanf(s.c_str(), "%d,%d,%lf,%lf", &mu, &nu, &re, &im);
    if (got < 3)
      throw ParseError("--rem expects MU,NU,RE[,IM], got \"" + s + "\"");
    rem.add_term(mu, nu, cxd(re, im));
  }
  return rem;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write output file: " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Maslov-type index classification and attached-disc families for CR "
      "singular surface germs w = F_m(z) + R(z) in C^2"};
  app.require_subcommand(1);

  std::string cmdline;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) cmdline += ' ';
    cmdline += argv[i];
  }

  bool timing = false;
  app.add_flag("--timing", timing,
               "include wall-clock timing in the report (breaks "
               "byte-for-byte determinism)");

  // --- examples ---
  auto* cmd_examples = app.add_subcommand(
      "examples", "emit a spec file for a built-in surface family");
  std::string ex_name;
  double ex_gamma = 0.0, ex_eps = 0.7, ex_C = 0.5, ex_radius = 1.0;
  int ex_m = 2;
  std::vector<std::string> ex_rem;
  std::string ex_out;
  cmd_examples
      ->add_option("name", ex_name,
                   "family: bishop-quadric | example-4-1 | power")
      ->required();
  cmd_examples->add_option("--gamma", ex_gamma, "bishop-quadric gamma >= 0");
  cmd_examples->add_option("--eps", ex_eps, "example-4-1 epsilon");
  cmd_examples->add_option("--C", ex_C, "example-4-1 C in (1/3, 2/3)");
  cmd_examples->add_option("--m", ex_m, "power germ degree (even, >= 2)");
  cmd_examples->add_option("--rem", ex_rem,
                           "remainder term MU,NU,RE[,IM]; repeatable");
  cmd_examples->add_option("--radius", ex_radius, "radius of validity");
  cmd_examples->add_option("--out", ex_out, "output path (default stdout)");

  // --- index / classify ---
  std::string spec_path;
  double opt_r = 0.0;
  std::size_t opt_grid = 1024;
  auto add_spec_opts = [&](CLI::App* c, bool with_r) {
    c->add_option("spec", spec_path, "surface spec file (JSON)")->required();
    if (with_r)
      c->add_option("-r,--r", opt_r,
                    "circle radius (default: radius of validity / 8)");
    c->add_option("--grid", opt_grid, "grid size (power of two >= 64)");
  };
  auto* cmd_index = app.add_subcommand(
      "index", "compute the Maslov-type index by all three formulas");
  add_spec_opts(cmd_index, true);
  auto* cmd_classify = app.add_subcommand(
      "classify", "classify the singularity by the sign of the index");
  add_spec_opts(cmd_classify, true);

  // --- family ---
  auto* cmd_family = app.add_subcommand(
      "family", "solve for the one-parameter family of attached discs");
  std::string fam_spec, fam_out, fam_boundary_out;
  double fam_rmin = 0.01, fam_rmax = 0.1;
  int fam_steps = 10;
  SolveConfig fam_cfg;
  cmd_family->add_option("spec", fam_spec, "surface spec file (JSON)")
      ->required();
  cmd_family->add_option("--rmin", fam_rmin, "smallest radius");
  cmd_family->add_option("--rmax", fam_rmax, "largest radius");
  cmd_family->add_option("--steps", fam_steps, "number of radii");
  cmd_family->add_option("--tol", fam_cfg.tol, "fixed-point tolerance");
  cmd_family->add_option("--delta", fam_cfg.delta,
                         "ball exponent delta in (1/2, 1)");
  cmd_family->add_option("--alpha", fam_cfg.alpha,
                         "Hoelder exponent for diagnostics");
  cmd_family->add_option("--grid", fam_cfg.grid, "grid size");
  cmd_family->add_option("--out", fam_out, "summary CSV path");
  cmd_family->add_option("--boundary-out", fam_boundary_out,
                         "full boundary-sample CSV path");

  // --- probe ---
  auto* cmd_probe = app.add_subcommand(
      "probe", "nonexistence probe for nonpositive-index germs");
  std::string probe_spec;
  cmd_probe->add_option("spec", probe_spec, "surface spec file (JSON)")
      ->required();

  // --- verify ---
  auto* cmd_verify = app.add_subcommand(
      "verify", "certify index agreement, the operator round trip and one "
                "attached disc");
  std::string verify_spec;
  double verify_r = 0.05;
  SolveConfig verify_cfg;
  cmd_verify->add_option("spec", verify_spec, "surface spec file (JSON)")
      ->required();
  cmd_verify->add_option("-r,--r", verify_r, "disc radius");
  cmd_verify->add_option("--grid", verify_cfg.grid, "grid size");
  cmd_verify->add_option("--tol", verify_cfg.tol, "fixed-point tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  ReportContext ctx;
  ctx.command = cmdline;
  ctx.timing = timing;

  try {
    if (cmd_examples->parsed()) {
      const PolyZZbar rem = parse_rem_terms(ex_rem);
      SurfaceGerm germ = [&] {
        if (ex_name == "bishop-quadric")
          return make_bishop_quadric(ex_gamma, rem, ex_radius);
        if (ex_name == "example-4-1")
          return make_example_4_1(ex_eps, ex_C, rem, ex_radius);
        if (ex_name == "power") return make_power_germ(ex_m, rem, ex_radius);
        throw ParameterOutOfRange(
            "unknown example \"" + ex_name +
            "\"; expected bishop-quadric, example-4-1 or power");
      }();
      const std::string text = format_germ(germ);
      if (ex_out.empty())
        std::cout << text;
      else
        write_text(ex_out, text);
      return 0;
    }

    if (cmd_index->parsed() || cmd_classify->parsed()) {
      const std::string text = read_file(spec_path);
      ctx.digest = fnv1a_hex(text);
      const SurfaceGerm germ = parse_germ(text);
      const double r = opt_r > 0.0 ? opt_r : germ.radius() / 8.0;
      const IndexReport rep = index_report(germ, r);
      if (cmd_index->parsed()) {
        ctx.emit(index_report_json(rep));
      } else {
        json out;
        out["index"] = rep.ind_winding;
        out["classification"] =
            rep.classification == Classification::positive_index
                ? "positive_index"
                : "nonpositive_index";
        if (rep.nondegenerate_class)
          out["nondegenerate_class"] =
              *rep.nondegenerate_class == ConicClass::elliptic ? "elliptic"
                                                               : "hyperbolic";
        out["discs"] = rep.classification == Classification::positive_index
                           ? "a shrinking family of attached analytic discs "
                             "exists"
                           : "no shrinking family of attached analytic discs "
                             "exists";
        ctx.emit(out);
      }
      return 0;
    }

    if (cmd_family->parsed()) {
      const std::string text = read_file(fam_spec);
      ctx.digest = fnv1a_hex(text);
      const SurfaceGerm germ = parse_germ(text);

      // index gate up front so a nonpositive germ is a hard error with an
      // explanatory message, not a silent empty family
      const IndexReport rep = index_report(germ, germ.radius() / 8.0);
      if (rep.classification != Classification::positive_index)
        throw ProfileNotPositive(
            "index <= 0: the angular profile changes sign, the level curve "
            "F_m = 1 does not enclose the singularity and the disc "
            "construction is inapplicable; run `crdisc probe` for the "
            "witnesses");

      const DiscFamily fam =
          disc_family(germ, fam_rmin, fam_rmax, fam_steps, fam_cfg);
      if (!fam_out.empty()) {
        std::ofstream os(fam_out);
        if (!os) throw ParseError("cannot write output file: " + fam_out);
        export_family_csv(fam, os);
      }
      if (!fam_boundary_out.empty()) {
        std::ofstream os(fam_boundary_out);
        if (!os)
          throw ParseError("cannot write output file: " + fam_boundary_out);
        export_family_boundary_csv(fam, os);
      }

      json out;
      out["index"] = index_report_json(rep);
      json entries = json::array();
      int n_ok = 0;
      double max_residual = 0.0;
      for (const auto& e : fam.entries) {
        json je;
        je["r"] = e.r;
        je["ok"] = e.ok;
        if (e.ok) {
          ++n_ok;
          max_residual = std::max(max_residual, e.disc.residual);
          je["residual"] = e.disc.residual;
          je["sup_norm"] = e.disc.sup_norm;
          je["iterations"] = e.diag.iterations;
          je["contraction_ratio"] = e.diag.last_ratio;
        } else {
          je["error"] = e.error;
        }
        entries.push_back(je);
      }
      out["entries"] = entries;
      out["n_ok"] = n_ok;
      out["n_failed"] = static_cast<int>(fam.entries.size()) - n_ok;
      out["max_residual"] = max_residual;
      if (fam.empirical_r0) out["empirical_r0"] = *fam.empirical_r0;
      if (!fam.smoothness_diag.empty())
        out["smoothness_diag"] = fam.smoothness_diag;
      ctx.emit(out);
      return 0;
    }

    if (cmd_probe->parsed()) {
      const std::string text = read_file(probe_spec);
      ctx.digest = fnv1a_hex(text);
      const SurfaceGerm germ = parse_germ(text);
      const NonexistenceReport rep = nonexistence_probe(germ);
      json out;
      out["index"] = rep.index;
      out["sign_change_angles"] = rep.sign_change_angles;
      out["level_curve_fails"] = rep.level_curve_fails;
      out["remainder_real"] = rep.remainder_real;
      out["locally_polynomially_convex"] = rep.locally_polynomially_convex;
      ctx.emit(out);
      return 0;
    }

    if (cmd_verify->parsed()) {
      const std::string text = read_file(verify_spec);
      ctx.digest = fnv1a_hex(text);
      const SurfaceGerm germ = parse_germ(text);
      const IndexReport rep = index_report(germ, germ.radius() / 8.0);

      json out;
      out["index"] = index_report_json(rep);
      if (rep.classification == Classification::positive_index) {
        const ConformalMap map = riemann_map_for(germ.leading(), verify_cfg.grid);
        const CircleFunction R = aux_R(germ.leading(), map);

        double on_curve = 0.0;
        for (std::size_t k = 0; k < map.g_boundary.size(); ++k)
          on_curve = std::max(on_curve,
                              std::abs(germ.leading().eval(map.g_boundary[k]) -
                                       1.0));
        json jm;
        jm["kappa"] = map.kappa;
        jm["g_prime_at_0"] = map.g_prime_at_0;
        jm["neg_energy_ratio"] = map.g_boundary.coeffs().negative_energy() /
                                 map.g_boundary.coeffs().total_energy();
        jm["mode0_abs"] = std::abs(map.g_boundary.coeff(0));
        jm["boundary_on_curve_residual"] = on_curve;
        out["map"] = jm;

        auto [a, diag] = iterate_H(germ, map, R, verify_r, verify_cfg);
        const BishopDisc disc = assemble_disc(germ, map, verify_r, a);
        json jd;
        jd["r"] = disc.r;
        jd["residual"] = disc.residual;
        jd["sup_norm"] = disc.sup_norm;
        jd["f1_neg_energy"] = disc.f1_neg_energy;
        jd["f2_neg_energy"] = disc.f2_neg_energy;
        jd["iterations"] = diag.iterations;
        jd["round_trip_rel"] = diag.round_trip_rel;
        jd["ball_escape"] = diag.ball_escape;
        out["disc"] = jd;
      } else {
        const NonexistenceReport probe = nonexistence_probe(germ);
        json jp;
        jp["sign_change_angles"] = probe.sign_change_angles;
        jp["level_curve_fails"] = probe.level_curve_fails;
        jp["remainder_real"] = probe.remainder_real;
        jp["locally_polynomially_convex"] =
            probe.locally_polynomially_convex;
        out["probe"] = jp;
      }
      ctx.emit(out);
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
