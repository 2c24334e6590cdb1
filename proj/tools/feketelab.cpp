// feketelab: dynamical Green functions, Fekete energies of iterated-preimage
// configurations, sandwich and equidistribution bounds, and exact p-adic
// kernels for rational maps on the projective line.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <random>

#include "feketelab/equidist.hpp"
#include "feketelab/fekete.hpp"
#include "feketelab/mapexpr.hpp"
#include "feketelab/nonarch.hpp"
#include "feketelab/pullback.hpp"

using namespace feketelab;

namespace {

constexpr int kExitOk = 0, kExitUsage = 2, kExitNumeric = 3, kExitBudget = 4;

struct CommonArgs {
  std::string map_text;
  std::string lift_json;
  std::string point_text = "1";
  int kmax = 6;
  std::int64_t max_atoms = 1 << 16;

  HomLift make_lift() const {
    if (!lift_json.empty()) {
      std::string text = lift_json;
      if (text[0] != '{') {
        std::ifstream in(lift_json);
        if (!in) throw std::invalid_argument("cannot open lift file: " + lift_json);
        text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
      }
      return lift_from_json(text);
    }
    if (map_text.empty())
      throw std::invalid_argument("one of --map or --lift is required");
    return parse_map(map_text);
  }
};

std::vector<EnergyReport> run_energy_sweep(const CommonArgs& args) {
  HomLift lift = args.make_lift();
  GreenEvaluator green(lift);
  FeketeAnalyzer fk(green);
  ProjPoint a = parse_point(args.point_text);
  auto levels = pullback_levels(lift, a, args.kmax, args.max_atoms);
  std::vector<EnergyReport> reports;
  for (int k = 1; k <= args.kmax; ++k) {
    std::vector<PullbackMeasure> sub(levels.begin(), levels.begin() + k);
    reports.push_back(fk.analyze(sub));
  }
  return reports;
}

int cmd_energy(const CommonArgs& args, const std::string& out_format) {
  auto reports = run_energy_sweep(args);
  if (out_format == "json") {
    std::cout << "[";
    for (std::size_t i = 0; i < reports.size(); ++i)
      std::cout << (i ? "," : "") << reports[i].to_json();
    std::cout << "]\n";
  } else {
    std::cout << "# feketelab v1\n" << EnergyReport::csv_header() << "\n";
    for (const auto& r : reports) std::cout << r.to_csv_row() << "\n";
  }
  return kExitOk;
}

int cmd_bounds(const CommonArgs& args) {
  auto reports = run_energy_sweep(args);
  std::cout << "# feketelab v1\n"
            << "k,lower,energy,upper,margin_lower,margin_upper,C_f_est,C_fa,cf_heuristic,"
               "sandwich_warning\n";
  for (const auto& r : reports) {
    std::cout << r.k << "," << fmt_g17(r.lower_bound) << "," << fmt_g17(r.energy_direct) << ","
              << fmt_g17(r.upper_bound) << "," << fmt_g17(r.energy_direct - r.lower_bound) << ","
              << fmt_g17(r.upper_bound - r.energy_direct) << "," << fmt_g17(r.cf_est) << ","
              << fmt_g17(r.cfa) << "," << r.flags.cf_heuristic << "," << r.flags.sandwich_warning
              << "\n";
  }
  return kExitOk;
}

int cmd_equidist(const CommonArgs& args, const std::string& phi_name) {
  HomLift lift = args.make_lift();
  GreenEvaluator green(lift);
  FeketeAnalyzer fk(green);
  MuIntegrator mu(green);
  TestFunction phi = builtin_test_function(phi_name);
  ProjPoint a = parse_point(args.point_text);
  auto levels = pullback_levels(lift, a, args.kmax, args.max_atoms);

  std::cout << "# feketelab v1\n"
            << "k,error,energy,bound,inferred_C\n";
  for (int k = 1; k <= args.kmax; ++k) {
    const PullbackMeasure& nu = levels[k - 1];
    double err = equidist_error(mu, nu, phi);
    double energy = fk.energy_direct(nu);
    BoundReport rep =
        verify_bound(err, std::abs(energy), k, lift.degree(), nu.D(), phi, 1.0);
    std::cout << k << "," << fmt_g17(err) << "," << fmt_g17(energy) << ","
              << fmt_g17(rep.cauchy_bound) << "," << fmt_g17(rep.inferred_c) << "\n";
  }
  return kExitOk;
}

int cmd_pullback(const CommonArgs& args, int k, const std::string& dump_path) {
  HomLift lift = args.make_lift();
  ProjPoint a = parse_point(args.point_text);
  auto levels = pullback_levels(lift, a, k, args.max_atoms);
  std::ofstream out(dump_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open dump file: " + dump_path);
  out << levels.back().to_csv();
  return kExitOk;
}

int cmd_scan(const CommonArgs& args, int grid, int k) {
  HomLift lift = args.make_lift();
  GreenEvaluator green(lift);
  FeketeAnalyzer fk(green);
  std::cout << "# feketelab v1\n"
            << "re,im,energy,proximity_max\n";
  // equal-area partition: uniform cells in (cos(theta), azimuth)
  for (int i = 0; i < grid; ++i) {
    double t = -1.0 + 2.0 * (i + 0.5) / grid;
    for (int j = 0; j < 2 * grid; ++j) {
      double alpha = 2.0 * M_PI * (j + 0.5) / (2 * grid);
      ProjPoint a(std::sqrt(0.5 * (1.0 + t)) * Cpx(std::cos(alpha), std::sin(alpha)),
                  std::sqrt(0.5 * (1.0 - t)));
      auto levels = pullback_levels(lift, a, k, args.max_atoms);
      std::vector<std::int64_t> eta;
      for (const auto& nu : levels) eta.push_back(nu.eta());
      double energy = fk.energy_direct(levels.back());
      ProximityData prox = fk.proximity_terms(a, k, eta);
      Cpx z = a.affine_value();
      std::cout << fmt_g17(z.real()) << "," << fmt_g17(z.imag()) << "," << fmt_g17(energy) << ","
                << fmt_g17(prox.max_term) << "\n";
    }
  }
  return kExitOk;
}

RatForm json_to_ratform(const nlohmann::json& arr) {
  RatForm out;
  for (const auto& entry : arr) {
    mpq_class re, im(0);
    auto read = [](const nlohmann::json& v) {
      if (v.is_string()) return mpq_class(v.get<std::string>());
      if (v.is_number_integer()) return mpq_class(v.get<long>());
      throw std::invalid_argument(
          "nonarch lift coefficients must be integers or rational strings");
    };
    if (entry.is_array()) {
      if (entry.size() >= 1) re = read(entry[0]);
      if (entry.size() >= 2) im = read(entry[1]);
    } else {
      re = read(entry);
    }
    if (im != 0) throw std::invalid_argument("nonarch lifts must have rational coefficients");
    re.canonicalize();
    out.push_back(re);
  }
  return out;
}

int cmd_nonarch(const std::string& lift_arg, unsigned long prime, int kmax) {
  std::string text = lift_arg;
  if (!text.empty() && text[0] != '{') {
    std::ifstream in(lift_arg);
    if (!in) throw std::invalid_argument("cannot open lift file: " + lift_arg);
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  nlohmann::json doc = nlohmann::json::parse(text);
  RatForm P = json_to_ratform(doc.at("P"));
  RatForm Q = json_to_ratform(doc.at("Q"));
  if (doc.contains("d")) {
    int d = doc["d"].get<int>();
    if (static_cast<int>(P.size()) != d + 1 || static_cast<int>(Q.size()) != d + 1)
      throw std::invalid_argument("nonarch lift: coefficient count does not match degree");
  }
  GaussGreenReport rep = gauss_green(P, Q, prime, kmax);
  std::cout << rep.to_json() << "\n";
  return kExitOk;
}

// Closed-form oracle suite for the squaring family; prints one line per check.
int cmd_selftest() {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "PASS" : "FAIL") << ": " << name << "\n";
    if (!ok) ++failures;
  };

  HomLift sq = parse_map("z^2");
  GreenEvaluator green(sq);
  FeketeAnalyzer fk(green);

  bool energy_ok = true;
  auto levels = pullback_levels(sq, ProjPoint::affine(1.0), 10);
  for (int k = 1; k <= 10; ++k) {
    double expect = k * std::pow(2.0, -k) * std::log(2.0);
    if (std::abs(fk.energy_direct(levels[k - 1]) - expect) > 1e-9) energy_ok = false;
  }
  report("closed-form energy of the roots-of-unity tree (k = 1..10)", energy_ok);

  bool green_ok = true;
  for (int i = 0; i < 100; ++i) {
    double t = -0.99 + 1.98 * i / 99.0;
    ProjPoint p(std::sqrt(0.5 * (1.0 + t)) * Cpx(std::cos(2.7 * i), std::sin(2.7 * i)),
                std::sqrt(0.5 * (1.0 - t)));
    double a = std::abs(p.affine_value());
    double expect = std::log(std::max(a, 1.0)) - 0.5 * std::log1p(a * a);
    if (std::abs(green.escape_rate(p) - expect) > 1e-10) green_ok = false;
  }
  report("squaring-map Green function closed form (100 points)", green_ok);

  report("c_1 = log 2 and c_2 = 0",
         std::abs(fk.c_z_regular(ProjPoint::affine(1.0)) - std::log(2.0)) <= 1e-9 &&
             std::abs(fk.c_z_regular(ProjPoint::affine(2.0))) <= 1e-9);

  report("bifurcation potential log 4",
         std::abs(green.bifurcation_potential() - std::log(4.0)) <= 1e-9);

  report("exact resultants 1 and 4",
         sq.resultant() == Cpx(1.0) && parse_map("(z^2+1)/(2*z)").resultant() == Cpx(4.0));

  report("kernel values Phi(1,0) = 0 and Phi(2,inf) = -log 2",
         std::abs(green.phi_f(ProjPoint::affine(1.0), ProjPoint::affine(0.0))) <= 1e-11 &&
             std::abs(green.phi_f(ProjPoint::affine(2.0), ProjPoint::infinity()) + std::log(2.0)) <=
                 1e-11);

  {
    double ed = fk.energy_direct(levels[5]);
    double ec = fk.energy_cz(levels[5]);
    bool ok = std::abs(ed - ec) <= 1e-6 * std::max(std::abs(ed), std::abs(ec)) + 1e-9;
    auto zero_levels = pullback_levels(sq, ProjPoint::affine(0.0), 5);
    ok = ok && fk.energy_direct(zero_levels.back()) == 0.0 &&
         std::abs(fk.energy_cz(zero_levels.back())) <= 1e-9;
    report("route equality (direct vs c_z) at a = 1 and a = 0", ok);
  }

  {
    EtaGrowthReport r0 = eta_growth_probe(sq, ProjPoint::affine(0.0), 6);
    EtaGrowthReport r1 = eta_growth_probe(sq, ProjPoint::affine(1.0), 6);
    report("eta probes: a = 0 exceptional-candidate, a = 1 ordinary",
           r0.classification == "exceptional-candidate" && r1.classification == "ordinary" &&
               r1.sup_eta == 1);
  }

  {
    bool ok = vf_padic({1, 0, 1}, {0, 2, 0}, 2) == LogValue{mpq_class(1), false};
    std::mt19937_64 rng(12345);
    for (int i = 0; i < 100 && ok; ++i) {
      std::uniform_int_distribution<long> cn(-50, 50), cd(1, 20), rn(-4, 4), rd(1, 3);
      auto ball = [&] {
        mpq_class c(cn(rng), cd(rng));
        c.canonicalize();
        mpq_class rv(rn(rng), rd(rng));
        rv.canonicalize();
        return PadicBall::ball(3, c, rv);
      };
      auto [lhs, rhs] = gromov_check(ball(), ball());
      ok = lhs == rhs;
    }
    report("p-adic kernels: V_F value and Gromov identity", ok);
  }

  std::cout << (failures ? "SELFTEST FAILED\n" : "SELFTEST OK\n");
  return failures ? kExitNumeric : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feketelab: preimage configurations, dynamical kernels and energies"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string out_format = "csv", phi_name = "re", dump_path, lift_json;
  int k = 4, grid = 8;
  unsigned long prime = 2;

  auto add_common = [&](CLI::App* cmd, bool with_kmax = true) {
    auto* map_opt = cmd->add_option("--map", args.map_text, "map expression in z");
    cmd->add_option("--lift", args.lift_json, "coefficient-array JSON (inline or file)")
        ->excludes(map_opt);
    cmd->add_option("--point", args.point_text, "base point (complex literal or inf)");
    if (with_kmax) cmd->add_option("--kmax", args.kmax, "maximum pullback level");
    cmd->add_option("--max-atoms", args.max_atoms, "atom budget per level");
  };

  CLI::App* energy = app.add_subcommand("energy", "energy report per level");
  add_common(energy);
  energy->add_option("--out", out_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI::App* bounds = app.add_subcommand("bounds", "sandwich bounds with margins");
  add_common(bounds);

  CLI::App* equid = app.add_subcommand("equidist", "equidistribution error sweep");
  add_common(equid);
  equid->add_option("--phi", phi_name, "test function (re, im, height, bump)");

  CLI::App* pull = app.add_subcommand("pullback", "dump one preimage level as CSV");
  add_common(pull, false);
  pull->add_option("--k", k, "pullback level");
  pull->add_option("--dump", dump_path, "output CSV path")->required();

  CLI::App* scan = app.add_subcommand("scan", "energy over a sphere grid of base points");
  auto* scan_map = scan->add_option("--map", args.map_text, "map expression in z");
  scan->add_option("--lift", args.lift_json, "coefficient-array JSON (inline or file)")
      ->excludes(scan_map);
  scan->add_option("--grid", grid, "polar bands (cells = 2 grid^2)");
  scan->add_option("--k", k, "pullback level");
  scan->add_option("--max-atoms", args.max_atoms, "atom budget per level");

  CLI::App* nonar = app.add_subcommand("nonarch", "exact p-adic kernel report");
  nonar->add_option("--lift", lift_json, "rational lift JSON (inline or a file path)")->required();
  nonar->add_option("--prime", prime, "prime p");
  nonar->add_option("--kmax", args.kmax, "Gauss-norm iterations (<= 6)");

  app.add_subcommand("selftest", "closed-form oracle suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("energy")) return cmd_energy(args, out_format);
    if (app.got_subcommand("bounds")) return cmd_bounds(args);
    if (app.got_subcommand("equidist")) return cmd_equidist(args, phi_name);
    if (app.got_subcommand("pullback")) return cmd_pullback(args, k, dump_path);
    if (app.got_subcommand("scan")) return cmd_scan(args, grid, k);
    if (app.got_subcommand("nonarch")) return cmd_nonarch(lift_json, prime, args.kmax);
    if (app.got_subcommand("selftest")) return cmd_selftest();
  } catch (const BudgetError& e) {
    std::cerr << "error: budget: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: numeric: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
