#include "cli.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gensol/examples.hpp"
#include "gensol/io.hpp"

namespace gensol::cli {

namespace {

struct VerifyArgs {
  std::string cert;
  int battery_size = 12;
  std::uint64_t seed = 1;
  double tol_scale = 10;
  bool finer = false;
  std::string report;
  std::string plot;
};

struct ConvertArgs {
  std::string from, to, cert, out, config;
  SolverOptions solver;
  bool rays_set = false;
};

struct ExampleArgs {
  std::string name, out, system = "incompressible", topology, kind = "envar";
  int grid = 16, steps = 8, dim = 2;
  double T = 1.0, gamma = 2.0, alpha = 0.5, level = 1.0;
};

const EnVarCert& envar_part(const Certificate& c) {
  return c.index() == 0 ? std::get<EnVarCert>(c) : std::get<DissWeakCert>(c).base;
}

SystemSpec system_of(const Certificate& c) {
  if (const auto* mv = std::get_if<MVCert>(&c)) return mv->system;
  return envar_part(c).system;
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

void write_plot(const std::string& path, const Certificate& c) {
  std::ostringstream csv;
  csv << "t,E,energy,zeta,budget\n";
  if (const auto* mv = std::get_if<MVCert>(&c)) {
    for (int i = 0; i < mv->time.count(); ++i) {
      const double E = mv_energy(*mv, i);
      const double gap = jensen_gap(*mv, i);
      csv << fmt(mv->time.at(i)) << ',' << fmt(E) << ',' << fmt(E - gap) << ',' << fmt(gap) << ',' << fmt(gap) << '\n';
    }
  } else {
    const EnVarCert& b = envar_part(c);
    const auto* d = std::get_if<DissWeakCert>(&c);
    for (int i = 0; i < b.traj.time.count(); ++i) {
      const double e = energy(b.system, b.traj.grid, b.traj.states[i]);
      csv << fmt(b.traj.time.at(i)) << ',' << fmt(b.E[i]) << ',' << fmt(e) << ',' << fmt(b.E[i] - e) << ',';
      if (d) csv << fmt(defect_budget(b.system, d->r1[i], b.system.compressible() ? &d->r2[i] : nullptr));
      csv << '\n';
    }
  }
  write_text_atomic(path, csv.str());
}

int cmd_verify(const VerifyArgs& a) {
  const Certificate c = certificate_from_json(read_json_file(a.cert));
  Grid g;
  TimeGrid t;
  SystemSpec sys;
  if (const auto* mv = std::get_if<MVCert>(&c)) {
    g = mv->grid, t = mv->time, sys = mv->system;
  } else {
    const EnVarCert& b = envar_part(c);
    g = b.traj.grid, t = b.traj.time, sys = b.system;
  }
  VerifyOptions opt = VerifyOptions::standard(sys, g, t, a.battery_size, a.seed, a.tol_scale);
  opt.finer = a.finer;
  Report r;
  switch (c.index()) {
    case 0: r = verify_envar(std::get<EnVarCert>(c), opt); break;
    case 1: r = verify_dissweak(std::get<DissWeakCert>(c), opt); break;
    default: r = verify_mv(std::get<MVCert>(c), opt); break;
  }
  if (!a.report.empty()) write_text_atomic(a.report, report_to_json(r).dump(2) + "\n");
  if (!a.plot.empty()) write_plot(a.plot, c);
  std::cout << (r.pass() ? "PASS" : "FAIL") << ' ' << kind_name(c) << " checks=" << r.checks()
            << " failures=" << r.failures();
  if (!r.pass()) {
    std::cout << " failed:";
    for (const auto& name : r.clauses())
      if (r.clause_failed(name)) std::cout << ' ' << name;
  }
  std::cout << '\n';
  return r.pass() ? kOk : kVerifyFailed;
}

void load_solver_config(ConvertArgs& a) {
  if (a.config.empty()) return;
  const Json j = read_json_file(a.config);
  const Json& s = j.contains("solver") ? j["solver"] : j;
  if (!s.is_object()) throw InputError(a.config + ": expected a solver options object");
  try {
    if (s.contains("rays") && !a.rays_set) a.solver.rays = s["rays"].get<int>();
    if (s.contains("max_iters")) a.solver.max_iters = s["max_iters"].get<int>();
    if (s.contains("tol")) a.solver.tol = number_from_json(s["tol"], "solver.tol");
    if (s.contains("seed")) a.solver.seed = s["seed"].get<std::uint64_t>();
    if (s.contains("battery_size")) a.solver.battery_size = s["battery_size"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(a.config + ": " + e.what());
  }
}

int cmd_convert(ConvertArgs a) {
  if (a.from == a.to) throw InputError("--from and --to must differ");
  load_solver_config(a);
  const Certificate c = certificate_from_json(read_json_file(a.cert));
  if (kind_name(c) != a.from)
    throw InputError("--from " + a.from + " does not match the certificate kind " + kind_name(c));

  std::optional<Certificate> cur = c;
  auto step = [&](const std::string& to) -> int {
    if (to == "dissweak") {
      const EnVarCert e = std::get<EnVarCert>(*cur);
      if (!a.rays_set && e.traj.grid.dim != 2) a.solver.rays = SolverOptions::defaults_for(e.traj.grid.dim).rays;
      const ConversionOutcome out = envar_to_diss(e, a.solver);
      if (out.status != SolveStatus::Feasible) {
        std::cerr << "envar -> dissweak: " << to_string(out.status) << ", violation " << fmt(out.violation)
                  << " (slab " << out.worst_slab << ")";
        if (!out.message.empty()) std::cerr << ": " << out.message;
        std::cerr << '\n';
        return out.status == SolveStatus::Infeasible ? kInfeasible : kNonConverged;
      }
      double bmass = 0;
      for (double b : out.boundary_mass) bmass = std::max(bmass, b);
      std::cerr << "envar -> dissweak: feasible, violation " << fmt(out.violation) << ", boundary mass " << fmt(bmass)
                << '\n';
      cur = *out.cert;
    } else if (to == "mv") {
      cur = diss_to_mv(std::get<DissWeakCert>(*cur));
    } else if (to == "envar") {
      if (cur->index() == 1)
        cur = std::get<DissWeakCert>(*cur).base;  // compressible: the defects are simply dropped
      else
        cur = mv_to_envar(std::get<MVCert>(*cur));
    }
    return kOk;
  };

  std::vector<std::string> path;
  const bool incompressible = !system_of(c).compressible();
  if (a.from == "envar" && a.to == "dissweak") path = {"dissweak"};
  else if (a.from == "envar" && a.to == "mv") path = {"dissweak", "mv"};
  else if (a.from == "dissweak" && a.to == "mv") path = {"mv"};
  else if (a.from == "dissweak" && a.to == "envar") path = incompressible ? std::vector<std::string>{"mv", "envar"} : std::vector<std::string>{"envar"};
  else if (a.from == "mv" && a.to == "envar") path = {"envar"};
  else if (a.from == "mv" && a.to == "dissweak") path = {"envar", "dissweak"};
  else throw InputError("unsupported conversion " + a.from + " -> " + a.to);
  if (!incompressible && (a.from == "mv" || a.to == "mv"))
    throw InputError("measure-valued certificates are implemented for the incompressible system only");

  for (const auto& to : path) {
    const int rc = step(to);
    if (rc != kOk) return rc;
  }
  write_text_atomic(a.out, certificate_to_json(*cur).dump() + "\n");
  return kOk;
}

int cmd_example(const ExampleArgs& a) {
  const bool torus_default = a.name == "shear" || a.name == "poisson-mms";
  const Topology topo = a.topology.empty() ? (torus_default ? Topology::Torus : Topology::Box) : topology_from_string(a.topology);
  if (a.grid < 3) throw InputError("--grid must be at least 3");
  const Grid g = Grid::unit(a.dim, topo, a.grid);
  const TimeGrid t{a.T, a.steps};
  t.validate();
  SystemSpec sys{system_kind_from_string(a.system), a.gamma, a.name == "poisson-mms" ? a.alpha : 0.0};
  if (a.name == "poisson-mms") sys.kind = SystemKind::EulerPoisson;
  if (a.name == "shear" || a.name == "energy-jump") sys = SystemSpec{};
  sys.validate();

  EnVarCert base;
  std::optional<DissWeakCert> with_defect;
  std::string expect = "verifies as envar and, with zero defects, as dissweak";
  if (a.name == "zero") {
    base = example_zero(sys, g, t);
  } else if (a.name == "shear") {
    base = example_shear(g, t);
    expect = "exact steady solution; verifies at tol with h = 1/grid";
  } else if (a.name == "constant-state") {
    base = example_constant_state(sys, g, t);
    expect = "exact solution of the compressible system";
  } else if (a.name == "energy-jump") {
    with_defect = example_energy_jump(g, t, a.level);
    base = with_defect->base;
    expect = "v = 0 with E = level: envar holds strictly, the defect (2 level/(d |Omega|)) I dx certifies dissweak";
  } else if (a.name == "poisson-mms") {
    base = example_poisson_mms(sys, g, t);
    expect = "uniform frictional decay, exact for Euler-Poisson with friction alpha";
  } else {
    throw InputError("unknown example '" + a.name + "'");
  }

  Certificate c = base;
  if (a.kind == "dissweak") {
    c = with_defect ? *with_defect : with_zero_defects(base);
  } else if (a.kind == "mv") {
    if (sys.compressible()) throw InputError("mv examples are incompressible only");
    c = diss_to_mv(with_defect ? *with_defect : with_zero_defects(base));
  } else if (a.kind != "envar") {
    throw InputError("--kind must be envar, dissweak or mv");
  }
  Json j = certificate_to_json(c);
  j["expected"] = Json{{"verify", "pass"}, {"example", a.name}, {"note", expect}};
  write_text_atomic(a.out, j.dump() + "\n");
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Verify and convert generalized-solution certificates", "gensol"};
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Check a certificate clause by clause");
  verify->add_option("--cert", va.cert, "Certificate JSON")->required();
  verify->add_option("--battery-size", va.battery_size, "Number of test functions")->check(CLI::PositiveNumber);
  verify->add_option("--seed", va.seed, "Battery seed");
  verify->add_option("--tol-scale", va.tol_scale, "C_tol in C_tol (h^2 + dt^2)(1 + scale)")->check(CLI::PositiveNumber);
  verify->add_flag("--finer", va.finer, "Euler-Poisson: use the finer regularity weight");
  verify->add_option("--report", va.report, "Write the report JSON here");
  verify->add_option("--plot-data", va.plot, "Write t, E, energy, zeta, budget as CSV");

  ConvertArgs ca;
  auto* convert = app.add_subcommand("convert", "Convert between solution concepts");
  const std::vector<std::string> kinds{"envar", "dissweak", "mv"};
  convert->add_option("--from", ca.from)->required()->check(CLI::IsMember(kinds));
  convert->add_option("--to", ca.to)->required()->check(CLI::IsMember(kinds));
  convert->add_option("--cert", ca.cert, "Input certificate")->required();
  convert->add_option("--out", ca.out, "Output certificate")->required();
  convert->add_option("--config", ca.config, "JSON solver options {rays, max_iters, tol, seed}");
  auto* rays = convert->add_option("--rays", ca.solver.rays, "Ray fan size");
  convert->add_option("--max-iters", ca.solver.max_iters)->check(CLI::PositiveNumber);
  convert->add_option("--solver-tol", ca.solver.tol, "Constraint tolerance constant")->check(CLI::PositiveNumber);
  convert->add_option("--seed", ca.solver.seed, "Battery seed");
  convert->add_option("--battery-size", ca.solver.battery_size)->check(CLI::PositiveNumber);

  ExampleArgs ea;
  auto* example = app.add_subcommand("example", "Write a generator certificate");
  example->add_option("--name", ea.name)
      ->required()
      ->check(CLI::IsMember({"zero", "shear", "constant-state", "energy-jump", "poisson-mms"}));
  example->add_option("--grid", ea.grid, "Cells per axis");
  example->add_option("--T", ea.T, "Final time");
  example->add_option("--steps", ea.steps, "Time steps");
  example->add_option("--out", ea.out)->required();
  example->add_option("--system", ea.system, "incompressible, isentropic, korteweg or poisson");
  example->add_option("--dim", ea.dim)->check(CLI::Range(1, 3));
  example->add_option("--topology", ea.topology, "box or torus");
  example->add_option("--kind", ea.kind, "envar, dissweak or mv");
  example->add_option("--gamma", ea.gamma);
  example->add_option("--alpha", ea.alpha);
  example->add_option("--level", ea.level, "energy-jump: the constant E");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e);
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kBadInput;
  }
  try {
    if (*verify) return cmd_verify(va);
    if (*convert) {
      ca.rays_set = rays->count() > 0;
      return cmd_convert(ca);
    }
    return cmd_example(ea);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
}

}  // namespace gensol::cli
