#include "cli.hpp"

#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "peakon/bihamiltonian.hpp"
#include "peakon/errors.hpp"
#include "peakon/field.hpp"
#include "peakon/first_integrals.hpp"
#include "peakon/io.hpp"
#include "peakon/sampling.hpp"
#include "peakon/two_peakon.hpp"

namespace peakon::cli {

namespace {

struct SimulateArgs {
  std::string config;
  std::optional<std::string> trajectory;
  std::optional<std::string> events;
};

struct IntegralsArgs {
  std::optional<std::string> state;
  std::size_t n = 3;
  int s = 2;
  std::uint64_t seed = 1;
  bool rescaled = false;
  std::uint64_t max_terms = EnumerationBudget{}.max_terms;
};

struct VerifyArgs {
  std::size_t n = 3;
  std::size_t samples = 50;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::optional<int> s;
  std::size_t grid = 20;
  double s0 = 2.0;
  double band = 1e-3;
};

struct ProfileArgs {
  std::string state;
  double xmin = -10.0;
  double xmax = 10.0;
  std::size_t points = 1001;
  std::optional<std::string> out;
  std::optional<std::string> sidecar;
};

int simulate(const SimulateArgs& a, std::ostream& out) {
  if (a.config.empty()) throw InvalidArgument("simulate needs a scenario file");
  const ScenarioConfig cfg = scenario_from_json(read_json_file(a.config));
  const Trajectory traj = integrate(cfg.initial_state(), cfg.t_end, cfg.integrator());
  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  const std::string events = events_to_json(traj).dump(2) + "\n";
  const auto traj_path = a.trajectory ? a.trajectory : cfg.trajectory_path;
  const auto events_path = a.events ? a.events : cfg.events_path;
  if (traj_path) {
    write_text_file(*traj_path, csv.str());
  } else {
    out << csv.str();
  }
  if (events_path) {
    write_text_file(*events_path, events);
  } else if (traj_path) {
    out << events;
  }
  return kOk;
}

int integrals(const IntegralsArgs& a, std::ostream& out) {
  if (a.s < 0) throw InvalidArgument("--s must be non-negative");
  PeakonState state;
  if (a.state) {
    state = state_from_json(read_json_file(*a.state));
  } else {
    if (a.n == 0) throw InvalidArgument("--n must be positive");
    auto rng = sample_rng(a.seed, 0);
    state = random_state(a.n, rng);
  }
  const EnumerationBudget budget{a.max_terms};
  for (int s = 0; s <= a.s; ++s) check_budget(state.size(), s, budget);
  const auto values = integral_table(a.s, state, a.rescaled ? Convention::rescaled : Convention::theorem, budget);
  out << integrals_to_json(values).dump(2) << "\n";
  return kOk;
}

VerificationReport csum_report(int s_max) {
  if (s_max < 0) throw InvalidArgument("--s must be non-negative");
  VerificationReport r;
  r.check = "csum";
  r.tolerance = 0.0;
  std::uint64_t fact = 1;
  for (int s = 0; s <= s_max; ++s) {
    if (s > 0) fact *= static_cast<std::uint64_t>(s);
    std::uint64_t sum = 0;
    for (const auto& rho : enumerate_rho(s)) sum += rho.coefficient;
    ++r.samples;
    const double diff = sum > fact ? static_cast<double>(sum - fact) : static_cast<double>(fact - sum);
    if (sum != fact) {
      r.pass = false;
      r.failures.push_back({static_cast<std::size_t>(s), diff,
                            "s=" + std::to_string(s) + " sum=" + std::to_string(sum) + " s!=" + std::to_string(fact)});
    }
    r.max_residual = std::max(r.max_residual, diff);
  }
  return r;
}

int verify(const std::string& which, const VerifyArgs& a, std::ostream& out) {
  VerificationReport r;
  if (which == "sn") {
    r = verify_structure(a.n, a.samples, a.seed, a.tol.value_or(1e-10));
  } else if (which == "recursion") {
    r = verify_recursion(a.n, a.s.value_or(3), a.samples, a.seed, a.tol.value_or(1e-9));
  } else if (which == "involution") {
    r = verify_involution(a.n, a.s.value_or(3), a.samples, a.seed, a.tol.value_or(1e-10));
  } else if (which == "csum") {
    r = csum_report(a.s.value_or(7));
  } else if (which == "collision2") {
    ClassifierSweep sweep;
    sweep.grid = a.grid;
    sweep.s0 = a.s0;
    sweep.band = a.band;
    r = verify_collision_classifier(sweep);
  } else {
    throw InvalidArgument("unknown verify check '" + which + "'");
  }
  out << report_to_json(r).dump(2) << "\n";
  return r.pass ? kOk : kVerifyFailed;
}

int profile(const ProfileArgs& a, std::ostream& out) {
  const PeakonState state = state_from_json(read_json_file(a.state));
  const WaveProfile w = sample_profile(state, a.xmin, a.xmax, a.points);
  std::ostringstream csv;
  write_profile_csv(csv, w);
  if (a.out) {
    write_text_file(*a.out, csv.str());
  } else {
    out << csv.str();
  }
  if (a.sidecar) write_text_file(*a.sidecar, profile_sidecar(state).dump(2) + "\n");
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multipeakon simulation and verification toolkit", "peakon_lab"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Integrate a scenario and export trajectory and collision events");
  c_sim->add_option("config,--config", sim.config, "Scenario JSON");
  c_sim->add_option("--trajectory", sim.trajectory, "Trajectory CSV output (default: stdout)");
  c_sim->add_option("--events", sim.events, "Event JSON output");

  IntegralsArgs ia;
  auto* c_int = app.add_subcommand("integrals", "Print H_0..H_s at a state");
  c_int->add_option("--state", ia.state, "State JSON {q, p}");
  c_int->add_option("--n", ia.n, "Peakons in a random state when --state is absent");
  c_int->add_option("--s", ia.s, "Highest order");
  c_int->add_option("--seed", ia.seed, "Seed for the random state");
  c_int->add_flag("--rescaled", ia.rescaled, "Scale H_s by s + 1");
  c_int->add_option("--max-terms", ia.max_terms, "Enumeration budget");

  VerifyArgs va;
  std::string check;
  auto* c_ver = app.add_subcommand("verify", "Run a verification suite and print its report");
  c_ver->add_option("check", check, "sn | recursion | involution | csum | collision2")
      ->required()
      ->check(CLI::IsMember({"sn", "recursion", "involution", "csum", "collision2"}));
  c_ver->add_option("--n", va.n, "Peakons per random state");
  c_ver->add_option("--samples", va.samples, "Random states");
  c_ver->add_option("--seed", va.seed, "Seed");
  c_ver->add_option("--tol", va.tol, "Tolerance");
  c_ver->add_option("--s", va.s, "Highest order");
  c_ver->add_option("--grid", va.grid, "Grid points per momentum axis (collision2)");
  c_ver->add_option("--s0", va.s0, "Initial gap (collision2)");
  c_ver->add_option("--band", va.band, "Excluded band around the collision boundary (collision2)");

  ProfileArgs pa;
  auto* c_pro = app.add_subcommand("profile", "Sample u and u_x on a grid");
  c_pro->add_option("--state", pa.state, "State JSON {q, p}")->required();
  c_pro->add_option("--xmin", pa.xmin, "Left end");
  c_pro->add_option("--xmax", pa.xmax, "Right end");
  c_pro->add_option("--points", pa.points, "Grid points");
  c_pro->add_option("--out", pa.out, "CSV output (default: stdout)");
  c_pro->add_option("--sidecar", pa.sidecar, "JSON sidecar output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (c_sim->parsed()) return simulate(sim, out);
    if (c_int->parsed()) return integrals(ia, out);
    if (c_ver->parsed()) return verify(check, va, out);
    if (c_pro->parsed()) return profile(pa, out);
  } catch (const IntegrationError& e) {
    err << "integration failed: " << e.what() << "\n";
    return kIntegrationFailure;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kBudgetExceeded;
  } catch (const PeakonError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace peakon::cli
