// Command line front end: scenario generation, reduction, plan optimization,
// mode comparison, MPS export, and a synthetic full-scale instance.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relayplan/demo.hpp"
#include "relayplan/json_io.hpp"
#include "relayplan/milp_build.hpp"
#include "relayplan/mps.hpp"
#include "relayplan/pipeline.hpp"

namespace rp = relayplan;
namespace fs = std::filesystem;

namespace {

class TeeLog {
 public:
  explicit TeeLog(const std::string& path) : file_(path, std::ios::binary) {
    if (!file_) throw rp::ArgumentError("cannot write " + path);
  }
  void line(const std::string& s) {
    std::cout << s << "\n";
    file_ << s << "\n";
  }
  std::function<void(const std::string&)> fn() {
    return [this](const std::string& s) { line(s); };
  }

 private:
  std::ofstream file_;
};

std::string money(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  rp::write_text_file(path, j.dump(2) + "\n");
}

// Config-file knobs that each subcommand may override from the command line.
// The same instance backs every subcommand, so values are optionals set only
// by the subcommand that actually parsed.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> scenario_count;
  std::optional<int> reduce_to;
  std::optional<double> rate;
  std::optional<double> intensity;
  std::optional<std::string> mode;
  std::optional<std::string> method;
  std::optional<double> gap;
  std::optional<double> time_limit;
  std::optional<int> threads;

  void add_generation(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "random seed (overrides config)");
    cmd->add_option("--scenarios", scenario_count, "scenarios to draw");
    cmd->add_option("--rate", rate, "per-period hub disruption probability");
    cmd->add_option("--intensity", intensity, "travel time factor when disrupted");
    cmd->add_option("--threads", threads, "worker threads");
  }
  void add_reduction(CLI::App* cmd) {
    cmd->add_option("--reduce-to", reduce_to, "scenarios to keep");
  }
  void add_solving(CLI::App* cmd, bool with_mode) {
    if (with_mode) cmd->add_option("--mode", mode, "plan mode: dynamic or static");
    cmd->add_option("--method", method, "auto, decomposition, milp, or enumeration");
    cmd->add_option("--gap", gap, "relative optimality gap");
    cmd->add_option("--time-limit", time_limit, "wall clock limit in seconds");
  }

  void apply(rp::RunConfig& cfg) const {
    if (seed) cfg.seed = *seed;
    if (scenario_count) cfg.scenario_count = *scenario_count;
    if (reduce_to) cfg.reduce_to = *reduce_to;
    if (rate) cfg.disruption_rate = *rate;
    if (intensity) cfg.disruption_intensity = *intensity;
    if (mode) cfg.mode = *mode;
    if (method) cfg.method = *method;
    if (gap) cfg.gap = *gap;
    if (time_limit) cfg.time_limit_seconds = *time_limit;
    if (threads) cfg.threads = *threads;
  }
};

struct Inputs {
  rp::RunConfig cfg;
  rp::Network net;
};

Inputs load_inputs(const std::string& network_path, const std::string& config_path,
                   const Overrides& over) {
  Inputs in;
  if (!config_path.empty()) in.cfg = rp::run_config_from_json(rp::load_json_file(config_path));
  over.apply(in.cfg);
  in.cfg.horizon.validate();
  rp::NetworkSpec spec = rp::network_spec_from_json(rp::load_json_file(network_path));
  in.net = rp::build_relay_network(spec, in.cfg.build);
  return in;
}

// Scenario list a solve works on: loaded verbatim from --scenario-file, else
// generated from the config and reduced when reduce_to asks for fewer.
struct PreparedScenarios {
  std::vector<rp::Scenario> scenarios;
  bool reduced = false;
  rp::ReductionResult reduction;
};

PreparedScenarios prepare_scenarios(const Inputs& in, const std::string& scenario_path,
                                    const std::function<void(const std::string&)>& log) {
  PreparedScenarios prep;
  if (!scenario_path.empty()) {
    prep.scenarios = rp::scenarios_from_json(rp::load_json_file(scenario_path));
    log("loaded " + std::to_string(prep.scenarios.size()) + " scenarios from " + scenario_path);
    return prep;
  }
  auto full = rp::generate_scenarios(in.net, in.cfg);
  log("generated " + std::to_string(full.size()) + " scenarios (seed " +
      std::to_string(in.cfg.seed) + ")");
  if (in.cfg.reduce_to > 0 && in.cfg.reduce_to < static_cast<int>(full.size())) {
    rp::ReducedScenarios red =
        rp::reduce_scenarios(in.net, full, in.cfg.reduce_to, in.cfg.threads);
    prep.scenarios = std::move(red.scenarios);
    prep.reduction = std::move(red.info);
    prep.reduced = true;
    log("fast forward selection kept " + std::to_string(prep.scenarios.size()) +
        ", transport distance " + money(prep.reduction.distance));
  } else {
    prep.scenarios = std::move(full);
  }
  return prep;
}

nlohmann::json run_meta(const rp::RunConfig& cfg, const rp::PlanResult& res, int scenarios_used) {
  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["scenarios"] = scenarios_used;
  j["mode"] = res.plan.is_static() ? "static" : "dynamic";
  j["method"] = res.method;
  j["objective"] = res.objective;
  j["bound"] = res.bound;
  j["gap"] = res.gap;
  return j;
}

void log_result(TeeLog& log, const std::string& label, const rp::PlanResult& res) {
  log.line(label + ": objective " + money(res.objective) + " (hub " +
           money(res.breakdown.hub_cost) + ", transport " + money(res.breakdown.flow_cost) +
           ", penalty " + money(res.breakdown.penalty_cost) + ")");
  log.line(label + ": method " + res.method + ", gap " + money(100.0 * res.gap) + "%, " +
           money(res.wall_seconds) + "s");
}

int cmd_generate(const std::string& network_path, const std::string& config_path,
                 const Overrides& over, const std::string& out_path) {
  Inputs in = load_inputs(network_path, config_path, over);
  auto full = rp::generate_scenarios(in.net, in.cfg);
  write_json_file(out_path, rp::to_json(full));
  std::cout << "wrote " << full.size() << " scenarios to " << out_path << "\n";
  return 0;
}

int cmd_reduce(const std::string& network_path, const std::string& config_path,
               const Overrides& over, const std::string& in_path, const std::string& out_path,
               const std::string& report_path) {
  Inputs in = load_inputs(network_path, config_path, over);
  auto full = rp::scenarios_from_json(rp::load_json_file(in_path));
  rp::ReducedScenarios red =
      rp::reduce_scenarios(in.net, full, in.cfg.reduce_to, in.cfg.threads);
  write_json_file(out_path, rp::to_json(red.scenarios));
  if (!report_path.empty()) rp::write_text_file(report_path, rp::reduction_to_csv(red.info));
  std::cout << "kept " << red.scenarios.size() << " of " << full.size()
            << " scenarios, transport distance " << money(red.info.distance) << "\n";
  return 0;
}

int cmd_solve(const std::string& network_path, const std::string& config_path,
              const Overrides& over, const std::string& scenario_path,
              const std::string& out_dir) {
  Inputs in = load_inputs(network_path, config_path, over);
  fs::create_directories(out_dir);
  TeeLog log(out_dir + "/log.txt");
  PreparedScenarios prep = prepare_scenarios(in, scenario_path, log.fn());
  rp::ScenarioSet set = rp::split_seasons(prep.scenarios, in.cfg.horizon);

  rp::SolveRun run = rp::run_solve(in.net, in.cfg, set, in.cfg.plan_mode(), log.fn());
  log_result(log, in.cfg.mode, run.result);

  rp::CostTable costs = in.cfg.cost_table(in.net.num_hubs());
  write_json_file(out_dir + "/solution.json", rp::solution_to_json(run.result, costs));
  nlohmann::json rj;
  rj["metrics"] = rp::report_to_json(run.report);
  rj["run"] = run_meta(in.cfg, run.result, static_cast<int>(prep.scenarios.size()));
  write_json_file(out_dir + "/report.json", rj);
  rp::write_text_file(out_dir + "/report.csv", rp::report_to_csv(run.report));
  write_json_file(out_dir + "/scenarios_used.json", rp::to_json(prep.scenarios));
  if (prep.reduced)
    rp::write_text_file(out_dir + "/reduction_report.csv", rp::reduction_to_csv(prep.reduction));
  log.line("outputs in " + out_dir);
  return 0;
}

int cmd_compare(const std::string& network_path, const std::string& config_path,
                const Overrides& over, const std::string& scenario_path,
                const std::string& out_dir) {
  Inputs in = load_inputs(network_path, config_path, over);
  fs::create_directories(out_dir);
  TeeLog log(out_dir + "/log.txt");
  PreparedScenarios prep = prepare_scenarios(in, scenario_path, log.fn());
  rp::ScenarioSet set = rp::split_seasons(prep.scenarios, in.cfg.horizon);
  rp::CostTable costs = in.cfg.cost_table(in.net.num_hubs());

  std::vector<rp::LabeledReport> runs;
  for (rp::PlanMode mode : {rp::PlanMode::Static, rp::PlanMode::Dynamic}) {
    std::string label = rp::to_string(mode);
    rp::SolveRun run = rp::run_solve(in.net, in.cfg, set, mode, log.fn());
    log_result(log, label, run.result);
    write_json_file(out_dir + "/solution_" + label + ".json",
                    rp::solution_to_json(run.result, costs));
    nlohmann::json rj;
    rj["metrics"] = rp::report_to_json(run.report);
    rj["run"] = run_meta(in.cfg, run.result, static_cast<int>(prep.scenarios.size()));
    write_json_file(out_dir + "/report_" + label + ".json", rj);
    runs.push_back({label, run.report});
  }
  rp::write_text_file(out_dir + "/comparison.csv", rp::compare_to_csv(runs));
  write_json_file(out_dir + "/comparison.json", rp::compare_to_json(runs));
  write_json_file(out_dir + "/scenarios_used.json", rp::to_json(prep.scenarios));
  if (prep.reduced)
    rp::write_text_file(out_dir + "/reduction_report.csv", rp::reduction_to_csv(prep.reduction));
  double delta = runs[1].report.total_cost - runs[0].report.total_cost;
  log.line("dynamic minus static total cost: " + money(delta));
  log.line("outputs in " + out_dir);
  return 0;
}

int cmd_export_mps(const std::string& network_path, const std::string& config_path,
                   const Overrides& over, const std::string& scenario_path,
                   const std::string& out_path) {
  Inputs in = load_inputs(network_path, config_path, over);
  auto noop = [](const std::string&) {};
  PreparedScenarios prep = prepare_scenarios(in, scenario_path, noop);
  rp::ScenarioSet set = rp::split_seasons(prep.scenarios, in.cfg.horizon);
  rp::CostTable costs = in.cfg.cost_table(in.net.num_hubs());
  rp::MilpInstance inst = rp::build_deterministic_equivalent(in.net, in.cfg.horizon, costs, set,
                                                             in.cfg.plan_mode());
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw rp::ArgumentError("cannot write " + out_path);
  rp::write_mps(inst, out);
  if (!out) throw rp::ArgumentError("short write to " + out_path);
  std::cout << "wrote " << inst.num_rows() << " rows x " << inst.num_cols() << " cols to "
            << out_path << "\n";
  return 0;
}

int cmd_demo(const std::string& out_dir, std::uint64_t seed, bool verify) {
  rp::DemoInstance demo = rp::make_demo_instance(seed);
  fs::create_directories(out_dir);
  write_json_file(out_dir + "/network.json", rp::to_json(demo.network));
  write_json_file(out_dir + "/config.json", rp::to_json(demo.config));
  std::cout << "wrote demo instance (" << demo.network.nodes.size() << " nodes, "
            << demo.network.od_pairs.size() << " od pairs) to " << out_dir << "\n";
  if (verify) {
    rp::Network net = rp::build_relay_network(demo.network, demo.config.build);
    auto full = rp::generate_scenarios(net, demo.config);
    rp::ReducedScenarios red =
        rp::reduce_scenarios(net, full, demo.config.reduce_to, demo.config.threads);
    rp::ScenarioSet set = rp::split_seasons(red.scenarios, demo.config.horizon);
    rp::CostTable costs = demo.config.cost_table(net.num_hubs());
    rp::Evaluator ev(net, demo.config.horizon, costs, set);
    if (!ev.certificate().holds)
      throw rp::SolverError("demo instance lost its routing dominance margin: " +
                            ev.certificate().blocker);
    std::cout << "routing dominance certificate holds, min margin "
              << money(ev.certificate().min_margin) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relay hub capacity planning toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "relayplan 0.1.0");

  std::string network_path, config_path, scenario_path, in_path, out_path, report_path, out_dir;
  std::uint64_t demo_seed = 1;
  bool demo_verify = true;
  Overrides over;
  std::function<int()> action;

  auto* gen = app.add_subcommand("generate", "draw demand and disruption scenarios");
  gen->add_option("--network", network_path, "network json")->required();
  gen->add_option("--config", config_path, "config json");
  gen->add_option("--out", out_path, "output scenario json")->required();
  over.add_generation(gen);
  gen->callback([&]() { action = [&]() { return cmd_generate(network_path, config_path, over, out_path); }; });

  auto* red = app.add_subcommand("reduce", "shrink a scenario set by fast forward selection");
  red->add_option("--network", network_path, "network json")->required();
  red->add_option("--config", config_path, "config json");
  red->add_option("--in", in_path, "input scenario json")->required();
  red->add_option("--out", out_path, "output scenario json")->required();
  red->add_option("--report", report_path, "selection report csv");
  over.add_reduction(red);
  red->add_option("--threads", over.threads, "worker threads");
  red->callback([&]() {
    action = [&]() { return cmd_reduce(network_path, config_path, over, in_path, out_path, report_path); };
  });

  auto* sol = app.add_subcommand("solve", "optimize a capacity plan");
  sol->add_option("--network", network_path, "network json")->required();
  sol->add_option("--config", config_path, "config json");
  sol->add_option("--scenario-file", scenario_path, "scenario json (skips generation)");
  sol->add_option("--out", out_dir, "output directory")->required();
  over.add_generation(sol);
  over.add_reduction(sol);
  over.add_solving(sol, true);
  sol->callback([&]() {
    action = [&]() { return cmd_solve(network_path, config_path, over, scenario_path, out_dir); };
  });

  auto* cmp = app.add_subcommand("compare", "solve both plan modes and diff the reports");
  cmp->add_option("--network", network_path, "network json")->required();
  cmp->add_option("--config", config_path, "config json");
  cmp->add_option("--scenario-file", scenario_path, "scenario json (skips generation)");
  cmp->add_option("--out", out_dir, "output directory")->required();
  over.add_generation(cmp);
  over.add_reduction(cmp);
  over.add_solving(cmp, false);
  cmp->callback([&]() {
    action = [&]() { return cmd_compare(network_path, config_path, over, scenario_path, out_dir); };
  });

  auto* exp = app.add_subcommand("export-mps", "write the deterministic equivalent as MPS");
  exp->add_option("--network", network_path, "network json")->required();
  exp->add_option("--config", config_path, "config json");
  exp->add_option("--scenario-file", scenario_path, "scenario json (skips generation)");
  exp->add_option("--out", out_path, "output mps path")->required();
  over.add_generation(exp);
  over.add_reduction(exp);
  over.add_solving(exp, true);
  exp->callback([&]() {
    action = [&]() { return cmd_export_mps(network_path, config_path, over, scenario_path, out_path); };
  });

  auto* dem = app.add_subcommand("demo", "write a synthetic 22 hub instance");
  dem->add_option("--out", out_dir, "output directory")->required();
  dem->add_option("--seed", demo_seed, "instance seed");
  dem->add_flag("--verify,!--no-verify", demo_verify,
                "check the routing dominance certificate on the reduced set");
  dem->callback([&]() { action = [&]() { return cmd_demo(out_dir, demo_seed, demo_verify); }; });

  try {
    app.parse(argc, argv);
    return action ? action() : 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const rp::ParseError& e) {
    std::cerr << "ERROR parse: " << e.what() << "\n";
    return 2;
  } catch (const rp::SolutionIntegrityError& e) {
    std::cerr << "ERROR integrity: " << e.what() << "\n";
    return 4;
  } catch (const rp::SolverError& e) {
    std::cerr << "ERROR solver: " << e.what() << "\n";
    return 3;
  } catch (const rp::ValidationError& e) {
    std::cerr << "ERROR input: " << e.what() << "\n";
    return 2;
  } catch (const rp::ConstructionError& e) {
    std::cerr << "ERROR input: " << e.what() << "\n";
    return 2;
  } catch (const rp::ArgumentError& e) {
    std::cerr << "ERROR input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ERROR internal: " << e.what() << "\n";
    return 5;
  }
}
