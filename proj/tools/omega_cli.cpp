#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "omega/cli/experiment.hpp"
#include "omega/suites/suites.hpp"

namespace {

using namespace omega;
using omega::cli::ExperimentConfig;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

// Raw flag values; a flag given on the command line overrides the config file.
struct Flags {
  std::string config;
  int n = 0;
  std::vector<std::string> crash;
  std::string detector, leader, out;
  Time t_stab = 0, tail_window = 0;
  std::uint64_t seed = 0, budget = 0, fairness_window = 0;
  std::size_t probe_tail = 0;
  int explore = 0;
  std::vector<CLI::Option*> given;
};

void add_experiment_flags(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "key = value file; flags override it")->check(CLI::ExistingFile);
  f.given = {
      app.add_option("--n", f.n, "number of real processes"),
      app.add_option("--crash", f.crash, "crash pid@t (repeatable)"),
      app.add_option("--detector", f.detector, "failure detector (omega)"),
      app.add_option("--t-stab", f.t_stab, "time from which the detector is stable"),
      app.add_option("--leader", f.leader, "eventual leader of the detector (default: first correct)"),
      app.add_option("--seed", f.seed, "scheduler and detector-noise seed"),
      app.add_option("--budget", f.budget, "event steps"),
      app.add_option("--tail-window", f.tail_window, "Omega-output tail window, in event steps"),
      app.add_option("--probe-tail", f.probe_tail, "Lemma 1 tail, in probe-log entries per process"),
      app.add_option("--explore", f.explore, "exploration units per communication step"),
      app.add_option("--fairness-window", f.fairness_window, "scheduler fairness window (0 = 3n)"),
      app.add_option("--out", f.out, "directory for trace.jsonl, probes.jsonl and verdict.json"),
  };
}

ExperimentConfig resolve(const Flags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    cli::apply_config_file(KeyValueConfig::parse(in), c);
  }
  auto set = [&](const char* name) {
    for (const CLI::Option* o : f.given)
      if (o->get_name() == name) return o->count() > 0;
    return false;
  };
  auto& r = c.red;
  if (set("--n")) r.n = f.n;
  if (set("--crash")) {
    r.crashes.clear();
    for (const auto& s : f.crash) r.crashes.push_back(parse_crash(s));
  }
  if (set("--detector")) c.detector = f.detector;
  if (set("--t-stab")) r.t_stab = f.t_stab;
  if (set("--leader")) r.leader = parse_process_id(f.leader).index;
  if (set("--seed")) r.seed = f.seed;
  if (set("--budget")) r.budget = f.budget;
  if (set("--tail-window")) r.tail_window = f.tail_window;
  if (set("--probe-tail")) r.probe_tail = f.probe_tail;
  if (set("--explore")) r.explore_per_comm = f.explore;
  if (set("--fairness-window")) r.fairness_window = f.fairness_window;
  if (set("--out")) c.out = f.out;
  cli::validate(c);
  return c;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::kConfigError, "cannot write " + p.string());
  return out;
}

int cmd_run(const ExperimentConfig& c) {
  std::optional<std::ofstream> trace;
  if (!c.out.empty()) {
    std::filesystem::create_directories(c.out);
    trace = open_out(std::filesystem::path(c.out) / "trace.jsonl");
  }
  auto o = cli::run_experiment(c, trace ? &*trace : nullptr);
  if (!c.out.empty()) {
    auto probes = open_out(std::filesystem::path(c.out) / "probes.jsonl");
    cli::write_probes_jsonl(probes, o.res);
    open_out(std::filesystem::path(c.out) / "verdict.json") << cli::verdict_json(c, o).dump(2) << '\n';
  }
  std::cout << cli::verdict_line(c, o) << '\n';
  return o.pass ? kExitPass : kExitFail;
}

int cmd_batch(ExperimentConfig c, int seeds, std::uint64_t first, unsigned jobs, double min_rate) {
  c.red.keep_probe_log = true;
  std::vector<cli::RunOutcome> runs(static_cast<std::size_t>(seeds));
  std::vector<ExperimentConfig> cfgs(runs.size(), c);
  for (std::size_t i = 0; i < cfgs.size(); ++i) cfgs[i].red.seed = first + i;
  // Each seed is an isolated run; results are gathered in seed order.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < runs.size();) runs[i] = cli::run_experiment(cfgs[i]);
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < std::max(1u, jobs); ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int stabilized = 0, unsafe = 0, lemma1_failed = 0;
  nlohmann::json per_seed = nlohmann::json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i].res;
    stabilized += r.verdict.ok;
    unsafe += r.safety_violations > 0;
    lemma1_failed += !r.lemma1.ok;
    std::cout << cli::verdict_line(cfgs[i], runs[i]) << '\n';
    per_seed.push_back({{"seed", cfgs[i].red.seed},
                        {"pass", runs[i].pass},
                        {"leader", r.verdict.leader ? nlohmann::json(to_string(*r.verdict.leader)) : nlohmann::json()},
                        {"omega_ok", r.verdict.ok},
                        {"safety_violations", r.safety_violations},
                        {"lemma1_ok", r.lemma1.ok}});
  }
  const double rate = seeds ? static_cast<double>(stabilized) / seeds : 0.0;
  const bool pass = rate >= min_rate && unsafe == 0 && lemma1_failed == 0;
  nlohmann::json summary{{"config", cli::config_to_json(c)}, {"seeds", seeds},      {"first_seed", first},
                         {"stabilized", stabilized},        {"pass_rate", rate},   {"min_pass_rate", min_rate},
                         {"unsafe", unsafe},                {"lemma1_failed", lemma1_failed}, {"pass", pass},
                         {"runs", per_seed}};
  summary["config"].erase("seed");
  if (!c.out.empty()) {
    std::filesystem::create_directories(c.out);
    open_out(std::filesystem::path(c.out) / "batch.json") << summary.dump(2) << '\n';
  }
  std::cout << summary.dump() << '\n';
  return pass ? kExitPass : kExitFail;
}

int cmd_suite(const std::vector<std::string>& names, const std::string& out) {
  bool all = true;
  nlohmann::json results = nlohmann::json::array();
  for (const auto& name : names) {
    auto r = suites::run_suite(name);
    std::cout << r.line() << std::endl;
    results.push_back(r.to_json());
    all = all && r.pass;
  }
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    open_out(std::filesystem::path(out) / "suites.json") << results.dump(2) << '\n';
  }
  return all ? kExitPass : kExitFail;
}

int cmd_replay(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot read " + path);
  auto d = cli::replay_trace(in);
  if (d.identical) {
    std::cout << "PASS replay: " << d.compared << " steps identical\n";
    return kExitPass;
  }
  std::cout << "FAIL replay: " << d.detail << '\n';
  return kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extracts Omega from a consensus algorithm by simulation"};
  app.require_subcommand(1);

  Flags run_flags, batch_flags;
  auto* run = app.add_subcommand("run", "one end-to-end reduction run");
  add_experiment_flags(*run, run_flags);

  auto* batch = app.add_subcommand("batch", "the reduction over consecutive seeds");
  add_experiment_flags(*batch, batch_flags);
  int seeds = 50;
  std::uint64_t first_seed = 1;
  unsigned jobs = 1;
  double min_rate = 0.95;
  batch->add_option("--seeds", seeds, "number of seeds")->check(CLI::PositiveNumber);
  batch->add_option("--first-seed", first_seed, "first seed");
  batch->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  batch->add_option("--min-pass-rate", min_rate, "required fraction of stabilized runs")->check(CLI::Range(0.0, 1.0));

  auto* suite = app.add_subcommand("suite", "named property suites");
  std::vector<std::string> suite_names;
  std::string suite_out;
  suite->add_option("names", suite_names, "suites to run (default: all)")
      ->check(CLI::IsMember(suites::suite_names()));
  suite->add_option("--out", suite_out, "directory for suites.json");

  auto* rep = app.add_subcommand("replay", "re-execute a trace.jsonl and diff");
  std::string trace_path;
  rep->add_option("trace", trace_path, "trace.jsonl written by run --out")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*run) return cmd_run(resolve(run_flags));
    if (*batch) return cmd_batch(resolve(batch_flags), seeds, first_seed, jobs, min_rate);
    if (*suite) return cmd_suite(suite_names.empty() ? suites::suite_names() : suite_names, suite_out);
    if (*rep) return cmd_replay(trace_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    const bool usage = e.code() == ErrorCode::kConfigError || e.code() == ErrorCode::kUsage || e.code() == ErrorCode::kInvalidSpec;
    return usage ? kExitUsage : kExitFail;
  }
  return kExitUsage;
}
