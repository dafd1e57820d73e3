// Command-line front end: single-day policy runs, the policy x load benchmark
// matrix, judge-fixture evaluation, and plan rendering.
//
// Budget and cost constants come from the environment (ORCHSIM_* variables)
// and can be tightened further per invocation via flags.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "orchsim/bench.hpp"
#include "orchsim/runtime.hpp"
#include "orchsim/subagents.hpp"
#include "orchsim/suite46.hpp"

namespace fs = std::filesystem;
using namespace orchsim;

namespace {

Suite load_or_builtin(const std::string& path) {
  if (path.empty()) return build_suite46();
  return load_suite(path);
}

std::vector<PolicyKind> parse_policies(const std::string& csv) {
  std::vector<PolicyKind> out;
  for (std::string_view name : split(csv, ','))
    if (!name.empty()) out.push_back(parse_policy(std::string(name)));
  if (out.empty()) fail(Errc::BadConfig, "no policies given");
  return out;
}

int cmd_run(const std::string& suite_path, const std::string& policy, int load,
            std::uint64_t seed, const std::string& out_dir, bool fast) {
  Suite suite = load_or_builtin(suite_path);
  SessionConfig sc;
  sc.load_pct = load;
  sc.policy = parse_policy(policy);
  sc.seed = seed;
  sc.run = RunConfig::from_env();
  if (fast) sc.run.fast_clock = true;
  DayReport report = run_session(suite, sc);
  std::string text = report.render();
  std::string metrics = DayReport::metrics_header() + "\n" + report.metrics_row() + "\n";
  std::fputs(text.c_str(), stdout);
  std::fputs(metrics.c_str(), stdout);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file((fs::path(out_dir) / "report.txt").string(), text);
    write_file((fs::path(out_dir) / "metrics.tsv").string(), metrics);
  }
  return 0;
}

int cmd_matrix(const std::string& suite_path, const std::string& policies,
               const std::string& loads, const std::string& seeds, const std::string& out_dir,
               bool fast, bool no_apps) {
  Suite suite = load_or_builtin(suite_path);
  MatrixConfig mc;
  mc.policies = parse_policies(policies);
  mc.loads.clear();
  for (std::string_view l : split(loads, ','))
    if (!l.empty()) mc.loads.push_back(std::stoi(std::string(l)));
  mc.seeds.clear();
  for (std::string_view s : split(seeds, ','))
    if (!s.empty()) mc.seeds.push_back(std::stoull(std::string(s)));
  mc.run = RunConfig::from_env();
  if (fast) mc.run.fast_clock = true;
  mc.with_app_table = !no_apps;
  MatrixReport report = run_matrix(suite, mc);
  std::fputs(report.render().c_str(), stdout);
  std::fputs(report.cells_tsv().c_str(), stdout);
  if (!out_dir.empty()) write_matrix(report, out_dir);
  return 0;
}

int cmd_judge_fixture(const std::string& dir) {
  FixtureReport report = judge_fixture_eval(dir);
  std::fputs(report.render().c_str(), stdout);
  return report.matches == long(report.cases.size()) ? 0 : 1;
}

int cmd_plan_show(const std::string& suite_path, int day) {
  Suite suite = load_or_builtin(suite_path);
  DependencyGraph graph = suite.graph();
  StatusMap statuses;
  for (const auto& t : suite.tasks) statuses[t.task_id] = TaskStatus{};
  SemanticStore memory;
  Planner planner;
  Identity identity = make_default_identity(session_apps(suite));
  SimMinute now = SimMinute(day - 1) * kMinutesPerDay + identity.start_hour * 60;
  cog_generate_plan(planner, memory, identity, graph, statuses, day, now);
  std::fputs(render_monthly(planner.monthly(day / kDaysPerMonth)).c_str(), stdout);
  std::fputs(render_daily(planner.daily()).c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic multi-horizon task environment runner"};
  app.require_subcommand(1);

  std::string suite_path, out_dir;
  std::string policy = "core", policies = "flat,core,tools,full";
  std::string loads = "25,50,75,100", seeds = "1,2,3";
  std::string fixture_dir = "data/judge_fixture";
  int load = 100, day = 1;
  std::uint64_t seed = 1;
  bool fast = false, no_apps = false;

  CLI::App* run = app.add_subcommand("run", "run one policy for one simulated day");
  run->add_option("--suite", suite_path, "task suite file (default: built-in 46-task suite)");
  run->add_option("--policy", policy, "flat|core|tools|full");
  run->add_option("--load", load, "load percentage: 25, 50, 75, or 100")
      ->check(CLI::IsMember({25, 50, 75, 100}));
  run->add_option("--seed", seed, "rng seed");
  run->add_option("--out", out_dir, "directory for report files");
  run->add_flag("--fast", fast, "fast clock: one sim minute per cycle");

  CLI::App* bench = app.add_subcommand("bench", "benchmark harness");
  bench->require_subcommand(1);
  CLI::App* matrix = bench->add_subcommand("matrix", "policy x load completion matrix");
  matrix->add_option("--suite", suite_path, "task suite file (default: built-in 46-task suite)");
  matrix->add_option("--policies", policies, "comma-separated policy kinds");
  matrix->add_option("--loads", loads, "comma-separated load percentages");
  matrix->add_option("--seeds", seeds, "comma-separated rng seeds");
  matrix->add_option("--out", out_dir, "directory for matrix outputs");
  matrix->add_flag("--fast", fast, "fast clock: one sim minute per cycle");
  matrix->add_flag("--no-apps", no_apps, "skip the per-app session table");
  CLI::App* fixture = bench->add_subcommand("judge-fixture", "evaluate the shipped judge fixture");
  fixture->add_option("--dir", fixture_dir, "fixture directory");

  CLI::App* plan = app.add_subcommand("plan", "planning inspection");
  plan->require_subcommand(1);
  CLI::App* show = plan->add_subcommand("show", "render the monthly and daily plan");
  show->add_option("--suite", suite_path, "task suite file (default: built-in 46-task suite)");
  show->add_option("--day", day, "simulated day number");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(suite_path, policy, load, seed, out_dir, fast);
    if (matrix->parsed()) return cmd_matrix(suite_path, policies, loads, seeds, out_dir, fast, no_apps);
    if (fixture->parsed()) return cmd_judge_fixture(fixture_dir);
    if (show->parsed()) return cmd_plan_show(suite_path, day);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
