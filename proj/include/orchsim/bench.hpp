#pragma once

// Benchmark harness: builds single-session workloads from a task suite
// (stratified load sampling or per-app grouping), runs policy × load matrices
// over seeds, and evaluates the shipped judge fixture.
//
// Completion rates are reported against two denominators — the sampled
// session's size and the full suite's size — because a load slice can be
// read either way; both appear in every report.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "orchsim/judge.hpp"
#include "orchsim/runtime.hpp"
#include "orchsim/suite46.hpp"
#include "orchsim/suite_io.hpp"

namespace orchsim {

enum class Grouping { Stratified, PerApp };

constexpr int kValidLoads[] = {25, 50, 75, 100};

inline bool valid_load(int pct) {
  for (int l : kValidLoads)
    if (pct == l) return true;
  return false;
}

// One benchmark session: a load slice (stratified) or one app partition.
struct SessionConfig {
  std::string suite_path;
  int load_pct = 100;
  Grouping grouping = Grouping::Stratified;
  std::string app_id;  // PerApp only
  PolicyKind policy = PolicyKind::FlatBaseline;
  std::uint64_t seed = 1;
  RunConfig run;

  void validate() const {
    if (grouping == Grouping::Stratified && !valid_load(load_pct))
      fail(Errc::BadConfig, "load must be one of 25/50/75/100, got " + std::to_string(load_pct));
    if (grouping == Grouping::PerApp && app_id.empty())
      fail(Errc::BadConfig, "per-app grouping needs an app id");
  }
};

namespace detail {

// round(n·pct/100) with exact half-up integer arithmetic
inline long scaled_half_up(long n, int pct) { return (2 * n * pct + 100) / 200; }

}  // namespace detail

// Stratified sampling: round-half-up(pct·n/100) tasks from each category
// partition, seeded and without replacement; the largest partitions then
// absorb the difference so the total hits round-half-up(pct·total/100).
// pct=100 returns the whole suite in file order.
inline std::vector<TaskSpec> sample_load(const Suite& suite, int pct, std::uint64_t seed) {
  if (suite.tasks.empty()) fail(Errc::BadConfig, "cannot sample an empty suite");
  if (pct >= 100) return suite.tasks;

  std::map<std::string, std::vector<std::size_t>> parts;  // category -> file-order indices
  for (std::size_t i = 0; i < suite.tasks.size(); ++i)
    parts[suite.category(suite.tasks[i])].push_back(i);

  long target = detail::scaled_half_up(long(suite.tasks.size()), pct);
  std::map<std::string, long> want;
  long total = 0;
  for (const auto& [cat, idx] : parts) {
    want[cat] = detail::scaled_half_up(long(idx.size()), pct);
    total += want[cat];
  }

  // Largest partition first (ties by name) gives a fixed adjustment order.
  std::vector<std::string> by_size;
  for (const auto& [cat, idx] : parts) by_size.push_back(cat);
  std::sort(by_size.begin(), by_size.end(), [&](const std::string& a, const std::string& b) {
    if (parts[a].size() != parts[b].size()) return parts[a].size() > parts[b].size();
    return a < b;
  });
  for (const auto& cat : by_size) {
    if (total == target) break;
    long room = total < target ? long(parts[cat].size()) - want[cat] : want[cat];
    long take = std::min(room, total < target ? target - total : total - target);
    want[cat] += total < target ? take : -take;
    total += total < target ? take : -take;
  }

  // One RNG stream, partitions consumed in name order: the draw for a
  // category does not depend on how other categories were adjusted.
  Rng rng(seed * 0x9e3779b97f4a7c15ull + 0xb5ull);
  std::set<std::size_t> chosen;
  for (auto& [cat, idx] : parts) {
    std::vector<std::size_t> pool = idx;
    long k = want[cat];
    for (long j = 0; j < k; ++j) {
      std::size_t pick = std::size_t(j) + std::size_t(rng.below(pool.size() - std::size_t(j)));
      std::swap(pool[std::size_t(j)], pool[pick]);
      chosen.insert(pool[std::size_t(j)]);
    }
  }

  std::vector<TaskSpec> subset;
  for (std::size_t i = 0; i < suite.tasks.size(); ++i)
    if (chosen.count(i)) subset.push_back(suite.tasks[i]);
  return subset;
}

struct BuiltSession {
  Suite session;
  long dropped_edges = 0;  // edges crossing the sampled/unsampled cut
};

// One concatenated session: the subset as a backlog sorted by task id (so
// session order never depends on sampling order), keeping dependency edges
// whose endpoints are both present and counting every edge that crosses the
// cut as a dropped-edge warning.
inline BuiltSession build_session(const Suite& full, std::vector<TaskSpec> subset) {
  if (subset.empty()) fail(Errc::BadConfig, "cannot build an empty session");
  BuiltSession out;
  std::sort(subset.begin(), subset.end(),
            [](const TaskSpec& a, const TaskSpec& b) { return a.task_id < b.task_id; });
  std::set<std::string> in;
  for (const auto& t : subset) in.insert(t.task_id);
  out.session.tasks = std::move(subset);
  for (const auto& [task, prereq] : full.deps) {
    bool has_task = in.count(task) > 0, has_prereq = in.count(prereq) > 0;
    if (has_task && has_prereq) out.session.deps.push_back({task, prereq});
    else if (has_task != has_prereq) ++out.dropped_edges;
  }
  return out;
}

// All tasks of one category partition ("excel", "word", "ppt", "multi", …)
// concatenated into one session.
inline BuiltSession per_app_session(const Suite& suite, const std::string& app_id) {
  std::vector<TaskSpec> subset;
  for (const auto& t : suite.tasks)
    if (suite.category(t) == app_id) subset.push_back(t);
  if (subset.empty()) fail(Errc::UnknownApp, "no tasks for app '" + app_id + "'");
  return build_session(suite, std::move(subset));
}

inline std::vector<std::string> session_apps(const Suite& session) {
  std::set<std::string> apps;
  for (const auto& t : session.tasks) apps.insert(t.app_id);
  return {apps.begin(), apps.end()};
}

// Runs one configured session and returns its day report.
inline DayReport run_session(const Suite& full, const SessionConfig& cfg) {
  cfg.validate();
  BuiltSession built = cfg.grouping == Grouping::PerApp
                           ? per_app_session(full, cfg.app_id)
                           : build_session(full, sample_load(full, cfg.load_pct, cfg.seed));
  SessionRuntime rt(cfg.run, built.session, make_default_identity(session_apps(built.session)),
                    cfg.policy, cfg.seed, cfg.load_pct, built.dropped_edges);
  return rt.run_day();
}

// ---------------------------------------------------------------------------
// Policy × load matrix

struct MatrixConfig {
  std::vector<PolicyKind> policies;
  std::vector<int> loads{25, 50, 75, 100};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  RunConfig run;
  bool with_app_table = true;

  void validate() const {
    if (policies.empty() || loads.empty() || seeds.empty())
      fail(Errc::BadConfig, "matrix needs at least one policy, load, and seed");
    for (int l : loads)
      if (!valid_load(l)) fail(Errc::BadConfig, "invalid load " + std::to_string(l));
  }
};

struct MatrixCell {
  PolicyKind policy;
  int load = 0;
  long runs = 0;
  long errors = 0;
  long mean_rate_load_tenths = 0;   // judged rate against the sampled size
  long mean_rate_total_tenths = 0;  // judged rate against the full suite
};

struct AppCell {
  PolicyKind policy;
  std::string app;
  long tasks = 0;
  long mean_rate_tenths = 0;
};

struct MatrixReport {
  std::vector<DayReport> runs;      // one per (policy, load, seed), in order
  std::vector<std::string> errors;  // recorded cell failures, matrix completes
  std::vector<MatrixCell> cells;
  std::vector<AppCell> app_cells;
  long suite_size = 0;

  std::string cells_tsv() const {
    std::string out = "policy\tload\tseeds\trate_vs_load\trate_vs_suite\n";
    for (const auto& c : cells) {
      out += std::string(policy_name(c.policy)) + "\t" + std::to_string(c.load) + "\t" +
             std::to_string(c.runs) + "\t" + format_1dp(c.mean_rate_load_tenths) + "\t" +
             format_1dp(c.mean_rate_total_tenths) + "\n";
    }
    return out;
  }

  std::string runs_tsv() const {
    std::string out = DayReport::metrics_header() + "\n";
    for (const auto& r : runs) out += r.metrics_row() + "\n";
    for (const auto& e : errors) out += e + "\n";
    return out;
  }

  std::string app_tsv() const {
    std::string out = "policy\tapp\ttasks\trate\n";
    for (const auto& c : app_cells)
      out += std::string(policy_name(c.policy)) + "\t" + c.app + "\t" + std::to_string(c.tasks) +
             "\t" + format_1dp(c.mean_rate_tenths) + "\n";
    return out;
  }

  // Human-readable tables: completion under rising load, then per-app sessions.
  std::string render() const {
    std::string out = "task completion (judged) by load, rate vs sampled size\n";
    std::vector<int> loads;
    for (const auto& c : cells)
      if (std::find(loads.begin(), loads.end(), c.load) == loads.end()) loads.push_back(c.load);
    std::vector<PolicyKind> policies;
    for (const auto& c : cells)
      if (std::find(policies.begin(), policies.end(), c.policy) == policies.end())
        policies.push_back(c.policy);
    out += "policy";
    for (int l : loads) out += "\t" + std::to_string(l) + "%";
    out += "\n";
    for (PolicyKind p : policies) {
      out += policy_name(p);
      for (int l : loads) {
        for (const auto& c : cells)
          if (c.policy == p && c.load == l) {
            out += "\t" + format_1dp(c.mean_rate_load_tenths);
            if (c.errors) out += "!";
          }
      }
      out += "\n";
    }
    if (!app_cells.empty()) {
      out += "\nper-app sessions, rate vs app size\n";
      std::vector<std::string> apps;
      for (const auto& c : app_cells)
        if (std::find(apps.begin(), apps.end(), c.app) == apps.end()) apps.push_back(c.app);
      out += "policy";
      for (const auto& a : apps) out += "\t" + a;
      out += "\n";
      for (PolicyKind p : policies) {
        bool any = false;
        std::string row = policy_name(p);
        for (const auto& a : apps)
          for (const auto& c : app_cells)
            if (c.policy == p && c.app == a) {
              row += "\t" + format_1dp(c.mean_rate_tenths);
              any = true;
            }
        if (any) out += row + "\n";
      }
    }
    if (!errors.empty()) out += "\n" + std::to_string(errors.size()) + " cell failure(s) recorded\n";
    return out;
  }
};

namespace detail {

inline long mean_half_up(long sum, long n) { return n ? (2 * sum + n) / (2 * n) : 0; }

}  // namespace detail

// Runs every (policy, load, seed) cell, averaging judged completion over
// seeds. Cell failures are recorded and the rest of the matrix still runs.
inline MatrixReport run_matrix(const Suite& suite, const MatrixConfig& mc) {
  mc.validate();
  MatrixReport report;
  report.suite_size = long(suite.tasks.size());
  for (PolicyKind policy : mc.policies) {
    for (int load : mc.loads) {
      MatrixCell cell;
      cell.policy = policy;
      cell.load = load;
      long sum_load_tenths = 0, sum_total_tenths = 0;
      for (std::uint64_t seed : mc.seeds) {
        SessionConfig sc;
        sc.load_pct = load;
        sc.policy = policy;
        sc.seed = seed;
        sc.run = mc.run;
        try {
          DayReport r = run_session(suite, sc);
          sum_load_tenths += r.rate_judged_tenths;
          sum_total_tenths += completion_rate(r.judged_true, report.suite_size);
          ++cell.runs;
          report.runs.push_back(std::move(r));
        } catch (const Error& e) {
          ++cell.errors;
          report.errors.push_back(std::string(policy_name(policy)) + "\t" + std::to_string(load) +
                                  "\t" + std::to_string(seed) + "\terror\t" + e.what());
        }
      }
      cell.mean_rate_load_tenths = detail::mean_half_up(sum_load_tenths, cell.runs);
      cell.mean_rate_total_tenths = detail::mean_half_up(sum_total_tenths, cell.runs);
      report.cells.push_back(cell);
    }
  }
  if (mc.with_app_table) {
    std::set<std::string> app_set;
    for (const auto& t : suite.tasks) app_set.insert(suite.category(t));
    for (PolicyKind policy : mc.policies) {
      for (const auto& app : app_set) {
        AppCell cell;
        cell.policy = policy;
        cell.app = app;
        long sum_tenths = 0, n = 0;
        for (std::uint64_t seed : mc.seeds) {
          SessionConfig sc;
          sc.grouping = Grouping::PerApp;
          sc.app_id = app;
          sc.policy = policy;
          sc.seed = seed;
          sc.run = mc.run;
          try {
            DayReport r = run_session(suite, sc);
            cell.tasks = r.n_tasks;
            sum_tenths += r.rate_judged_tenths;
            ++n;
          } catch (const Error& e) {
            report.errors.push_back(std::string(policy_name(policy)) + "\tapp:" + app + "\t" +
                                    std::to_string(seed) + "\terror\t" + e.what());
          }
        }
        cell.mean_rate_tenths = detail::mean_half_up(sum_tenths, n);
        report.app_cells.push_back(cell);
      }
    }
  }
  return report;
}

// Writes the matrix outputs under out_dir: machine-readable cell and run
// rows, the human-readable table, and one rendered DayReport per run.
inline void write_matrix(const MatrixReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "runs");
  write_file((fs::path(out_dir) / "cells.tsv").string(), report.cells_tsv());
  write_file((fs::path(out_dir) / "runs.tsv").string(), report.runs_tsv());
  write_file((fs::path(out_dir) / "apps.tsv").string(), report.app_tsv());
  write_file((fs::path(out_dir) / "matrix.txt").string(), report.render());
  for (const auto& r : report.runs) {
    std::string name = std::string(policy_name(r.policy)) + "-l" + std::to_string(r.load_pct) +
                       "-s" + std::to_string(r.seed) + ".txt";
    write_file((fs::path(out_dir) / "runs" / name).string(), r.render());
  }
}

// ---------------------------------------------------------------------------
// Judge fixture: artifact/golden/label triples shipped in-repo

struct FixtureCase {
  std::string name;
  bool label = false;     // shipped human label
  bool decision = false;  // judge_artifact output
};

struct FixtureReport {
  std::vector<FixtureCase> cases;
  long matches = 0;
  long agreement_tenths = 0;

  std::string render() const {
    std::string out;
    for (const auto& c : cases) {
      out += c.name;
      out += c.decision ? "\tjudge:true" : "\tjudge:false";
      out += c.label ? "\tlabel:true" : "\tlabel:false";
      out += c.decision == c.label ? "\tmatch\n" : "\tMISMATCH\n";
    }
    out += std::to_string(cases.size()) + " decisions, agreement " +
           format_1dp(agreement_tenths) + "%\n";
    out += "note: the deterministic artifact judge reaches 100% here by construction; "
           "LLM-based judge comparisons are out of scope\n";
    return out;
  }
};

// Evaluates the shipped fixture: runs the deterministic judge on every
// artifact/golden pair and reports exact-match agreement with the labels.
inline FixtureReport judge_fixture_eval(const std::string& dir) {
  FixtureReport report;
  std::string labels = read_file(dir + "/labels.tsv");  // FixtureMissing if absent
  for (std::string_view line : split(labels, '\n')) {
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2 || (fields[1] != "true" && fields[1] != "false"))
      fail(Errc::ParseError, "fixture label line must be <case>\\t<true|false>");
    FixtureCase c;
    c.name = std::string(fields[0]);
    c.label = fields[1] == "true";
    Doc artifact = doc_from_text(read_file(dir + "/" + c.name + ".artifact.tsv"));
    Doc golden = doc_from_text(read_file(dir + "/" + c.name + ".golden.tsv"));
    c.decision = judge_artifact(artifact, golden);
    if (c.decision == c.label) ++report.matches;
    report.cases.push_back(std::move(c));
  }
  if (report.cases.empty()) fail(Errc::FixtureMissing, "no cases in " + dir);
  report.agreement_tenths = completion_rate(report.matches, long(report.cases.size()));
  return report;
}

}  // namespace orchsim
