#pragma once

// Session engine: one simulated agent-day under a chosen execution policy.
//
// The flat policy keeps every active task state in a single persistent
// context window, pays a full O(N) reprioritization scan each cycle, reloads
// state that summarization evicted, and suffers deterministic wrong-artifact
// writes when two co-resident task states claim the same key. The
// orchestrated rungs externalize state into plans and stratified memory:
// each cycle opens a fresh bounded window holding only the selected task
// plus top-k retrieved records, executes through isolated per-application
// sub-agents (which disables the interference rule), and — on the highest
// rung — replays distilled demonstrations to skip exploratory probing.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "orchsim/budget.hpp"
#include "orchsim/common.hpp"
#include "orchsim/context.hpp"
#include "orchsim/identity.hpp"
#include "orchsim/judge.hpp"
#include "orchsim/memory.hpp"
#include "orchsim/planning.hpp"
#include "orchsim/sim_env.hpp"
#include "orchsim/subagents.hpp"
#include "orchsim/suite_io.hpp"
#include "orchsim/tasks.hpp"
#include "orchsim/tokens.hpp"
#include "orchsim/xplearn.hpp"

namespace orchsim {

// ---------------------------------------------------------------------------
// Policies

enum class PolicyKind { FlatBaseline, CognitiveModel, CognitiveTools, ExpLearning, Scripted };

inline const char* policy_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::FlatBaseline: return "flat";
    case PolicyKind::CognitiveModel: return "core";
    case PolicyKind::CognitiveTools: return "tools";
    case PolicyKind::ExpLearning: return "full";
    case PolicyKind::Scripted: return "scripted";
  }
  return "?";
}

inline PolicyKind parse_policy(const std::string& name) {
  if (name == "flat") return PolicyKind::FlatBaseline;
  if (name == "core") return PolicyKind::CognitiveModel;
  if (name == "tools") return PolicyKind::CognitiveTools;
  if (name == "full") return PolicyKind::ExpLearning;
  if (name == "scripted") return PolicyKind::Scripted;
  fail(Errc::BadConfig, "unknown policy '" + name + "' (expected flat|core|tools|full|scripted)");
}

inline bool is_orchestrated(PolicyKind k) {
  return k == PolicyKind::CognitiveModel || k == PolicyKind::CognitiveTools ||
         k == PolicyKind::ExpLearning;
}

// ---------------------------------------------------------------------------
// Configuration

struct RunConfig {
  long context_budget = kDefaultContextBudget;  // 4096 tokens
  int memory_k = 5;
  double half_life_minutes = 100.0;
  int demo_k = kDemoRetrieveK;
  double demo_threshold = kDemoThreshold;
  int probe_cost = 3;       // exploratory inspects before editing without a demo
  int max_attempts = 3;     // failed attempts before a task is skipped
  int iteration_budget = 30;  // actions allowed per attempt
  SimMinute max_sim_minutes = 360;  // six-hour session
  long max_tool_calls = 25000;
  int schedule_variance = 10;  // +/- minutes applied to both schedule bounds
  int reprioritize_cost = 1;   // c_r: per-task scan charge for the flat policy
  int reload_cost = 5;         // c_l: steps to re-warm an evicted task state
  // Default profile: sim minutes advance one per action step, so the six-hour
  // session binds at 360 steps per day. The fast profile instead advances one
  // sim minute per cycle, letting full-load days run to completion.
  bool fast_clock = false;

  static RunConfig from_env() {
    RunConfig c;
    auto num = [](const char* name, double fallback) {
      const char* v = std::getenv(name);
      return v && *v ? std::strtod(v, nullptr) : fallback;
    };
    c.context_budget = long(num("ORCHSIM_CONTEXT_BUDGET", double(c.context_budget)));
    c.memory_k = int(num("ORCHSIM_MEMORY_K", c.memory_k));
    c.half_life_minutes = num("ORCHSIM_HALF_LIFE", c.half_life_minutes);
    c.demo_k = int(num("ORCHSIM_DEMO_K", c.demo_k));
    c.demo_threshold = num("ORCHSIM_DEMO_THRESHOLD", c.demo_threshold);
    c.probe_cost = int(num("ORCHSIM_PROBE_COST", c.probe_cost));
    c.max_attempts = int(num("ORCHSIM_MAX_ATTEMPTS", c.max_attempts));
    c.iteration_budget = int(num("ORCHSIM_ITERATION_BUDGET", c.iteration_budget));
    c.max_sim_minutes = SimMinute(num("ORCHSIM_MAX_SIM_MINUTES", double(c.max_sim_minutes)));
    c.max_tool_calls = long(num("ORCHSIM_MAX_TOOL_CALLS", double(c.max_tool_calls)));
    c.schedule_variance = int(num("ORCHSIM_VARIANCE_MINUTES", c.schedule_variance));
    c.reprioritize_cost = int(num("ORCHSIM_REPRIO_COST", c.reprioritize_cost));
    c.reload_cost = int(num("ORCHSIM_RELOAD_COST", c.reload_cost));
    c.fast_clock = num("ORCHSIM_FAST_CLOCK", c.fast_clock ? 1 : 0) != 0;
    return c;
  }
};

struct SimClock {
  SimMinute now = 0;
  void advance_to(SimMinute t) {
    if (t > now) now = t;
  }
};

// ---------------------------------------------------------------------------
// ReAct step discipline

enum class ReactKind { Reason, Invoke, Done };

// Enforces the reason-then-act alternation: an Invoke must directly follow a
// Reason, and nothing may follow Done.
class ReactGuard {
 public:
  void feed(ReactKind k) {
    if (done_) fail(Errc::AlternationViolation, "step after Done");
    if (k == ReactKind::Invoke && last_ != ReactKind::Reason)
      fail(Errc::AlternationViolation, "Invoke without preceding Reason");
    if (k == ReactKind::Done) done_ = true;
    last_ = k;
  }
  bool finished() const { return done_; }

 private:
  ReactKind last_ = ReactKind::Done;  // placeholder; done_ guards the real state
  bool done_ = false;
  // last_ starts as a non-Reason value so a leading Invoke is rejected.
};

// Validates a fixed step script; returns the number of Invokes, each charged
// one tool call when a budget is supplied.
inline int run_scripted(const std::vector<ReactKind>& script, SessionBudget* budget = nullptr) {
  ReactGuard guard;
  int invokes = 0;
  for (ReactKind k : script) {
    guard.feed(k);
    if (k == ReactKind::Invoke) {
      ++invokes;
      if (budget) budget->charge(1);
    }
  }
  return invokes;
}

// ---------------------------------------------------------------------------
// Reporting

struct DayReport {
  PolicyKind policy = PolicyKind::FlatBaseline;
  int load_pct = 100;
  std::uint64_t seed = 0;
  int n_tasks = 0;
  SimMinute start_minute = 0;
  SimMinute end_minute = 0;
  std::map<std::string, TaskStatus> statuses;
  std::map<std::string, bool> judged;
  int completed_statuses = 0;
  int judged_true = 0;
  int skipped = 0;
  long rate_status_tenths = 0;  // completed statuses per hundred, in tenths
  long rate_judged_tenths = 0;  // judge-verified completions per hundred, in tenths
  int cycles = 0;
  long tool_calls = 0;
  long total_steps = 0;
  long peak_window_tokens = 0;
  int compressions = 0;
  int interference_events = 0;
  int cold_reloads = 0;
  int demos_distilled = 0;
  int demos_injected = 0;
  int dropped_edges = 0;
  bool all_terminal = false;
  bool budget_exhausted = false;

  static std::string metrics_header() {
    return "policy\tload\tseed\ttasks\tcompleted\tjudged\trate_status\trate_judged\tskipped\t"
           "cycles\ttool_calls\ttotal_steps\tpeak_window\tcompressions\tinterference\t"
           "cold_reloads\tdemos_distilled\tdemos_injected\tdropped_edges\tterminal";
  }

  std::string metrics_row() const {
    std::string out;
    out += policy_name(policy);
    out += '\t';
    out += std::to_string(load_pct);
    out += '\t';
    out += std::to_string(seed);
    out += '\t';
    out += std::to_string(n_tasks);
    out += '\t';
    out += std::to_string(completed_statuses);
    out += '\t';
    out += std::to_string(judged_true);
    out += '\t';
    out += format_1dp(rate_status_tenths);
    out += '\t';
    out += format_1dp(rate_judged_tenths);
    out += '\t';
    out += std::to_string(skipped);
    out += '\t';
    out += std::to_string(cycles);
    out += '\t';
    out += std::to_string(tool_calls);
    out += '\t';
    out += std::to_string(total_steps);
    out += '\t';
    out += std::to_string(peak_window_tokens);
    out += '\t';
    out += std::to_string(compressions);
    out += '\t';
    out += std::to_string(interference_events);
    out += '\t';
    out += std::to_string(cold_reloads);
    out += '\t';
    out += std::to_string(demos_distilled);
    out += '\t';
    out += std::to_string(demos_injected);
    out += '\t';
    out += std::to_string(dropped_edges);
    out += '\t';
    out += all_terminal ? "all_terminal" : (budget_exhausted ? "budget_exhausted" : "stalled");
    return out;
  }

  std::string render() const {
    std::string out = "run policy=" + std::string(policy_name(policy)) +
                      " load=" + std::to_string(load_pct) + " seed=" + std::to_string(seed) +
                      "\n";
    out += "schedule " + format_time(start_minute) + " to " + format_time(end_minute) + "\n";
    out += "tasks " + std::to_string(n_tasks) + " completed " +
           std::to_string(completed_statuses) + " judged " + std::to_string(judged_true) +
           " skipped " + std::to_string(skipped) + " rate " + format_1dp(rate_judged_tenths) +
           "\n";
    out += "cycles " + std::to_string(cycles) + " tool_calls " + std::to_string(tool_calls) +
           " steps " + std::to_string(total_steps) + " peak_window " +
           std::to_string(peak_window_tokens) + "\n";
    out += "compressions " + std::to_string(compressions) + " interference " +
           std::to_string(interference_events) + " cold_reloads " +
           std::to_string(cold_reloads) + " demos " + std::to_string(demos_distilled) + "/" +
           std::to_string(demos_injected) + "\n";
    for (const auto& [id, st] : statuses) {
      auto jit = judged.find(id);
      out += id;
      out += ' ';
      out += task_state_name(st.state);
      out += " attempts=" + std::to_string(st.attempt_count);
      out += " judged=";
      out += (jit != judged.end() && jit->second) ? "true" : "false";
      out += '\n';
    }
    return out;
  }
};

// Identity used when a run does not load one from file: responsibilities and
// per-application control tools derived from the applications in play.
inline Identity make_default_identity(const std::vector<std::string>& apps) {
  Identity id;
  id.agent_id = "agent-001";
  id.name = "desk worker";
  id.role = "office task execution";
  for (const auto& app : apps) {
    id.responsibilities.push_back({app, "keep " + app + " deliverables current"});
    id.tools.push_back("cua." + app);
  }
  id.tools.push_back("generate_plan");
  id.tools.push_back("update_plan");
  id.tools.push_back("track_tasks");
  id.tools.push_back("reflect");
  id.tools.push_back("research");
  return id;
}

// ---------------------------------------------------------------------------
// Session runtime

class SessionRuntime {
 public:
  SessionRuntime(RunConfig cfg, const Suite& suite, Identity identity, PolicyKind policy,
                 std::uint64_t seed, int load_pct = 100, int dropped_edges = 0)
      : cfg_(cfg),
        suite_(suite),
        graph_(suite.graph()),
        identity_(std::move(identity)),
        policy_(policy),
        seed_(seed),
        load_pct_(load_pct),
        dropped_edges_(dropped_edges),
        rng_(seed),
        flat_window_(cfg.context_budget),
        backend_(std::make_unique<DirectCua>()) {
    if (policy == PolicyKind::Scripted)
      fail(Errc::BadConfig, "the scripted policy validates step scripts; it cannot run a day");
    identity_.validate();
    for (const auto& t : suite_.tasks) statuses_[t.task_id] = TaskStatus{};
    workspace_ = make_workspace(suite_.tasks);
    for (const auto& t : suite_.tasks) {
      for (const auto& e : t.edit_script) key_users_[e.key].push_back(t.task_id);
    }
  }

  // Swap the execution backend (e.g. for fault-injection conformance runs).
  void set_backend(std::unique_ptr<CuaBackend> backend) { backend_ = std::move(backend); }

  DayReport run_day(int day = 1) {
    int vs = int(rng_.range(-cfg_.schedule_variance, cfg_.schedule_variance));
    int ve = int(rng_.range(-cfg_.schedule_variance, cfg_.schedule_variance));
    SimMinute day_base = SimMinute(day - 1) * kMinutesPerDay;
    SimMinute start = day_base + identity_.start_hour * 60 + vs;
    SimMinute end = day_base + identity_.end_hour * 60 + ve;
    clock_.advance_to(start);
    budget_ = SessionBudget{cfg_.max_sim_minutes, cfg_.max_tool_calls, start, 0};

    if (policy_ == PolicyKind::FlatBaseline) {
      flat_day_start();
    } else {
      budget_.charge(1);
      cog_generate_plan(planner_, memory_, identity_, graph_, statuses_, day, clock_.now);
    }

    bool out_of_budget = false;
    while (true) {
      if (!budget_.time_left(clock_.now) || clock_.now >= end || !budget_.calls_left(cycle_reserve())) {
        out_of_budget = true;
        break;
      }
      cascade_skip();
      std::optional<std::string> selected = select_task(day);
      if (!selected) break;  // every remaining task is terminal: day's work done
      SimMinute cycle_start = clock_.now;
      long steps = run_cycle(*selected);
      ++cycles_;
      // Fast profile: one sim minute per cycle. Default: one minute per action
      // step, never starting cycles closer together than the identity interval.
      SimMinute duration = cfg_.fast_clock
                               ? SimMinute(1)
                               : std::max<SimMinute>(identity_.cycle_interval, steps);
      clock_.advance_to(cycle_start + duration);
    }

    cascade_skip();
    finalize_day(day);
    return build_report(day, start, end, out_of_budget);
  }

  const Workspace& workspace() const { return workspace_; }
  const StatusMap& statuses() const { return statuses_; }
  const SemanticStore& memory() const { return memory_; }
  const DemoIndex& demos() const { return demo_index_; }

 private:
  // ----- shared selection and bookkeeping -----

  long cycle_reserve() const {
    long per_action = is_orchestrated(policy_) ? 2 : 1;  // sub-agent runs double-charge
    long overhead = policy_ == PolicyKind::FlatBaseline
                        ? long(cfg_.reprioritize_cost) * long(suite_.tasks.size()) + cfg_.reload_cost
                        : 8;  // queue pop + plan upkeep + tracking calls
    return overhead + per_action * (cfg_.iteration_budget + 1) + 8;
  }

  // Tasks whose prerequisites can no longer complete are walked to Skipped at
  // no step cost; execution never stalls behind them.
  void cascade_skip() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& id : graph_.ids()) {
        TaskStatus& st = statuses_[id];
        if (is_terminal(st.state)) continue;
        if (!graph_.prereqs_unsatisfiable(id, statuses_)) continue;
        if (st.state == TaskState::Blocked) st.transition(TaskState::Pending);
        if (st.state == TaskState::Pending) st.transition(TaskState::InProgress);
        if (st.state == TaskState::InProgress) st.transition(TaskState::Failed);
        st.transition(TaskState::Skipped);
        note_skip(id);
        changed = true;
      }
    }
  }

  void note_skip(const std::string& id) {
    if (is_orchestrated(policy_) && planner_.has_daily()) {
      PlanUpdateEvent ev;
      ev.kind = PlanEventKind::TaskSkipped;
      ev.task_id = id;
      ev.payload = "prerequisite chain unsatisfiable";
      ev.at = clock_.now;
      budget_.charge(1);
      cog_update_plan(planner_, graph_, statuses_, ev);
    }
  }

  std::optional<std::string> select_task(int day) {
    if (policy_ == PolicyKind::FlatBaseline) {
      // No plan: scan the whole roster in file order every cycle.
      for (const auto& t : suite_.tasks) {
        const TaskStatus& st = statuses_[t.task_id];
        bool eligible = st.state == TaskState::Pending ||
                        (st.state == TaskState::Failed && st.attempt_count < cfg_.max_attempts);
        if (!eligible) continue;
        if (!graph_.prereqs_completed(t.task_id, statuses_)) continue;
        return t.task_id;
      }
      return std::nullopt;
    }
    auto pick = Planner::select_next(planner_.daily(), statuses_, cfg_.max_attempts);
    if (pick) return pick;
    // Current wave exhausted: refill from the backlog if live work remains.
    bool live = false;
    for (const auto& [id, st] : statuses_)
      if (!is_terminal(st.state)) live = true;
    if (!live) return std::nullopt;
    budget_.charge(1);
    planner_.generate_daily(memory_, graph_, statuses_, day, clock_.now);
    return Planner::select_next(planner_.daily(), statuses_, cfg_.max_attempts);
  }

  long run_cycle(const std::string& task_id) {
    return policy_ == PolicyKind::FlatBaseline ? flat_cycle(task_id)
                                               : orchestrated_cycle(task_id);
  }

  void start_attempt(TaskStatus& st) {
    if (st.state == TaskState::Failed) st.transition(TaskState::Pending);
    if (st.state == TaskState::Blocked) st.transition(TaskState::Pending);
    st.transition(TaskState::InProgress);
    ++st.attempt_count;
    st.iterations_this_attempt = 0;
  }

  void finish_attempt(TaskStatus& st, bool success) {
    if (success) {
      st.transition(TaskState::Completed);
    } else {
      st.transition(TaskState::Failed);
      if (st.attempt_count >= cfg_.max_attempts) st.transition(TaskState::Skipped);
    }
  }

  ActionOutcome do_action(ActionRecord action) {
    action.timestamp = clock_.now;
    action.actor = identity_.agent_id;
    ActionOutcome out = workspace_.apply(action);
    workspace_.tick();
    budget_.charge(1);
    ++total_steps_;
    return out;
  }

  // ----- flat baseline -----

  ContextEntry flat_state_entry(const TaskSpec& t) const {
    std::string content = "state " + t.task_id + " " + t.description;
    long have = token_count(content);
    for (long i = have; i < t.state_footprint; ++i) content += " w" + std::to_string(i - have);
    return make_entry(EntryOrigin::Observation, std::move(content), cycles_, t.task_id, t.app_id);
  }

  // Returns true when the push forced a summarization pass (which evicts
  // every routine entry, including the one just pushed).
  bool flat_push(ContextEntry entry) {
    StabilizeReport rep = flat_window_.push(std::move(entry));
    if (rep.summarized) {
      ++compressions_;
      resident_.clear();
      load_order_.clear();
    }
    peak_window_ = std::max(peak_window_, flat_window_.total_tokens());
    return rep.summarized;
  }

  void flat_load_state(const TaskSpec& t) {
    if (flat_push(flat_state_entry(t))) return;  // folded straight into a summary
    resident_.insert(t.task_id);
    load_order_.erase(std::remove(load_order_.begin(), load_order_.end(), t.task_id),
                      load_order_.end());
    load_order_.push_back(t.task_id);
  }

  void flat_day_start() {
    for (const auto& t : suite_.tasks) flat_load_state(t);
  }

  long flat_cycle(const std::string& task_id) {
    long steps = 0;
    // Reprioritization: the flat agent rescans every active state each cycle.
    for (const auto& t : suite_.tasks) {
      for (int i = 0; i < cfg_.reprioritize_cost; ++i) {
        ActionRecord scan;
        scan.app_id = t.app_id;
        scan.artifact_id = t.deliverable_id;
        scan.op = ActionOp::Rescan;
        do_action(scan);
        ++steps;
      }
    }
    steps += flat_attempt(task_id);
    return steps;
  }

  long flat_attempt(const std::string& task_id) {
    const TaskSpec& t = graph_.spec(task_id);
    TaskStatus& st = statuses_[task_id];
    start_attempt(st);
    ReactGuard guard;
    int iters = 0;
    auto act = [&](ActionRecord a) {
      guard.feed(ReactKind::Reason);
      guard.feed(ReactKind::Invoke);
      ++iters;
      return do_action(std::move(a));
    };

    bool cold = resident_.count(task_id) == 0;
    if (cold) {
      ++cold_reloads_;
      for (int i = 0; i < cfg_.reload_cost && iters < cfg_.iteration_budget; ++i) {
        ActionRecord reload;
        reload.task_id = task_id;
        reload.app_id = t.app_id;
        reload.artifact_id = t.deliverable_id;
        reload.op = ActionOp::Reload;
        act(std::move(reload));
      }
      flat_load_state(t);
    }

    std::size_t applied = 0;
    if (iters < cfg_.iteration_budget) {
      ActionRecord open;
      open.task_id = task_id;
      open.app_id = t.app_id;
      open.artifact_id = t.deliverable_id;
      open.op = ActionOp::Open;
      act(std::move(open));
      for (int i = 0; i < cfg_.probe_cost && iters < cfg_.iteration_budget; ++i) {
        ActionRecord probe;
        probe.task_id = task_id;
        probe.app_id = t.app_id;
        probe.artifact_id = t.deliverable_id;
        probe.op = ActionOp::Inspect;
        probe.key = t.edit_script[std::size_t(i) % t.edit_script.size()].key;
        act(std::move(probe));
      }
      for (; applied < t.edit_script.size() && iters < cfg_.iteration_budget; ++applied) {
        const EditStep& step = t.edit_script[applied];
        const TaskSpec* victim = interference_victim(t, step.key);
        if (victim) {
          guard.feed(ReactKind::Reason);
          guard.feed(ReactKind::Invoke);
          ++iters;
          workspace_.write_direct(victim->app_id, victim->deliverable_id, step.key, step.value);
          workspace_.tick();
          budget_.charge(1);
          ++total_steps_;
          ++interference_events_;
        } else {
          ActionRecord edit;
          edit.task_id = task_id;
          edit.app_id = t.app_id;
          edit.op = ActionOp::Edit;
          edit.key = step.key;
          edit.value = step.value;
          act(std::move(edit));
        }
      }
    }
    guard.feed(ReactKind::Done);

    bool success = applied == t.edit_script.size();
    st.iterations_this_attempt = iters;
    steps_by_task_[task_id] += iters;
    finish_attempt(st, success);
    if (success) judge_completion(t);
    if (success) {
      flat_push(make_entry(EntryOrigin::Observation,
                           "finished " + task_id + " in " + std::to_string(iters) + " steps",
                           cycles_, task_id, ""));
    } else {
      flat_push(make_entry(EntryOrigin::Observation,
                           "error cap " + task_id + " a" + std::to_string(st.attempt_count),
                           cycles_, task_id, ""));
    }
    return iters;
  }

  // The flat window's binding for a shared key points at whichever other
  // co-resident state claiming that key was loaded most recently; the edit
  // follows the stale binding instead of the agent's own deliverable.
  const TaskSpec* interference_victim(const TaskSpec& self, const std::string& key) const {
    auto ku = key_users_.find(key);
    if (ku == key_users_.end() || ku->second.size() < 2) return nullptr;
    for (auto it = load_order_.rbegin(); it != load_order_.rend(); ++it) {
      if (*it == self.task_id) continue;
      if (!resident_.count(*it)) continue;
      const auto& users = ku->second;
      if (std::find(users.begin(), users.end(), *it) == users.end()) continue;
      const TaskSpec& other = graph_.spec(*it);
      // Same target artifact means the binding is unambiguous; conflation
      // needs the key to name different documents in the two states.
      if (other.deliverable_id == self.deliverable_id && other.app_id == self.app_id) continue;
      return &other;
    }
    return nullptr;
  }

  // Verdict recorded the moment a task completes: the deliverable is compared
  // against the artifact its full edit script would produce. Later activity
  // on a shared document does not retroactively change a recorded verdict.
  void judge_completion(const TaskSpec& t) {
    judged_[t.task_id] =
        judge_artifact(workspace_.app(t.app_id).doc(t.deliverable_id), golden_artifact(t));
  }

  // ----- orchestrated rungs -----

  long orchestrated_cycle(const std::string& task_id) {
    const TaskSpec& t = graph_.spec(task_id);
    TaskStatus& st = statuses_[task_id];
    budget_.charge(cfg_.reprioritize_cost);  // queue pop

    ContextWindow window(cfg_.context_budget);
    window.push(make_entry(EntryOrigin::PlanUpdate,
                           "cycle " + std::to_string(cycles_) + " task " + task_id +
                               " attempt " + std::to_string(st.attempt_count + 1) + " " +
                               t.description,
                           cycles_, task_id, t.app_id));
    RetrievalQuery q;
    q.text = t.description;
    q.now = clock_.now;
    q.k = cfg_.memory_k;
    q.half_life_minutes = cfg_.half_life_minutes;
    for (const auto& scored : memory_.retrieve(q)) {
      window.push(make_entry(EntryOrigin::Observation, memory_.get(scored.record_id).content,
                             cycles_, "", ""));
    }

    start_attempt(st);
    ReactGuard guard;
    int iters = 0;
    ToolDescriptor cua = cua_descriptor(t.app_id);
    auto tools = filter_tools(identity_, all_descriptors(t.app_id), t.app_id);
    bool cua_allowed = false;
    for (const auto& d : tools)
      if (d.name == cua.name) cua_allowed = true;
    if (!cua_allowed) fail(Errc::BadConfig, "identity lacks tool " + cua.name);

    auto act = [&](const std::string& op, const std::string& key, const std::string& value) {
      guard.feed(ReactKind::Reason);
      guard.feed(ReactKind::Invoke);
      ++iters;
      ++total_steps_;
      Payload inputs{{"task", task_id}, {"step", op + (key.empty() ? "" : " " + key)}};
      SubAgentFn body = [&](const Payload&, int) {
        SubAgentRun run;
        ActionRecord a;
        a.timestamp = clock_.now;
        a.actor = identity_.agent_id;
        a.task_id = task_id;
        a.app_id = t.app_id;
        if (op == "open") {
          a.op = ActionOp::Open;
          a.artifact_id = t.deliverable_id;
        } else if (op == "probe") {
          a.op = ActionOp::Inspect;
          a.artifact_id = t.deliverable_id;
          a.key = key;
        } else {
          a.op = ActionOp::Edit;
          a.key = key;
          a.value = value;
        }
        ActionOutcome out = backend_->perform(workspace_, a);
        workspace_.tick();
        run.ok = out == ActionOutcome::Ok;
        run.payload = {{"outcome", action_outcome_name(out)}, {"artifact", a.artifact_id}};
        run.internal_steps = 1;
        return run;
      };
      SubAgentResult r = invoke_subagent(window, budget_, cua, body, inputs, cycles_);
      peak_window_ = std::max(peak_window_, window.total_tokens());
      return r.ok;
    };

    // Demonstration replay (highest rung): a sufficiently similar prior
    // success skips the exploratory probes; the demo's agreeing edit prefix
    // is replayed byte-for-byte, then the task's own remaining steps run.
    bool used_demo = false;
    double best_similarity = 0;
    std::vector<EditStep> script = t.edit_script;
    if (policy_ == PolicyKind::ExpLearning) {
      auto hit = demo_index_.inject(demo_digest(t), t.app_id, cfg_.demo_threshold);
      if (hit) {
        std::size_t prefix = replay_prefix(*hit->demo, t);
        auto demo_edits = hit->demo->edit_steps();
        for (std::size_t i = 0; i < prefix; ++i) script[i] = demo_edits[i];
        demo_replay_steps_ += long(prefix);
        used_demo = true;
        best_similarity = hit->similarity;
        ++demos_injected_;
      }
    }

    bool ok = true;
    std::size_t applied = 0;
    if (iters < cfg_.iteration_budget) ok = act("open", "", "");
    if (ok && !used_demo) {
      for (int i = 0; i < cfg_.probe_cost && iters < cfg_.iteration_budget; ++i)
        act("probe", script[std::size_t(i) % script.size()].key, "");
    }
    if (ok) {
      for (; applied < script.size() && iters < cfg_.iteration_budget; ++applied) {
        const EditStep& step = script[applied];
        if (!act("edit", step.key, step.value)) break;
      }
    }
    guard.feed(ReactKind::Done);

    bool success = ok && applied == script.size();
    st.iterations_this_attempt = iters;
    steps_by_task_[task_id] += iters;
    finish_attempt(st, success);
    if (success) judge_completion(t);

    MemoryRecord note;
    note.kind = RecordKind::ActionSummary;
    note.important = !success;
    note.task_tag = task_id;
    note.app_tag = t.app_id;
    note.created_at = note.last_accessed = clock_.now;
    note.content = "task " + task_id + (success ? " completed" : " failed") + " attempt " +
                   std::to_string(st.attempt_count) + " steps " + std::to_string(iters) +
                   " cycle " + std::to_string(cycles_);
    memory_.store(std::move(note));

    PlanUpdateEvent ev;
    ev.task_id = task_id;
    ev.at = clock_.now;
    if (success) {
      ev.kind = PlanEventKind::TaskCompleted;
      ev.payload = "completed in " + std::to_string(iters) + " steps";
    } else if (statuses_[task_id].state == TaskState::Skipped) {
      ev.kind = PlanEventKind::TaskSkipped;
      ev.payload = "failed " + std::to_string(cfg_.max_attempts) + " attempts";
    } else {
      ev.kind = PlanEventKind::TaskBlocked;
      ev.payload = "attempt " + std::to_string(st.attempt_count) + " hit the iteration cap";
    }
    budget_.charge(1);
    cog_update_plan(planner_, graph_, statuses_, ev);

    if (success && policy_ == PolicyKind::ExpLearning && judged_[task_id] &&
        best_similarity < 1.0) {
      Trajectory traj;
      traj.task_id = task_id;
      traj.app_id = t.app_id;
      traj.initial_digest = "app " + t.app_id;
      traj.success = true;
      ActionRecord open;
      open.op = ActionOp::Open;
      open.artifact_id = t.deliverable_id;
      open.app_id = t.app_id;
      traj.actions.push_back(open);
      for (const auto& step : t.edit_script) {
        ActionRecord e;
        e.op = ActionOp::Edit;
        e.key = step.key;
        e.value = step.value;
        e.app_id = t.app_id;
        e.artifact_id = t.deliverable_id;
        traj.actions.push_back(e);
      }
      demo_index_.add(distill(traj, t.description));
      ++demos_distilled_;
    }

    if (policy_ == PolicyKind::CognitiveTools || policy_ == PolicyKind::ExpLearning) {
      budget_.charge(1);
      cog_track_tasks(graph_, statuses_);
    }
    return iters;
  }

  std::string demo_digest(const TaskSpec& t) const { return t.description + " | app " + t.app_id; }

  std::vector<ToolDescriptor> all_descriptors(const std::string& app) const {
    std::vector<ToolDescriptor> out = cognitive_descriptors();
    out.push_back(research_descriptor());
    std::set<std::string> apps;
    for (const auto& t : suite_.tasks) apps.insert(t.app_id);
    for (const auto& a : apps) out.push_back(cua_descriptor(a));
    (void)app;
    return out;
  }

  // ----- day end -----

  void finalize_day(int day) {
    if (!is_orchestrated(policy_)) return;
    if (policy_ == PolicyKind::CognitiveTools || policy_ == PolicyKind::ExpLearning) {
      budget_.charge(1);
      ReflectReport refl = cog_reflect(graph_, statuses_);
      MemoryRecord rec;
      rec.kind = RecordKind::Note;
      rec.created_at = rec.last_accessed = clock_.now;
      rec.content = "reflection lessons " + std::to_string(refl.lessons.size()) + " outcomes " +
                    std::to_string(refl.outcomes.size());
      memory_.store(std::move(rec));
    }
    std::vector<DayOutcome> outcomes;
    for (const auto& t : suite_.tasks) {
      const TaskStatus& st = statuses_[t.task_id];
      if (!is_terminal(st.state)) continue;
      DayOutcome o;
      o.task_id = t.task_id;
      o.app_id = t.app_id;
      o.completed = st.state == TaskState::Completed;
      o.attempts = st.attempt_count;
      o.steps = steps_by_task_.count(t.task_id) ? steps_by_task_.at(t.task_id) : 0;
      outcomes.push_back(o);
    }
    consolidate_day(memory_, day, outcomes, clock_.now);
  }

  DayReport build_report(int day, SimMinute start, SimMinute end, bool out_of_budget) {
    (void)day;
    DayReport r;
    r.policy = policy_;
    r.load_pct = load_pct_;
    r.seed = seed_;
    r.n_tasks = int(suite_.tasks.size());
    r.start_minute = start;
    r.end_minute = clock_.now;
    (void)end;
    r.statuses = statuses_;
    for (const auto& t : suite_.tasks) {
      const TaskStatus& st = statuses_[t.task_id];
      if (st.state == TaskState::Completed) ++r.completed_statuses;
      if (st.state == TaskState::Skipped) ++r.skipped;
      auto jit = judged_.find(t.task_id);
      bool ok = jit != judged_.end() && jit->second;
      r.judged[t.task_id] = ok;
      if (ok) ++r.judged_true;
    }
    r.rate_status_tenths =
        r.n_tasks ? completion_rate(r.completed_statuses, r.n_tasks) : 0;
    r.rate_judged_tenths = r.n_tasks ? completion_rate(r.judged_true, r.n_tasks) : 0;
    r.cycles = cycles_;
    r.tool_calls = budget_.tool_calls;
    r.total_steps = total_steps_;
    r.peak_window_tokens = peak_window_;
    r.compressions = compressions_;
    r.interference_events = interference_events_;
    r.cold_reloads = cold_reloads_;
    r.demos_distilled = demos_distilled_;
    r.demos_injected = demos_injected_;
    r.dropped_edges = dropped_edges_;
    r.all_terminal = true;
    for (const auto& [id, st] : statuses_)
      if (!is_terminal(st.state)) r.all_terminal = false;
    r.budget_exhausted = !r.all_terminal && out_of_budget;
    return r;
  }

  RunConfig cfg_;
  Suite suite_;
  DependencyGraph graph_;
  Identity identity_;
  PolicyKind policy_;
  std::uint64_t seed_;
  int load_pct_;
  int dropped_edges_;
  Rng rng_;
  SimClock clock_;
  SessionBudget budget_;
  Workspace workspace_;
  StatusMap statuses_;
  Planner planner_;
  SemanticStore memory_;
  DemoIndex demo_index_;
  ContextWindow flat_window_;
  std::unique_ptr<CuaBackend> backend_;
  std::map<std::string, std::vector<std::string>> key_users_;
  std::set<std::string> resident_;
  std::vector<std::string> load_order_;
  std::map<std::string, long> steps_by_task_;
  long demo_replay_steps_ = 0;
  std::map<std::string, bool> judged_;
  int cycles_ = 0;
  long total_steps_ = 0;
  long peak_window_ = 0;
  int compressions_ = 0;
  int interference_events_ = 0;
  int cold_reloads_ = 0;
  int demos_distilled_ = 0;
  int demos_injected_ = 0;
};

}  // namespace orchsim
