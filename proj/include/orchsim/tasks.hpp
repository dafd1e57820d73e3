#pragma once

// Task model: immutable task specs, the per-task status machine, and the
// dependency graph with deterministic topological ordering.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "orchsim/common.hpp"

namespace orchsim {

struct EditStep {
  std::string key;
  std::string value;
  bool operator==(const EditStep&) const = default;
};

struct TaskSpec {
  std::string task_id;
  std::string app_id;
  std::string description;
  int priority = 0;          // lower value = more urgent
  long state_footprint = 0;  // context tokens needed to keep the task warm
  int step_count = 0;        // length of edit_script
  std::optional<SimMinute> deadline;
  std::string deliverable_id;
  std::vector<EditStep> edit_script;
  bool operator==(const TaskSpec&) const = default;
};

enum class TaskState { Pending, Blocked, InProgress, Completed, Failed, Skipped };

inline const char* task_state_name(TaskState s) {
  switch (s) {
    case TaskState::Pending: return "Pending";
    case TaskState::Blocked: return "Blocked";
    case TaskState::InProgress: return "InProgress";
    case TaskState::Completed: return "Completed";
    case TaskState::Failed: return "Failed";
    case TaskState::Skipped: return "Skipped";
  }
  return "?";
}

inline bool is_terminal(TaskState s) {
  return s == TaskState::Completed || s == TaskState::Skipped;
}

// Legal transitions. Completed and Skipped are absorbing.
inline bool transition_allowed(TaskState from, TaskState to) {
  switch (from) {
    case TaskState::Pending:
      return to == TaskState::Blocked || to == TaskState::InProgress;
    case TaskState::Blocked:
      return to == TaskState::Pending;
    case TaskState::InProgress:
      return to == TaskState::Completed || to == TaskState::Failed || to == TaskState::Pending;
    case TaskState::Failed:
      return to == TaskState::Pending || to == TaskState::Skipped;
    case TaskState::Completed:
    case TaskState::Skipped:
      return false;
  }
  return false;
}

struct TaskStatus {
  TaskState state = TaskState::Pending;
  int attempt_count = 0;
  int iterations_this_attempt = 0;

  void transition(TaskState to) {
    if (!transition_allowed(state, to))
      fail(Errc::SchemaViolation, std::string("illegal transition ") + task_state_name(state) +
                                      " -> " + task_state_name(to));
    state = to;
  }
};

using StatusMap = std::map<std::string, TaskStatus>;

class DependencyGraph {
 public:
  // Edges map a task to its prerequisites. Rejects unknown endpoints and
  // cycles; a detected cycle is reported in order.
  static DependencyGraph build(const std::vector<TaskSpec>& tasks,
                               const std::vector<std::pair<std::string, std::string>>& deps) {
    DependencyGraph g;
    for (const auto& t : tasks) {
      if (g.specs_.count(t.task_id)) fail(Errc::ParseError, "duplicate task id " + t.task_id);
      g.specs_.emplace(t.task_id, t);
    }
    for (const auto& [task, prereq] : deps) {
      if (!g.specs_.count(task)) fail(Errc::UnknownTask, "dependency names " + task);
      if (!g.specs_.count(prereq)) fail(Errc::UnknownTask, "dependency names " + prereq);
      g.prereqs_[task].push_back(prereq);
    }
    for (auto& [id, pre] : g.prereqs_) {
      std::sort(pre.begin(), pre.end());
      pre.erase(std::unique(pre.begin(), pre.end()), pre.end());
    }
    g.topo_ = g.topological_order();
    return g;
  }

  const TaskSpec& spec(const std::string& id) const {
    auto it = specs_.find(id);
    if (it == specs_.end()) fail(Errc::UnknownTask, id);
    return it->second;
  }

  bool has(const std::string& id) const { return specs_.count(id) != 0; }
  std::size_t size() const { return specs_.size(); }

  const std::vector<std::string>& prereqs(const std::string& id) const {
    static const std::vector<std::string> none;
    auto it = prereqs_.find(id);
    return it == prereqs_.end() ? none : it->second;
  }

  // Task ids in deterministic topological order: Kahn's algorithm, ties by id.
  const std::vector<std::string>& topo_order() const { return topo_; }

  // Ids sorted lexicographically.
  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(specs_.size());
    for (const auto& [id, _] : specs_) out.push_back(id);
    return out;
  }

  bool prereqs_completed(const std::string& id, const StatusMap& status) const {
    for (const auto& p : prereqs(id)) {
      auto it = status.find(p);
      if (it == status.end() || it->second.state != TaskState::Completed) return false;
    }
    return true;
  }

  // A prerequisite that ended terminal-but-not-Completed can never unblock.
  bool prereqs_unsatisfiable(const std::string& id, const StatusMap& status) const {
    for (const auto& p : prereqs(id)) {
      auto it = status.find(p);
      if (it != status.end() && it->second.state == TaskState::Skipped) return true;
    }
    return false;
  }

 private:
  std::vector<std::string> topological_order() const {
    std::map<std::string, int> outstanding;
    std::map<std::string, std::vector<std::string>> dependents;
    for (const auto& [id, _] : specs_) outstanding[id] = 0;
    for (const auto& [id, pre] : prereqs_) {
      outstanding[id] = int(pre.size());
      for (const auto& p : pre) dependents[p].push_back(id);
    }
    std::set<std::string> frontier;
    for (const auto& [id, n] : outstanding)
      if (n == 0) frontier.insert(id);
    std::vector<std::string> order;
    while (!frontier.empty()) {
      std::string id = *frontier.begin();
      frontier.erase(frontier.begin());
      order.push_back(id);
      for (const auto& d : dependents[id])
        if (--outstanding[d] == 0) frontier.insert(d);
    }
    if (order.size() != specs_.size()) {
      std::vector<std::string> cycle;
      for (const auto& [id, n] : outstanding)
        if (n > 0) cycle.push_back(id);
      std::string what = "cycle among:";
      for (const auto& id : cycle) what += " " + id;
      fail(Errc::CycleDetected, what);
    }
    return order;
  }

  std::map<std::string, TaskSpec> specs_;
  std::map<std::string, std::vector<std::string>> prereqs_;
  std::vector<std::string> topo_;
};

// Tasks whose prerequisites are all Completed and which are startable
// (Pending, or Blocked pending an unblock event). Ordered by priority
// ascending, then deadline ascending (absent deadlines last), then id.
inline std::vector<std::string> ready_tasks(const DependencyGraph& g, const StatusMap& status) {
  std::vector<std::string> out;
  for (const auto& id : g.ids()) {
    auto it = status.find(id);
    TaskState s = it == status.end() ? TaskState::Pending : it->second.state;
    if (s != TaskState::Pending && s != TaskState::Blocked) continue;
    if (!g.prereqs_completed(id, status)) continue;
    out.push_back(id);
  }
  std::sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
    const TaskSpec& ta = g.spec(a);
    const TaskSpec& tb = g.spec(b);
    if (ta.priority != tb.priority) return ta.priority < tb.priority;
    SimMinute da = ta.deadline.value_or(INT64_MAX);
    SimMinute db = tb.deadline.value_or(INT64_MAX);
    if (da != db) return da < db;
    return a < b;
  });
  return out;
}

}  // namespace orchsim
