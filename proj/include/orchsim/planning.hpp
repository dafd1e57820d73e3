#pragma once

// Hierarchical plans at two persisted scales (monthly objectives with
// milestones, daily task lists) plus event-driven propagation between them.
// Plan generation is data-driven and deterministic: objectives come from the
// identity's responsibilities, daily selection follows a fixed comparator.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orchsim/identity.hpp"
#include "orchsim/memory.hpp"
#include "orchsim/sim_env.hpp"
#include "orchsim/tasks.hpp"

namespace orchsim {

constexpr int kMaxDailyTasks = 12;
constexpr int kMinDailyTasks = 6;

enum class MilestoneStatus { Open, Met, Missed, Revised };

inline const char* milestone_status_name(MilestoneStatus s) {
  switch (s) {
    case MilestoneStatus::Open: return "open";
    case MilestoneStatus::Met: return "met";
    case MilestoneStatus::Missed: return "missed";
    case MilestoneStatus::Revised: return "revised";
  }
  return "?";
}

struct Milestone {
  std::string description;
  SimMinute due = 0;
  MilestoneStatus status = MilestoneStatus::Open;
};

struct Objective {
  std::string text;
  std::string app_id;
  std::vector<Milestone> milestones;
};

struct MonthlyPlan {
  int month = 0;
  std::vector<Objective> objectives;

  SimMinute month_start() const { return SimMinute(month) * kDaysPerMonth * kMinutesPerDay; }

  const Objective* objective_for(const std::string& app_id) const {
    for (const auto& o : objectives)
      if (o.app_id == app_id) return &o;
    return nullptr;
  }
};

struct PlannedTask {
  std::string task_id;
  std::string app_id;
  int rank = 0;  // unique, 1 = first
  std::vector<std::string> prereqs;
};

struct DailyPlan {
  int day = 0;
  int wave = 0;  // refills within one day increment this
  std::vector<PlannedTask> tasks;
  std::map<std::string, std::string> progress;  // task_id -> status digest
  std::vector<std::string> context_notes;
  bool empty_backlog = false;

  const PlannedTask* find(const std::string& task_id) const {
    for (const auto& t : tasks)
      if (t.task_id == task_id) return &t;
    return nullptr;
  }
};

enum class PlanEventKind { TaskCompleted, TaskBlocked, TaskSkipped, NewInformation };

inline const char* plan_event_name(PlanEventKind k) {
  switch (k) {
    case PlanEventKind::TaskCompleted: return "task_completed";
    case PlanEventKind::TaskBlocked: return "task_blocked";
    case PlanEventKind::TaskSkipped: return "task_skipped";
    case PlanEventKind::NewInformation: return "new_information";
  }
  return "?";
}

struct PlanUpdateEvent {
  PlanEventKind kind = PlanEventKind::NewInformation;
  std::optional<std::string> task_id;
  std::string payload;
  SimMinute at = 0;
};

// Which milestone of the task's app objective a task counts toward: the
// first milestone due on or after the task deadline; deadline-free tasks
// fall to the final milestone.
inline const Milestone* milestone_for(const MonthlyPlan& pm, const TaskSpec& task) {
  const Objective* obj = pm.objective_for(task.app_id);
  if (!obj || obj->milestones.empty()) return nullptr;
  if (task.deadline)
    for (const auto& m : obj->milestones)
      if (m.due >= *task.deadline) return &m;
  return &obj->milestones.back();
}

inline Milestone* milestone_for(MonthlyPlan& pm, const TaskSpec& task) {
  return const_cast<Milestone*>(milestone_for(std::as_const(pm), task));
}

inline std::string render_monthly(const MonthlyPlan& pm) {
  std::string out = "monthly plan month " + std::to_string(pm.month) + "\n";
  for (const auto& o : pm.objectives) {
    out += "  objective [" + o.app_id + "] " + o.text + "\n";
    for (const auto& m : o.milestones)
      out += "    milestone " + m.description + " due " + format_time(m.due) + " " +
             milestone_status_name(m.status) + "\n";
  }
  return out;
}

inline std::string render_daily(const DailyPlan& pd) {
  std::string out = "daily plan day " + std::to_string(pd.day) + " wave " +
                    std::to_string(pd.wave) + "\n";
  if (pd.empty_backlog) out += "  (empty backlog)\n";
  for (const auto& t : pd.tasks) {
    out += "  " + std::to_string(t.rank) + ". " + t.task_id + " [" + t.app_id + "]";
    if (!t.prereqs.empty()) {
      out += " after";
      for (const auto& p : t.prereqs) out += " " + p;
    }
    auto it = pd.progress.find(t.task_id);
    if (it != pd.progress.end()) out += " -- " + it->second;
    out += "\n";
  }
  for (const auto& n : pd.context_notes) out += "  note: " + n + "\n";
  return out;
}

class Planner {
 public:
  // One objective per identity responsibility, two milestones each (mid and
  // end of month). The plan is persisted to the semantic store.
  const MonthlyPlan& generate_monthly(SemanticStore& memory, const Identity& id, int month,
                                      SimMinute now) {
    if (monthly_.count(month)) fail(Errc::PlanExists, "monthly plan for month " + std::to_string(month));
    MonthlyPlan pm;
    pm.month = month;
    for (const auto& r : id.responsibilities) {
      Objective o;
      o.text = r.text;
      o.app_id = r.app_id;
      SimMinute start = pm.month_start();
      o.milestones.push_back({"mid-month: " + r.text,
                              start + SimMinute(kDaysPerMonth / 2) * kMinutesPerDay,
                              MilestoneStatus::Open});
      o.milestones.push_back({"month-end: " + r.text,
                              start + SimMinute(kDaysPerMonth) * kMinutesPerDay - 1,
                              MilestoneStatus::Open});
      pm.objectives.push_back(std::move(o));
    }
    auto [it, _] = monthly_.emplace(month, std::move(pm));
    persist(memory, RecordKind::MonthlyPlan, render_monthly(it->second), now);
    return it->second;
  }

  bool has_monthly(int month) const { return monthly_.count(month) != 0; }

  MonthlyPlan& monthly(int month) {
    auto it = monthly_.find(month);
    if (it == monthly_.end()) fail(Errc::NoPlan, "no monthly plan for month " + std::to_string(month));
    return it->second;
  }

  // Picks up to 12 backlog tasks ordered by (assigned milestone due, priority,
  // deadline with absent last, id). Non-terminal tasks only; tasks with
  // unfinished prerequisites are allowed in and simply sit blocked.
  const DailyPlan& generate_daily(SemanticStore& memory, const DependencyGraph& graph,
                                  const StatusMap& statuses, int day, SimMinute now) {
    int month = day / kDaysPerMonth;
    const MonthlyPlan& pm = monthly(month);

    std::vector<std::string> backlog;
    for (const auto& id : graph.ids()) {
      auto it = statuses.find(id);
      TaskState s = it == statuses.end() ? TaskState::Pending : it->second.state;
      if (!is_terminal(s)) backlog.push_back(id);
    }
    auto key = [&](const std::string& id) {
      const TaskSpec& t = graph.spec(id);
      const Milestone* m = milestone_for(pm, t);
      SimMinute milestone_due = m ? m->due : std::numeric_limits<SimMinute>::max();
      SimMinute deadline = t.deadline ? *t.deadline : std::numeric_limits<SimMinute>::max();
      return std::tuple(milestone_due, t.priority, deadline, id);
    };
    std::sort(backlog.begin(), backlog.end(),
              [&](const std::string& a, const std::string& b) { return key(a) < key(b); });

    DailyPlan pd;
    pd.day = day;
    pd.wave = daily_ && daily_->day == day ? daily_->wave + 1 : 0;
    pd.empty_backlog = backlog.empty();
    if (daily_ && daily_->day == day) pd.context_notes = daily_->context_notes;
    std::size_t take = std::min<std::size_t>(backlog.size(), kMaxDailyTasks);
    for (std::size_t i = 0; i < take; ++i) {
      PlannedTask t;
      t.task_id = backlog[i];
      t.app_id = graph.spec(backlog[i]).app_id;
      t.rank = int(i) + 1;
      t.prereqs = graph.prereqs(backlog[i]);
      pd.tasks.push_back(std::move(t));
    }
    daily_ = std::move(pd);
    persist(memory, RecordKind::DailyPlan, render_daily(*daily_), now);
    return *daily_;
  }

  bool has_daily() const { return daily_.has_value(); }

  DailyPlan& daily() {
    if (!daily_) fail(Errc::NoPlan, "no daily plan");
    return *daily_;
  }

  // Amortized O(plan size) pop: first rank whose prerequisites are Completed
  // and whose status allows another attempt. No backlog rescoring happens.
  static std::optional<std::string> select_next(const DailyPlan& pd, const StatusMap& statuses,
                                                int max_attempts) {
    for (const auto& t : pd.tasks) {
      auto it = statuses.find(t.task_id);
      const TaskStatus st = it == statuses.end() ? TaskStatus{} : it->second;
      bool eligible = st.state == TaskState::Pending ||
                      (st.state == TaskState::Failed && st.attempt_count < max_attempts);
      if (!eligible) continue;
      bool ready = true;
      for (const auto& p : t.prereqs) {
        auto pit = statuses.find(p);
        if (pit == statuses.end() || pit->second.state != TaskState::Completed) ready = false;
      }
      if (ready) return t.task_id;
    }
    return std::nullopt;
  }

  // Applies one event to both plan levels. Completion can mark a milestone
  // Met; blockers demote the task one rank and, at two blocked tasks under
  // one milestone, escalate it to Revised; skips can mark a milestone Missed
  // once every task under it is terminal.
  void propagate_update(const DependencyGraph& graph, const StatusMap& statuses,
                        const PlanUpdateEvent& event) {
    DailyPlan& pd = daily();
    if (event.kind == PlanEventKind::NewInformation) {
      pd.context_notes.push_back(event.payload);
      return;
    }
    if (!event.task_id || !graph.has(*event.task_id))
      fail(Errc::UnknownTask, "plan update for unknown task");
    const TaskSpec& task = graph.spec(*event.task_id);
    MonthlyPlan& pm = monthly(pd.day / kDaysPerMonth);
    Milestone* mine = milestone_for(pm, task);

    switch (event.kind) {
      case PlanEventKind::TaskCompleted: {
        pd.progress[task.task_id] = "completed";
        if (mine && mine->status == MilestoneStatus::Open && milestone_done(pm, graph, statuses, *mine))
          mine->status = MilestoneStatus::Met;
        break;
      }
      case PlanEventKind::TaskBlocked: {
        pd.progress[task.task_id] = "blocked";
        demote(pd, task.task_id);
        if (mine && mine->status == MilestoneStatus::Open && blocked_under(pd, pm, graph, *mine) >= 2)
          mine->status = MilestoneStatus::Revised;
        break;
      }
      case PlanEventKind::TaskSkipped: {
        pd.progress[task.task_id] = "skipped";
        if (mine && mine->status != MilestoneStatus::Met && all_terminal(pm, graph, statuses, *mine))
          mine->status = MilestoneStatus::Missed;
        break;
      }
      case PlanEventKind::NewInformation:
        break;
    }
  }

  // Compares the plan against the observable environment. A planned task
  // whose deliverable vanished emits TaskBlocked; a backlog task outside the
  // plan whose deliverable already has content emits NewInformation.
  std::vector<PlanUpdateEvent> detect_inconsistency(const DependencyGraph& graph,
                                                    const StatusMap& statuses,
                                                    const Workspace& ws, SimMinute now) const {
    std::vector<PlanUpdateEvent> events;
    if (!daily_) return events;
    for (const auto& id : graph.ids()) {
      const TaskSpec& t = graph.spec(id);
      auto it = statuses.find(id);
      TaskState s = it == statuses.end() ? TaskState::Pending : it->second.state;
      if (is_terminal(s) || !ws.has_app(t.app_id)) continue;
      bool present = ws.app(t.app_id).has_artifact(t.deliverable_id);
      if (daily_->find(id)) {
        if (!present)
          events.push_back({PlanEventKind::TaskBlocked, id,
                            "deliverable " + t.deliverable_id + " missing", now});
      } else if (present && !ws.app(t.app_id).doc(t.deliverable_id).empty()) {
        events.push_back({PlanEventKind::NewInformation, id,
                          "unplanned deliverable " + t.deliverable_id + " has content", now});
      }
    }
    std::sort(events.begin(), events.end(), [](const PlanUpdateEvent& a, const PlanUpdateEvent& b) {
      return a.task_id < b.task_id;
    });
    return events;
  }

 private:
  static void demote(DailyPlan& pd, const std::string& task_id) {
    for (std::size_t i = 0; i + 1 < pd.tasks.size(); ++i) {
      if (pd.tasks[i].task_id == task_id) {
        std::swap(pd.tasks[i].rank, pd.tasks[i + 1].rank);
        std::swap(pd.tasks[i], pd.tasks[i + 1]);
        return;
      }
    }
  }

  bool milestone_done(const MonthlyPlan& pm, const DependencyGraph& graph,
                      const StatusMap& statuses, const Milestone& m) const {
    for (const auto& id : graph.ids()) {
      if (milestone_for(pm, graph.spec(id)) != &m) continue;
      auto it = statuses.find(id);
      if (it == statuses.end() || it->second.state != TaskState::Completed) return false;
    }
    return true;
  }

  bool all_terminal(const MonthlyPlan& pm, const DependencyGraph& graph,
                    const StatusMap& statuses, const Milestone& m) const {
    for (const auto& id : graph.ids()) {
      if (milestone_for(pm, graph.spec(id)) != &m) continue;
      auto it = statuses.find(id);
      if (it == statuses.end() || !is_terminal(it->second.state)) return false;
    }
    return true;
  }

  int blocked_under(const DailyPlan& pd, const MonthlyPlan& pm, const DependencyGraph& graph,
                    const Milestone& m) const {
    int n = 0;
    for (const auto& [task_id, digest] : pd.progress) {
      if (digest != "blocked" || !graph.has(task_id)) continue;
      if (milestone_for(pm, graph.spec(task_id)) == &m) ++n;
    }
    return n;
  }

  void persist(SemanticStore& memory, RecordKind kind, std::string content, SimMinute now) {
    MemoryRecord rec;
    rec.kind = kind;
    rec.important = true;  // plans are critical records
    rec.created_at = rec.last_accessed = now;
    rec.content = std::move(content);
    memory.store(std::move(rec));
  }

  std::map<int, MonthlyPlan> monthly_;
  std::optional<DailyPlan> daily_;
};

}  // namespace orchsim
