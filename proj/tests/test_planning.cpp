#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "orchsim/planning.hpp"
#include "orchsim/runtime.hpp"
#include "orchsim/suite46.hpp"

using namespace orchsim;

namespace {

TaskSpec task(const std::string& id, const std::string& app, int priority,
              std::optional<SimMinute> deadline = std::nullopt) {
  TaskSpec t;
  t.task_id = id;
  t.app_id = app;
  t.description = "work on " + id;
  t.priority = priority;
  t.step_count = 10;
  t.deliverable_id = id + "-doc";
  for (int i = 0; i < 10; ++i)
    t.edit_script.push_back({id + "-k" + std::to_string(i), "v" + std::to_string(i)});
  t.deadline = deadline;
  return t;
}

Identity two_app_identity() { return make_default_identity({"excel", "word"}); }

}  // namespace

TEST_CASE("monthly plan derives objectives and milestones from responsibilities") {
  Planner planner;
  SemanticStore mem;
  Identity id = two_app_identity();
  const MonthlyPlan& pm = planner.generate_monthly(mem, id, 0, 0);

  REQUIRE(pm.objectives.size() == 2);
  CHECK(pm.objectives[0].app_id == "excel");
  CHECK(pm.objectives[1].app_id == "word");
  for (const auto& o : pm.objectives) {
    REQUIRE(o.milestones.size() == 2);
    CHECK(o.milestones[0].due == 15 * kMinutesPerDay);      // mid-month
    CHECK(o.milestones[1].due == 30 * kMinutesPerDay - 1);  // month end
    CHECK(o.milestones[0].status == MilestoneStatus::Open);
  }
  // Month 2 starts 60 days in.
  Planner p2;
  const MonthlyPlan& pm2 = p2.generate_monthly(mem, id, 2, 0);
  CHECK(pm2.month_start() == 2 * 30 * kMinutesPerDay);
  CHECK(pm2.objectives[0].milestones[0].due == pm2.month_start() + 15 * kMinutesPerDay);

  // Regenerating an existing month is an error, not a silent overwrite.
  try {
    planner.generate_monthly(mem, id, 0, 0);
    FAIL("expected PlanExists");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::PlanExists);
  }
  // Both plans were persisted to memory.
  CHECK(mem.by_kind(RecordKind::MonthlyPlan).size() == 2);
}

TEST_CASE("daily plan caps at twelve tasks ordered by milestone, priority, deadline, id") {
  Planner planner;
  SemanticStore mem;
  Identity id = two_app_identity();
  planner.generate_monthly(mem, id, 0, 0);

  std::vector<TaskSpec> tasks;
  // 15 backlog tasks: mixed priorities and deadlines across both apps.
  for (int i = 0; i < 15; ++i) {
    std::string tid = (i < 10 ? "a0" : "a1") + std::to_string(i % 10);
    std::optional<SimMinute> dl;
    if (i % 3 == 0) dl = SimMinute(10 * kMinutesPerDay + i);  // before mid-month
    tasks.push_back(task(tid, i % 2 ? "word" : "excel", i % 4, dl));
  }
  DependencyGraph g = DependencyGraph::build(tasks, {{"a03", "a00"}});
  StatusMap st;
  const DailyPlan& pd = planner.generate_daily(mem, g, st, 3, 3 * kMinutesPerDay);

  REQUIRE(pd.tasks.size() == std::size_t(kMaxDailyTasks));
  CHECK(pd.day == 3);
  CHECK(pd.wave == 0);
  // Ranks are 1..12 and unique.
  std::set<int> ranks;
  for (const auto& t : pd.tasks) ranks.insert(t.rank);
  CHECK(ranks.size() == 12);
  CHECK(*ranks.begin() == 1);
  CHECK(*ranks.rbegin() == 12);
  // Deadlined tasks count toward the mid-month milestone, so they sort first;
  // among them order is (priority, deadline, id).
  CHECK(pd.tasks[0].task_id == "a00");  // priority 0, deadline 10d+0
  CHECK(pd.tasks[1].task_id == "a12");  // priority 0, deadline 10d+12
  // Prereqs ride along into the plan entries.
  const PlannedTask* dep = pd.find("a03");
  REQUIRE(dep != nullptr);
  REQUIRE(dep->prereqs.size() == 1);
  CHECK(dep->prereqs[0] == "a00");

  // Completed tasks drop out of the next wave; same-day refill bumps wave.
  st["a00"].transition(TaskState::InProgress);
  st["a00"].transition(TaskState::Completed);
  const DailyPlan& pd2 = planner.generate_daily(mem, g, st, 3, 3 * kMinutesPerDay + 60);
  CHECK(pd2.wave == 1);
  CHECK(pd2.find("a00") == nullptr);
}

TEST_CASE("select_next pops the first ready rank without rescoring") {
  Planner planner;
  SemanticStore mem;
  Identity id = two_app_identity();
  planner.generate_monthly(mem, id, 0, 0);
  std::vector<TaskSpec> tasks = {task("b1", "excel", 0), task("b2", "excel", 1),
                                 task("b3", "word", 2)};
  DependencyGraph g = DependencyGraph::build(tasks, {{"b2", "b1"}});
  StatusMap st;
  planner.generate_daily(mem, g, st, 0, 0);

  CHECK(Planner::select_next(planner.daily(), st, 3) == "b1");
  // b1 in progress: not eligible; b2 blocked on it; b3 is next ready.
  st["b1"].transition(TaskState::InProgress);
  CHECK(Planner::select_next(planner.daily(), st, 3) == "b3");
  // b1 completed unblocks b2 ahead of b3.
  st["b1"].transition(TaskState::Completed);
  CHECK(Planner::select_next(planner.daily(), st, 3) == "b2");
  // A failed task stays selectable until the attempt cap, then drops out.
  st["b2"].transition(TaskState::InProgress);
  st["b2"].transition(TaskState::Failed);
  st["b2"].attempt_count = 2;
  CHECK(Planner::select_next(planner.daily(), st, 3) == "b2");
  st["b2"].attempt_count = 3;
  CHECK(Planner::select_next(planner.daily(), st, 3) == "b3");
  st["b3"].transition(TaskState::InProgress);
  CHECK(!Planner::select_next(planner.daily(), st, 3).has_value());
}

TEST_CASE("completion propagates up and can mark a milestone met") {
  Planner planner;
  SemanticStore mem;
  Identity id = make_default_identity({"excel"});
  planner.generate_monthly(mem, id, 0, 0);
  // Both tasks fall to the month-end milestone (no deadlines).
  std::vector<TaskSpec> tasks = {task("c1", "excel", 0), task("c2", "excel", 1)};
  DependencyGraph g = DependencyGraph::build(tasks, {});
  StatusMap st;
  planner.generate_daily(mem, g, st, 0, 0);
  Milestone& month_end = planner.monthly(0).objectives[0].milestones[1];

  st["c1"].transition(TaskState::InProgress);
  st["c1"].transition(TaskState::Completed);
  planner.propagate_update(g, st, {PlanEventKind::TaskCompleted, "c1", "done", 100});
  CHECK(planner.daily().progress.at("c1") == "completed");
  CHECK(month_end.status == MilestoneStatus::Open);  // c2 still pending

  st["c2"].transition(TaskState::InProgress);
  st["c2"].transition(TaskState::Completed);
  planner.propagate_update(g, st, {PlanEventKind::TaskCompleted, "c2", "done", 120});
  CHECK(month_end.status == MilestoneStatus::Met);
}

TEST_CASE("two blockers under one milestone demote ranks and revise the milestone") {
  Planner planner;
  SemanticStore mem;
  Identity id = make_default_identity({"excel"});
  planner.generate_monthly(mem, id, 0, 0);
  std::vector<TaskSpec> tasks = {task("d1", "excel", 0), task("d2", "excel", 1),
                                 task("d3", "excel", 2)};
  DependencyGraph g = DependencyGraph::build(tasks, {});
  StatusMap st;
  planner.generate_daily(mem, g, st, 0, 0);
  Milestone& month_end = planner.monthly(0).objectives[0].milestones[1];

  planner.propagate_update(g, st, {PlanEventKind::TaskBlocked, "d1", "cap", 10});
  // d1 demoted one rank: order is now d2, d1, d3.
  CHECK(planner.daily().tasks[0].task_id == "d2");
  CHECK(planner.daily().tasks[1].task_id == "d1");
  CHECK(planner.daily().tasks[1].rank == 2);
  CHECK(month_end.status == MilestoneStatus::Open);

  planner.propagate_update(g, st, {PlanEventKind::TaskBlocked, "d2", "cap", 11});
  CHECK(month_end.status == MilestoneStatus::Revised);
}

TEST_CASE("a milestone goes missed only when all its tasks are terminal") {
  Planner planner;
  SemanticStore mem;
  Identity id = make_default_identity({"excel"});
  planner.generate_monthly(mem, id, 0, 0);
  std::vector<TaskSpec> tasks = {task("e1", "excel", 0), task("e2", "excel", 1)};
  DependencyGraph g = DependencyGraph::build(tasks, {});
  StatusMap st;
  planner.generate_daily(mem, g, st, 0, 0);
  Milestone& month_end = planner.monthly(0).objectives[0].milestones[1];

  auto skip = [&](const std::string& tid) {
    st[tid].transition(TaskState::InProgress);
    st[tid].transition(TaskState::Failed);
    st[tid].transition(TaskState::Skipped);
    planner.propagate_update(g, st, {PlanEventKind::TaskSkipped, tid, "gave up", 10});
  };
  skip("e1");
  CHECK(month_end.status == MilestoneStatus::Open);  // e2 still live
  skip("e2");
  CHECK(month_end.status == MilestoneStatus::Missed);
}

TEST_CASE("new information lands in the daily context notes") {
  Planner planner;
  SemanticStore mem;
  Identity id = make_default_identity({"excel"});
  planner.generate_monthly(mem, id, 0, 0);
  std::vector<TaskSpec> tasks = {task("f1", "excel", 0)};
  DependencyGraph g = DependencyGraph::build(tasks, {});
  StatusMap st;
  planner.generate_daily(mem, g, st, 0, 0);

  planner.propagate_update(g, st, {PlanEventKind::NewInformation, std::nullopt, "vendor delayed", 9});
  REQUIRE(planner.daily().tasks.size() == 1);
  REQUIRE(planner.daily().context_notes.size() == 1);
  CHECK(planner.daily().context_notes[0] == "vendor delayed");
  // Notes survive a same-day refill.
  planner.generate_daily(mem, g, st, 0, 30);
  REQUIRE(planner.daily().context_notes.size() == 1);
}

TEST_CASE("inconsistency detection flags vanished and unplanned deliverables") {
  Planner planner;
  SemanticStore mem;
  Identity id = make_default_identity({"excel"});
  planner.generate_monthly(mem, id, 0, 0);
  std::vector<TaskSpec> tasks;
  for (int i = 0; i < 14; ++i) tasks.push_back(task("g" + std::to_string(10 + i), "excel", 0));
  DependencyGraph g = DependencyGraph::build(tasks, {});
  StatusMap st;
  planner.generate_daily(mem, g, st, 0, 0);  // g10..g21 planned, g22/g23 not

  Workspace ws = make_workspace(tasks);
  ws.app("excel").delete_artifact("g11-doc");                      // planned, vanished
  ws.write_direct("excel", "g23-doc", "surprise", "content");      // unplanned, has content

  auto events = planner.detect_inconsistency(g, st, ws, 77);
  REQUIRE(events.size() == 2);
  CHECK(events[0].kind == PlanEventKind::TaskBlocked);
  CHECK(events[0].task_id == "g11");
  CHECK(events[1].kind == PlanEventKind::NewInformation);
  CHECK(events[1].task_id == "g23");
}

TEST_CASE("plan generation on the shipped suite is idempotent per day") {
  Suite s = build_suite46();
  DependencyGraph g = s.graph();
  Planner planner;
  SemanticStore mem;
  Identity id = make_default_identity({"excel", "word", "ppt", "outlook"});
  StatusMap st;
  const DailyPlan& pd = cog_generate_plan(planner, mem, id, g, st, 1, kMinutesPerDay);
  REQUIRE(pd.tasks.size() == std::size_t(kMaxDailyTasks));
  CHECK(planner.has_monthly(0));
  // A repeat call does not throw PlanExists; it issues a fresh wave.
  const DailyPlan& pd2 = cog_generate_plan(planner, mem, id, g, st, 1, kMinutesPerDay + 5);
  CHECK(pd2.wave == 1);
}
