#pragma once

// Deterministic 46-task benchmark suite with the shipped app distribution:
// excel 11, word 9, ppt 7, multi 19 (multi = has a cross-application
// prerequisite). Tasks fall into three effort classes under the default cost
// model: robust (<= 21 steps, completes even from a cold context), medium
// (22..26 steps, needs a warm context), and long (27..29 steps, completes only
// when a matching demonstration removes the exploratory probes).
//
// Nine task families share one deliverable per family; each member's edit
// script extends the previous member's byte-for-byte (nested prefixes), so a
// distilled demonstration from an earlier member replays cleanly into a later
// one. Family descriptions share a stem so their digests clear the demo
// similarity threshold; unrelated tasks stay far below it.
//
// Two pairs of unrelated tasks deliberately claim one key name each on
// different documents ("team_contact", "handoff_note"): co-resident flat
// context states make those edits land on the wrong document.

#include <string>
#include <vector>

#include "orchsim/suite_io.hpp"
#include "orchsim/tasks.hpp"

namespace orchsim {

namespace detail {

struct SuiteBuilder {
  Suite suite;

  // Singles and family members write family- or task-scoped keys so only the
  // designed sharer pairs ever collide.
  static std::vector<EditStep> script(const std::string& scope, int count) {
    std::vector<EditStep> s;
    for (int i = 0; i < count; ++i)
      s.push_back({scope + "-k" + std::to_string(i), scope + "-v" + std::to_string(i)});
    return s;
  }

  TaskSpec& add(const std::string& id, const std::string& app, int steps, int priority,
                const std::string& desc, const std::string& scope, const std::string& deliverable) {
    TaskSpec t;
    t.task_id = id;
    t.app_id = app;
    t.description = desc;
    t.priority = priority;
    t.state_footprint = 160;
    t.step_count = steps;
    t.deliverable_id = deliverable;
    t.edit_script = script(scope, steps);
    suite.tasks.push_back(std::move(t));
    return suite.tasks.back();
  }

  TaskSpec& single(const std::string& id, const std::string& app, int steps,
                   const std::string& desc) {
    return add(id, app, steps, 1, desc, id, id + "-doc");
  }

  // Family member whose script is the shared scope's first `steps` edits; all
  // members target one deliverable, so a completed head leaves the document in
  // exactly the state the next member's script starts from.
  TaskSpec& member(const std::string& id, const std::string& fam, const std::string& app,
                   int steps, int priority, const std::string& stem, const std::string& ordinal) {
    return add(id, app, steps, priority, stem + " part " + ordinal, fam, fam + "-doc");
  }

  void dep(const std::string& task, const std::string& prereq) {
    suite.deps.push_back({task, prereq});
  }
};

}  // namespace detail

// Builds the shipped 46-task suite. Backlog position is encoded in the id
// (lexicographic order == intended scan order): robust tasks first, then
// medium, then the long tail, so a step-starved day spends its budget on
// completable work before reaching tasks that need retries.
inline Suite build_suite46() {
  detail::SuiteBuilder b;

  // -- robust singles (anchors for cross-app work come first) --
  b.single("t01-townhall", "ppt", 12, "venue slides touch up for the town hall");
  b.single("t02-minutes", "word", 13, "meeting minutes cleanup for the steering sync");
  b.single("t03-expense", "excel", 14, "expense sheet refresh for travel claims");
  b.single("t04-brand", "ppt", 15, "icon swap pass for the brand deck");
  b.single("t05-headcount", "excel", 16, "headcount tracker update for the org review");
  b.single("t06-onboarding", "word", 17, "style fixes for the onboarding guide");
  b.single("t07-forecast", "excel", 18, "forecast tab rebuild for the sales model");
  b.single("t08-metrics", "ppt", 19, "chart polish for the metrics review deck");

  // -- robust cross-app singles --
  b.single("t09-billing", "excel", 14, "billing export reconcile against the crm notes");
  b.single("t10-relnotes", "word", 16, "release notes assembly from the build log");
  b.single("t11-roadmap", "ppt", 18, "roadmap visuals sync with the planning sheet");
  b.single("t12-digest", "outlook", 20, "digest mail compose from the status tracker");
  b.dep("t09-billing", "t06-onboarding");
  b.dep("t10-relnotes", "t07-forecast");
  b.dep("t11-roadmap", "t02-minutes");
  b.dep("t12-digest", "t03-expense");

  // -- family heads (robust, then medium) --
  b.member("t13-storyboard-a", "famp2", "ppt", 16, 1, "demo storyboard for the launch keynote", "one");
  b.member("t14-triage-a", "famo1", "outlook", 15, 1, "inbox triage for the support queue", "one");
  b.member("t15-invoice-a", "fame2", "excel", 18, 1, "quarterly vendor invoice reconciliation", "one");
  b.member("t16-handbook-a", "famw1", "word", 20, 1, "policy handbook revision", "one");
  b.member("t17-boarddeck-a", "famp1", "ppt", 19, 1, "board review deck refresh", "one");
  b.member("t18-pressbrief-a", "famw2", "word", 21, 1, "press briefing draft for the media kit", "one");
  b.member("t19-contract-a", "famw3", "word", 22, 1, "contract clause rewrite", "one");
  b.member("t20-inventory-a", "fame3", "excel", 23, 1, "inventory ledger audit", "one");
  b.member("t21-ledger-a", "fame1", "excel", 24, 1, "monthly ledger close for the finance workbook", "one");
  b.dep("t13-storyboard-a", "t05-headcount");
  b.dep("t14-triage-a", "t01-townhall");
  b.dep("t18-pressbrief-a", "t03-expense");
  b.dep("t20-inventory-a", "t02-minutes");

  // -- medium cross-app singles --
  b.single("t22-capacity", "excel", 22, "capacity sheet merge with the shift roster");
  b.single("t23-vendorbrief", "word", 23, "vendor brief drafting from the quote sheet");
  b.single("t24-training", "ppt", 25, "training deck stitch from the manual pages");
  b.dep("t22-capacity", "t08-metrics");
  b.dep("t23-vendorbrief", "t05-headcount");
  b.dep("t24-training", "t06-onboarding");

  // -- medium singles --
  b.single("t25-variance", "excel", 23, "budget variance sweep for the cost center");
  b.single("t26-pivot", "excel", 25, "pivot cleanup for the revenue summary");
  b.single("t27-newsletter", "word", 22, "newsletter layout pass for the field update");
  b.single("t28-faq", "word", 24, "faq rewrite for the help portal");
  b.single("t29-timeline", "ppt", 26, "timeline slides rework for the program review");

  // -- long tail: family extensions (nested-prefix scripts) --
  b.member("t30-ledger-b", "fame1", "excel", 27, 2, "monthly ledger close for the finance workbook", "two");
  b.member("t31-ledger-c", "fame1", "excel", 28, 2, "monthly ledger close for the finance workbook", "three");
  b.member("t32-invoice-b", "fame2", "excel", 27, 2, "quarterly vendor invoice reconciliation", "two");
  b.member("t33-invoice-c", "fame2", "excel", 29, 2, "quarterly vendor invoice reconciliation", "three");
  b.member("t34-handbook-b", "famw1", "word", 28, 2, "policy handbook revision", "two");
  b.member("t35-handbook-c", "famw1", "word", 29, 2, "policy handbook revision", "three");
  b.member("t36-contract-b", "famw3", "word", 27, 2, "contract clause rewrite", "two");
  b.member("t37-boarddeck-b", "famp1", "ppt", 27, 2, "board review deck refresh", "two");
  b.member("t38-boarddeck-c", "famp1", "ppt", 28, 2, "board review deck refresh", "three");
  b.member("t39-pressbrief-b", "famw2", "word", 28, 2, "press briefing draft for the media kit", "two");
  b.member("t40-pressbrief-c", "famw2", "word", 29, 2, "press briefing draft for the media kit", "three");
  b.member("t41-inventory-b", "fame3", "excel", 27, 2, "inventory ledger audit", "two");
  b.member("t42-inventory-c", "fame3", "excel", 28, 2, "inventory ledger audit", "three");
  b.member("t43-storyboard-b", "famp2", "ppt", 29, 2, "demo storyboard for the launch keynote", "two");
  b.member("t44-triage-b", "famo1", "outlook", 27, 2, "inbox triage for the support queue", "two");
  b.member("t45-triage-c", "famo1", "outlook", 28, 2, "inbox triage for the support queue", "three");
  b.dep("t30-ledger-b", "t21-ledger-a");
  b.dep("t31-ledger-c", "t30-ledger-b");
  b.dep("t32-invoice-b", "t15-invoice-a");
  b.dep("t33-invoice-c", "t32-invoice-b");
  b.dep("t34-handbook-b", "t16-handbook-a");
  b.dep("t35-handbook-c", "t34-handbook-b");
  b.dep("t36-contract-b", "t19-contract-a");
  b.dep("t37-boarddeck-b", "t17-boarddeck-a");
  b.dep("t38-boarddeck-c", "t37-boarddeck-b");
  b.dep("t39-pressbrief-b", "t18-pressbrief-a");
  b.dep("t40-pressbrief-c", "t39-pressbrief-b");
  b.dep("t41-inventory-b", "t20-inventory-a");
  b.dep("t42-inventory-c", "t41-inventory-b");
  b.dep("t43-storyboard-b", "t13-storyboard-a");
  b.dep("t44-triage-b", "t14-triage-a");
  b.dep("t45-triage-c", "t44-triage-b");
  // cross-app anchors keep the extensions in the multi partition
  b.dep("t39-pressbrief-b", "t03-expense");
  b.dep("t40-pressbrief-c", "t03-expense");
  b.dep("t41-inventory-b", "t02-minutes");
  b.dep("t42-inventory-c", "t02-minutes");
  b.dep("t43-storyboard-b", "t05-headcount");
  b.dep("t44-triage-b", "t01-townhall");
  b.dep("t45-triage-c", "t01-townhall");

  // -- standalone long: no family, so no demonstration ever clears the
  //    similarity threshold for it --
  b.single("t46-archive", "word", 28, "archive migration audit for legacy correspondence");
  b.dep("t46-archive", "t04-brand");

  // -- deliberate key sharing on different documents --
  Suite& s = b.suite;
  for (auto& t : s.tasks) {
    if (t.task_id == "t27-newsletter") t.edit_script[10] = {"team_contact", "field desk"};
    if (t.task_id == "t29-timeline") t.edit_script[12] = {"team_contact", "program desk"};
    if (t.task_id == "t09-billing") t.edit_script[6] = {"handoff_note", "billing ready"};
    if (t.task_id == "t11-roadmap") t.edit_script[8] = {"handoff_note", "visuals ready"};
  }
  return s;
}

// Ten byte-identical copies of one task (distinct ids and deliverables):
// the learning policy should distill once, replay nine times, and spend
// strictly fewer steps than a policy that re-explores every copy.
inline Suite build_repeat_suite(int copies = 10, int steps = 18) {
  detail::SuiteBuilder b;
  for (int i = 0; i < copies; ++i) {
    std::string id = "rep" + std::to_string(i / 10) + std::to_string(i % 10);
    TaskSpec& t = b.add(id, "excel", steps, 1, "weekly mileage log normalization", "rep", id + "-doc");
    (void)t;
  }
  return b.suite;
}

}  // namespace orchsim
