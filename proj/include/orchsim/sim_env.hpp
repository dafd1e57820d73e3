#pragma once

// Simulated office environment: applications holding key/value documents,
// focus with one tick of UI readiness latency, and the action vocabulary
// every policy is charged in.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orchsim/common.hpp"

namespace orchsim {

// A document is an ordered key/value map; serialization and judging are both
// defined over this canonical form.
using Doc = std::map<std::string, std::string>;

enum class ActionOp { Open, Edit, Inspect, Reload, Rescan };

inline const char* action_op_name(ActionOp op) {
  switch (op) {
    case ActionOp::Open: return "open";
    case ActionOp::Edit: return "edit";
    case ActionOp::Inspect: return "inspect";
    case ActionOp::Reload: return "reload";
    case ActionOp::Rescan: return "rescan";
  }
  return "?";
}

enum class ActionOutcome { Ok, NoFocus, NotReady, UnknownApp, UnknownArtifact, Flaky };

inline const char* action_outcome_name(ActionOutcome o) {
  switch (o) {
    case ActionOutcome::Ok: return "ok";
    case ActionOutcome::NoFocus: return "no_focus";
    case ActionOutcome::NotReady: return "not_ready";
    case ActionOutcome::UnknownApp: return "unknown_app";
    case ActionOutcome::UnknownArtifact: return "unknown_artifact";
    case ActionOutcome::Flaky: return "flaky";
  }
  return "?";
}

inline bool action_failed(ActionOutcome o) { return o != ActionOutcome::Ok; }

struct ActionRecord {
  SimMinute timestamp = 0;
  std::string actor;
  std::optional<std::string> task_id;  // absent for agent-level overhead steps
  std::string app_id;
  std::string artifact_id;  // where the action actually landed
  ActionOp op = ActionOp::Open;
  std::string key;
  std::string value;
  ActionOutcome outcome = ActionOutcome::Ok;
};

class SimApplication {
 public:
  explicit SimApplication(std::string id) : id_(std::move(id)) {}

  const std::string& id() const { return id_; }

  void create_artifact(const std::string& artifact_id) { docs_[artifact_id]; }
  void delete_artifact(const std::string& artifact_id) { docs_.erase(artifact_id); }
  bool has_artifact(const std::string& artifact_id) const { return docs_.count(artifact_id) != 0; }

  const Doc& doc(const std::string& artifact_id) const {
    auto it = docs_.find(artifact_id);
    if (it == docs_.end()) fail(Errc::UnknownArtifact, id_ + "/" + artifact_id);
    return it->second;
  }

  std::vector<std::string> artifact_ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : docs_) out.push_back(id);
    return out;
  }

  // Open moves focus; the new focus is usable only after one tick.
  ActionOutcome open(const std::string& artifact_id) {
    if (!docs_.count(artifact_id)) return ActionOutcome::UnknownArtifact;
    focus_ = artifact_id;
    ready_ = false;
    return ActionOutcome::Ok;
  }

  ActionOutcome edit(const std::string& key, const std::string& value) {
    if (focus_.empty()) return ActionOutcome::NoFocus;
    if (!ready_) return ActionOutcome::NotReady;
    docs_[focus_][key] = value;
    return ActionOutcome::Ok;
  }

  ActionOutcome inspect() const {
    return focus_.empty() ? ActionOutcome::NoFocus : ActionOutcome::Ok;
  }

  void tick() {
    if (!focus_.empty()) ready_ = true;
  }

  const std::string& focus() const { return focus_; }
  bool ready() const { return ready_; }

 private:
  std::string id_;
  std::map<std::string, Doc> docs_;
  std::string focus_;
  bool ready_ = false;
};

class Workspace {
 public:
  SimApplication& app(const std::string& app_id) {
    auto it = apps_.find(app_id);
    if (it == apps_.end()) fail(Errc::UnknownApp, app_id);
    return it->second;
  }
  const SimApplication& app(const std::string& app_id) const {
    auto it = apps_.find(app_id);
    if (it == apps_.end()) fail(Errc::UnknownApp, app_id);
    return it->second;
  }

  bool has_app(const std::string& app_id) const { return apps_.count(app_id) != 0; }
  void add_app(const std::string& app_id) { apps_.emplace(app_id, SimApplication(app_id)); }

  std::vector<std::string> app_ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : apps_) out.push_back(id);
    return out;
  }

  // Applies one action and stamps its outcome; the caller ticks readiness
  // after the action has been recorded, so an edit issued on the same tick as
  // its open observes NotReady.
  ActionOutcome apply(ActionRecord& action) {
    auto it = apps_.find(action.app_id);
    if (action.op != ActionOp::Rescan && it == apps_.end()) {
      action.outcome = ActionOutcome::UnknownApp;
      return action.outcome;
    }
    switch (action.op) {
      case ActionOp::Open:
        action.outcome = it->second.open(action.artifact_id);
        break;
      case ActionOp::Edit:
        action.outcome = it->second.edit(action.key, action.value);
        if (action.outcome == ActionOutcome::Ok) action.artifact_id = it->second.focus();
        break;
      case ActionOp::Inspect:
        action.outcome = it->second.inspect();
        break;
      case ActionOp::Reload:
      case ActionOp::Rescan:
        action.outcome = ActionOutcome::Ok;
        break;
    }
    return action.outcome;
  }

  void tick() {
    for (auto& [_, app] : apps_) app.tick();
  }

  // Direct write used by the flat-context interference path: the conflated
  // agent believes it is editing its own deliverable while the write lands on
  // the artifact of whichever task state most recently claimed the key.
  ActionOutcome write_direct(const std::string& app_id, const std::string& artifact_id,
                             const std::string& key, const std::string& value) {
    auto it = apps_.find(app_id);
    if (it == apps_.end()) return ActionOutcome::UnknownApp;
    if (!it->second.has_artifact(artifact_id)) return ActionOutcome::UnknownArtifact;
    const_cast<Doc&>(it->second.doc(artifact_id))[key] = value;
    return ActionOutcome::Ok;
  }

 private:
  std::map<std::string, SimApplication> apps_;
};

}  // namespace orchsim
