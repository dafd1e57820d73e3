#pragma once

// Artifact-level judging: a task counts as done only if its deliverable is
// byte-identical to the golden artifact obtained by replaying the task's edit
// script over a pristine document.

#include <string>
#include <vector>

#include "orchsim/common.hpp"
#include "orchsim/sim_env.hpp"
#include "orchsim/tasks.hpp"

namespace orchsim {

inline Doc replay_script(const std::vector<EditStep>& script) {
  Doc doc;
  for (const auto& e : script) doc[e.key] = e.value;
  return doc;
}

inline Doc golden_artifact(const TaskSpec& task) { return replay_script(task.edit_script); }

// Exact comparison on the canonical form: same key set, byte-equal values.
inline bool judge_artifact(const Doc& artifact, const Doc& golden) { return artifact == golden; }

// Completion percentage in integer tenths, round half up (e.g. 87 = 8.7%).
// Throws ZeroTotal on an empty denominator.
inline long completion_rate(long completed, long total) {
  if (total == 0) fail(Errc::ZeroTotal, "completion rate over zero tasks");
  return percent_1dp(completed, total);
}

}  // namespace orchsim
