#pragma once

// Session limits: a run stops cleanly when either the simulated duration or
// the tool-call allowance is spent. Callers check before acting; charge never
// throws, it only counts.

#include "orchsim/common.hpp"

namespace orchsim {

struct SessionBudget {
  SimMinute max_sim_minutes = 360;  // 6 simulated hours
  long max_tool_calls = 25000;
  SimMinute session_start = 0;
  long tool_calls = 0;

  bool calls_left(long n = 1) const { return tool_calls + n <= max_tool_calls; }
  bool time_left(SimMinute now) const { return now - session_start < max_sim_minutes; }
  void charge(long n = 1) { tool_calls += n; }
  SimMinute minutes_used(SimMinute now) const { return now - session_start; }
};

}  // namespace orchsim
