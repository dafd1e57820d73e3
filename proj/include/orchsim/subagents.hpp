#pragma once

// Sub-agents-as-tools with hard context isolation, plus cognitive tools that
// run inside the caller's window. A sub-agent's internal trace never reaches
// the host context: the host receives only the structured payload and is
// charged for the internal steps.

#include <deque>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "orchsim/budget.hpp"
#include "orchsim/context.hpp"
#include "orchsim/memory.hpp"
#include "orchsim/planning.hpp"
#include "orchsim/sim_env.hpp"
#include "orchsim/tasks.hpp"

namespace orchsim {

constexpr int kMaxSubAgentDepth = 2;

enum class ToolKind { Cognitive, SubAgent };

struct ToolDescriptor {
  std::string name;
  ToolKind kind = ToolKind::Cognitive;
  std::string app_scope;  // empty = any application
  std::vector<std::string> input_fields;
  std::vector<std::string> output_fields;
};

// Closed schemas: sub-agent outputs may not smuggle free-form traces.
inline void validate_descriptor(const ToolDescriptor& d) {
  if (d.kind != ToolKind::SubAgent) return;
  for (const auto& f : d.output_fields)
    if (f == "trace" || f == "log" || f == "reasoning")
      fail(Errc::SchemaViolation, "sub-agent output schema leaks trace field '" + f + "'");
}

using Payload = std::map<std::string, std::string>;

inline void validate_payload(const ToolDescriptor& d, const Payload& payload) {
  for (const auto& f : d.output_fields)
    if (!payload.count(f))
      fail(Errc::SchemaViolation, d.name + " output missing field '" + f + "'");
}

// Canonical text form of a payload; this is exactly what enters the host
// window, so its token count is the host's whole exposure.
inline std::string render_payload(const Payload& payload) {
  std::string out;
  for (const auto& [k, v] : payload) {
    if (!out.empty()) out += "\n";
    out += k + ": " + v;
  }
  return out;
}

struct SubAgentRun {
  bool ok = true;
  Payload payload;        // schema-conformant on ok, {error: ...} otherwise
  long internal_steps = 0;   // charged to the session budget
  long internal_tokens = 0;  // trace volume, withheld from the host
};

struct SubAgentResult {
  std::string tool;
  bool ok = true;
  Payload payload;
  long payload_tokens = 0;
  long internal_steps = 0;
};

using SubAgentFn = std::function<SubAgentRun(const Payload& inputs, int depth)>;

// Runs the body in isolation: the host window receives one ToolCall entry of
// exactly the payload's rendered text; budget is charged 1 for the invoke
// plus every internal step. Depth counts nested sub-agent invocations.
inline SubAgentResult invoke_subagent(ContextWindow& host, SessionBudget& budget,
                                      const ToolDescriptor& descriptor, const SubAgentFn& body,
                                      const Payload& inputs, int cycle, int depth = 0) {
  if (descriptor.kind != ToolKind::SubAgent)
    fail(Errc::SchemaViolation, descriptor.name + " is not a sub-agent tool");
  validate_descriptor(descriptor);
  budget.charge(1);

  SubAgentRun run;
  if (depth >= kMaxSubAgentDepth) {
    run.ok = false;
    run.payload = {{"error", "depth_exceeded"}, {"tool", descriptor.name}};
  } else {
    run = body(inputs, depth + 1);
    if (run.ok) validate_payload(descriptor, run.payload);
  }
  budget.charge(run.internal_steps);

  SubAgentResult result;
  result.tool = descriptor.name;
  result.ok = run.ok;
  result.payload = std::move(run.payload);
  result.internal_steps = run.internal_steps;
  std::string text = render_payload(result.payload);
  result.payload_tokens = token_count(text);
  host.push(make_entry(EntryOrigin::ToolCall, std::move(text), cycle));
  return result;
}

// ---------------------------------------------------------------------------
// Research sub-agent: iterative retrieval over a local knowledge base.

struct KnowledgeDoc {
  std::string doc_id;
  std::string text;
  Embedding embedding{};
};

struct KnowledgeBase {
  std::vector<KnowledgeDoc> docs;
};

// Fixture format: blocks separated by `---` lines; first line of each block
// is the document id, the rest is its text.
inline KnowledgeBase parse_knowledge(const std::string& text) {
  KnowledgeBase kb;
  KnowledgeDoc doc;
  bool have_id = false;
  auto flush = [&] {
    if (have_id) {
      doc.embedding = embed(doc.text);
      kb.docs.push_back(std::move(doc));
      doc = {};
      have_id = false;
    }
  };
  for (std::string_view line : split(text, '\n')) {
    if (line == "---") {
      flush();
      continue;
    }
    if (!have_id) {
      if (line.empty()) continue;
      doc.doc_id = std::string(line);
      have_id = true;
    } else {
      if (!doc.text.empty()) doc.text += "\n";
      doc.text += std::string(line);
    }
  }
  flush();
  return kb;
}

struct Finding {
  std::string doc_id;
  std::string snippet;
};

struct ResearchReport {
  std::vector<Finding> findings;
  std::vector<std::string> sources;
  int iterations = 0;
};

// One retrieval round per depth step. Each round takes the best-matching
// unseen document and widens the query with that document's leading terms,
// which is what lets a deep search follow a two-hop reference chain.
inline ResearchReport research(const std::string& query, int depth, const KnowledgeBase& kb) {
  if (depth < 1 || depth > 3) fail(Errc::BadConfig, "research depth must be 1..3");
  ResearchReport report;
  std::string expanded = query;
  std::vector<bool> used(kb.docs.size(), false);
  for (int round = 0; round < depth; ++round) {
    Embedding q = embed(expanded);
    int best = -1;
    double best_score = 0.0;
    for (std::size_t i = 0; i < kb.docs.size(); ++i) {
      if (used[i]) continue;
      double score = cosine(q, kb.docs[i].embedding);
      if (score > best_score) {
        best_score = score;
        best = int(i);
      }
    }
    if (best < 0) break;  // nothing relevant left: stop early, not an error
    used[best] = true;
    const KnowledgeDoc& doc = kb.docs[best];
    auto toks = tokenize(doc.text);
    std::string snippet, lead;
    for (std::size_t i = 0; i < toks.size() && i < 12; ++i) {
      if (i) snippet += " ";
      snippet += toks[i];
    }
    for (std::size_t i = 0; i < toks.size() && i < 8; ++i) lead += " " + toks[i];
    report.findings.push_back({doc.doc_id, snippet});
    report.sources.push_back(doc.doc_id);
    report.iterations = round + 1;
    expanded += lead;
  }
  return report;
}

inline SubAgentFn research_body(const KnowledgeBase& kb) {
  return [&kb](const Payload& inputs, int) {
    SubAgentRun run;
    int depth = 1;
    if (auto it = inputs.find("depth"); it != inputs.end()) depth = std::stoi(it->second);
    auto it = inputs.find("query");
    std::string query = it == inputs.end() ? std::string() : it->second;
    ResearchReport rep = research(query, depth, kb);
    std::string findings, sources;
    for (const auto& f : rep.findings) {
      if (!findings.empty()) findings += "; ";
      findings += f.doc_id + ": " + f.snippet;
    }
    for (const auto& s : rep.sources) {
      if (!sources.empty()) sources += ",";
      sources += s;
    }
    run.payload = {{"findings", findings}, {"sources", sources}};
    // Internal work: one step per retrieval round plus query embedding.
    run.internal_steps = rep.iterations + 1;
    run.internal_tokens = token_count(query) * (rep.iterations + 1) + token_count(findings) * 4;
    return run;
  };
}

inline ToolDescriptor research_descriptor() {
  ToolDescriptor d;
  d.name = "research";
  d.kind = ToolKind::SubAgent;
  d.input_fields = {"query", "depth"};
  d.output_fields = {"findings", "sources"};
  return d;
}

// ---------------------------------------------------------------------------
// Simulated computer-using agent. The backend is swappable so alternative
// CUA behaviors (e.g. flaky UI automation) plug in under the same host code.

class CuaBackend {
 public:
  virtual ~CuaBackend() = default;
  virtual ActionOutcome perform(Workspace& ws, ActionRecord& action) = 0;
};

class DirectCua : public CuaBackend {
 public:
  ActionOutcome perform(Workspace& ws, ActionRecord& action) override {
    ActionOutcome out = ws.apply(action);
    ws.tick();  // one settle tick after every UI action
    return out;
  }
};

class FlakyCua : public CuaBackend {
 public:
  explicit FlakyCua(int period = 3) : period_(period) {}

  ActionOutcome perform(Workspace& ws, ActionRecord& action) override {
    if (++calls_ % period_ == 0) {
      action.outcome = ActionOutcome::Flaky;
      return action.outcome;
    }
    ActionOutcome out = ws.apply(action);
    ws.tick();
    return out;
  }

 private:
  int period_;
  int calls_ = 0;
};

// One CUA iteration: focus the deliverable if it is not focused, otherwise
// apply the edit at step_index. A step_index at or past the script end asks
// for a completion check instead of an action.
inline ActionRecord cua_execute(CuaBackend& backend, Workspace& ws, const TaskSpec& task,
                                std::size_t step_index, const std::string& actor,
                                SimMinute now) {
  ActionRecord action;
  action.timestamp = now;
  action.actor = actor;
  action.task_id = task.task_id;
  action.app_id = task.app_id;
  const SimApplication* app = ws.has_app(task.app_id) ? &ws.app(task.app_id) : nullptr;
  if (!app || app->focus() != task.deliverable_id) {
    action.op = ActionOp::Open;
    action.artifact_id = task.deliverable_id;
  } else if (step_index < task.edit_script.size()) {
    action.op = ActionOp::Edit;
    action.key = task.edit_script[step_index].key;
    action.value = task.edit_script[step_index].value;
  } else {
    action.op = ActionOp::Inspect;
    action.key = "verify";
    backend.perform(ws, action);
    return action;
  }
  backend.perform(ws, action);
  return action;
}

inline ToolDescriptor cua_descriptor(const std::string& app_id) {
  ToolDescriptor d;
  d.name = "cua." + app_id;
  d.kind = ToolKind::SubAgent;
  d.app_scope = app_id;
  d.input_fields = {"task", "step"};
  d.output_fields = {"outcome", "artifact"};
  return d;
}

// ---------------------------------------------------------------------------
// Cognitive tools: structured outputs in the caller's own window.

struct TrackReport {
  std::vector<std::string> completed;
  std::vector<std::string> remaining;
};

inline TrackReport cog_track_tasks(const DependencyGraph& graph, const StatusMap& statuses) {
  TrackReport r;
  for (const auto& id : graph.ids()) {
    auto it = statuses.find(id);
    TaskState s = it == statuses.end() ? TaskState::Pending : it->second.state;
    (s == TaskState::Completed ? r.completed : r.remaining).push_back(id);
  }
  return r;
}

struct ReflectReport {
  std::vector<std::string> outcomes;  // one line per completed task
  std::vector<std::string> lessons;   // skip/failure reasons, always nonempty
};

inline ReflectReport cog_reflect(const DependencyGraph& graph, const StatusMap& statuses) {
  ReflectReport r;
  long skipped = 0;
  for (const auto& id : graph.ids()) {
    auto it = statuses.find(id);
    if (it == statuses.end()) continue;
    if (it->second.state == TaskState::Completed) {
      r.outcomes.push_back(id + " completed after " + std::to_string(it->second.attempt_count) +
                           " attempts");
    } else if (it->second.state == TaskState::Skipped) {
      ++skipped;
      r.lessons.push_back(id + " skipped after " + std::to_string(it->second.attempt_count) +
                          " failed attempts");
    }
  }
  if (r.lessons.empty())
    r.lessons.push_back(skipped == 0 ? "no skips today" : "review skipped tasks");
  return r;
}

// generate_plan is idempotent per day: the first call builds plans, repeat
// calls fall through to update semantics (a fresh daily wave).
inline const DailyPlan& cog_generate_plan(Planner& planner, SemanticStore& memory,
                                          const Identity& identity, const DependencyGraph& graph,
                                          const StatusMap& statuses, int day, SimMinute now) {
  int month = day / kDaysPerMonth;
  if (!planner.has_monthly(month)) planner.generate_monthly(memory, identity, month, now);
  return planner.generate_daily(memory, graph, statuses, day, now);
}

inline void cog_update_plan(Planner& planner, const DependencyGraph& graph,
                            const StatusMap& statuses, const PlanUpdateEvent& event) {
  planner.propagate_update(graph, statuses, event);
}

inline std::vector<ToolDescriptor> cognitive_descriptors() {
  auto mk = [](std::string name, std::vector<std::string> in, std::vector<std::string> out) {
    ToolDescriptor d;
    d.name = std::move(name);
    d.kind = ToolKind::Cognitive;
    d.input_fields = std::move(in);
    d.output_fields = std::move(out);
    return d;
  };
  return {mk("generate_plan", {"day"}, {"plan"}),
          mk("update_plan", {"event"}, {"plan"}),
          mk("track_tasks", {}, {"completed", "remaining"}),
          mk("reflect", {}, {"outcomes", "lessons"})};
}

// Tool filtering: a tool is available when the identity lists it and its app
// scope matches the current application (empty scope matches anything).
inline std::vector<ToolDescriptor> filter_tools(const Identity& identity,
                                                const std::vector<ToolDescriptor>& all,
                                                const std::string& current_app) {
  std::vector<ToolDescriptor> out;
  for (const auto& d : all) {
    if (!identity.has_tool(d.name)) continue;
    if (!d.app_scope.empty() && d.app_scope != current_app) continue;
    out.push_back(d);
  }
  return out;
}

}  // namespace orchsim
