#pragma once

// Bounded context window with two-stage adaptive summarization. Critical
// entries are preserved byte-for-byte; Routine entries are compressed into a
// deterministic summary when the token budget overflows. Stage 1 keeps
// decisions, blockers, and application state; stage 2 drops the state lines;
// if even an empty summary cannot bring the window under budget the window
// raises OverCompression.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "orchsim/common.hpp"
#include "orchsim/tokens.hpp"

namespace orchsim {

constexpr long kDefaultContextBudget = 4096;

enum class EntryOrigin { ToolCall, StateChange, PlanUpdate, ErrorSignal, Observation, Reasoning };

inline const char* entry_origin_name(EntryOrigin o) {
  switch (o) {
    case EntryOrigin::ToolCall: return "tool_call";
    case EntryOrigin::StateChange: return "state_change";
    case EntryOrigin::PlanUpdate: return "plan_update";
    case EntryOrigin::ErrorSignal: return "error_signal";
    case EntryOrigin::Observation: return "observation";
    case EntryOrigin::Reasoning: return "reasoning";
  }
  return "?";
}

enum class EntryKind { Critical, Routine };

inline EntryKind classify_entry(EntryOrigin origin) {
  switch (origin) {
    case EntryOrigin::ToolCall:
    case EntryOrigin::StateChange:
    case EntryOrigin::PlanUpdate:
    case EntryOrigin::ErrorSignal:
      return EntryKind::Critical;
    case EntryOrigin::Observation:
    case EntryOrigin::Reasoning:
      return EntryKind::Routine;
  }
  return EntryKind::Routine;
}

struct ContextEntry {
  EntryOrigin origin = EntryOrigin::Observation;
  EntryKind kind = EntryKind::Routine;
  std::string content;
  long tokens = 0;
  int cycle = 0;
  std::string task_tag;  // empty when not task-scoped
  std::string app_tag;   // set on application state snapshots
};

inline ContextEntry make_entry(EntryOrigin origin, std::string content, int cycle,
                               std::string task_tag = {}, std::string app_tag = {}) {
  ContextEntry e;
  e.origin = origin;
  e.kind = classify_entry(origin);
  e.content = std::move(content);
  e.tokens = token_count(e.content);
  e.cycle = cycle;
  e.task_tag = std::move(task_tag);
  e.app_tag = std::move(app_tag);
  return e;
}

struct SummaryRecord {
  std::vector<std::string> decisions;        // per-task progress lines
  std::vector<std::string> blockers;         // per-task error lines
  std::map<std::string, std::string> app_state;  // app id -> last snapshot digest
  int first_cycle = 0;
  int last_cycle = 0;
  long tokens = 0;

  std::string render(bool with_app_state) const {
    std::string out = "summary cycles " + std::to_string(first_cycle) + "-" +
                      std::to_string(last_cycle);
    for (const auto& d : decisions) out += "\n" + d;
    for (const auto& b : blockers) out += "\n" + b;
    if (with_app_state)
      for (const auto& [app, digest] : app_state) out += "\napp " + app + " " + digest;
    return out;
  }
};

struct StabilizeReport {
  bool summarized = false;
  int stage = 0;             // deepest stage applied by this stabilize
  long evicted_tokens = 0;   // routine tokens replaced by the summary
};

class ContextWindow {
 public:
  explicit ContextWindow(long budget = kDefaultContextBudget) : budget_(budget) {}

  long budget() const { return budget_; }
  long total_tokens() const {
    long t = 0;
    for (const auto& e : entries_) t += e.tokens;
    return t;
  }
  const std::vector<ContextEntry>& entries() const { return entries_; }
  int last_stage() const { return last_stage_; }
  const std::optional<SummaryRecord>& last_summary() const { return last_summary_; }

  StabilizeReport push(ContextEntry entry) {
    if (entry.tokens == 0) entry.tokens = token_count(entry.content);
    entries_.push_back(std::move(entry));
    return stabilize();
  }

  // Brings the window under budget or raises OverCompression. Critical
  // entries are never touched.
  StabilizeReport stabilize() {
    StabilizeReport report;
    if (total_tokens() <= budget_) {
      last_stage_ = 0;
      return report;
    }

    SummaryRecord record = summarize_routine();
    long routine_tokens = 0;
    for (const auto& e : entries_)
      if (e.kind == EntryKind::Routine) routine_tokens += e.tokens;

    // Stage 1: all Routine entries collapse into one summary entry. The
    // summary must be strictly smaller than what it replaces; if the template
    // cannot guarantee that (a single tiny routine entry), it degrades to the
    // empty render.
    for (int stage = 1; stage <= 3; ++stage) {
      std::string text = stage == 1 ? record.render(true)
                       : stage == 2 ? record.render(false)
                                    : std::string();
      long text_tokens = token_count(text);
      if (text_tokens >= routine_tokens) {
        text.clear();
        text_tokens = 0;
      }
      long critical = 0;
      for (const auto& e : entries_)
        if (e.kind == EntryKind::Critical) critical += e.tokens;
      if (critical + text_tokens <= budget_) {
        record.tokens = text_tokens;
        replace_routine(std::move(text), text_tokens, record);
        report.summarized = true;
        report.stage = std::min(stage, 2);
        report.evicted_tokens = routine_tokens;
        last_stage_ = report.stage;
        return report;
      }
    }
    fail(Errc::OverCompression,
         "critical entries alone exceed budget (" + std::to_string(total_tokens()) + " > " +
             std::to_string(budget_) + ")");
  }

  // Multiset of critical contents, for byte-preservation checks.
  std::vector<std::string> critical_contents() const {
    std::vector<std::string> out;
    for (const auto& e : entries_)
      if (e.kind == EntryKind::Critical) out.push_back(e.content);
    return out;
  }

  // Debug dump: one kind|tokens|cycle header per entry, escaped content below.
  std::string dump() const {
    std::string out;
    for (const auto& e : entries_) {
      out += std::string(e.kind == EntryKind::Critical ? "critical" : "routine") + "|" +
             std::to_string(e.tokens) + "|" + std::to_string(e.cycle) + "\n";
      out += escape_field(e.content) + "\n\n";
    }
    return out;
  }

  void clear() {
    entries_.clear();
    last_stage_ = 0;
    last_summary_.reset();
  }

 private:
  SummaryRecord summarize_routine() const {
    SummaryRecord r;
    std::map<std::string, int> last_cycle_by_task;
    std::set<std::string> blocked;
    bool first = true;
    for (const auto& e : entries_) {
      if (e.kind != EntryKind::Routine) continue;
      if (first) {
        r.first_cycle = r.last_cycle = e.cycle;
        first = false;
      }
      r.first_cycle = std::min(r.first_cycle, e.cycle);
      r.last_cycle = std::max(r.last_cycle, e.cycle);
      if (e.content.rfind("summary cycles ", 0) == 0) {
        // An earlier summary being re-summarized: carry its lines forward.
        for (std::string_view line : split(e.content, '\n')) {
          auto parts = split(line, ' ');
          if (parts.size() >= 3 && parts[0] == "done") {
            int c = std::atoi(std::string(parts[2].substr(1)).c_str());
            auto [it, inserted] = last_cycle_by_task.emplace(std::string(parts[1]), c);
            if (!inserted) it->second = std::max(it->second, c);
          } else if (parts.size() >= 2 && parts[0] == "block") {
            blocked.insert(std::string(parts[1]));
          }
        }
        continue;
      }
      if (!e.task_tag.empty()) {
        auto [it, inserted] = last_cycle_by_task.emplace(e.task_tag, e.cycle);
        if (!inserted) it->second = std::max(it->second, e.cycle);
        if (e.content.rfind("error", 0) == 0) blocked.insert(e.task_tag);
      }
      if (!e.app_tag.empty()) r.app_state[e.app_tag] = digest8(e.content);
    }
    for (const auto& [task, cycle] : last_cycle_by_task)
      r.decisions.push_back("done " + task + " c" + std::to_string(cycle));
    for (const auto& task : blocked) r.blockers.push_back("block " + task);
    return r;
  }

  static std::string digest8(const std::string& content) {
    auto toks = tokenize(content);
    std::string out;
    for (std::size_t i = 0; i < toks.size() && i < 8; ++i) {
      if (i) out += " ";
      out += toks[i];
    }
    return out;
  }

  void replace_routine(std::string text, long tokens, const SummaryRecord& record) {
    std::vector<ContextEntry> kept;
    kept.reserve(entries_.size());
    int cycle = 0;
    for (auto& e : entries_) {
      if (e.kind == EntryKind::Critical) {
        kept.push_back(std::move(e));
      } else {
        cycle = std::max(cycle, e.cycle);
      }
    }
    if (!text.empty()) {
      ContextEntry summary;
      summary.origin = EntryOrigin::Observation;
      summary.kind = EntryKind::Routine;
      summary.content = std::move(text);
      summary.tokens = tokens;
      summary.cycle = cycle;
      kept.push_back(std::move(summary));
    }
    entries_ = std::move(kept);
    last_summary_ = record;
  }

  long budget_;
  std::vector<ContextEntry> entries_;
  int last_stage_ = 0;
  std::optional<SummaryRecord> last_summary_;
};

}  // namespace orchsim
