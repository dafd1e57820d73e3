#pragma once

// Experiential learning: successful trajectories are distilled into minimal
// canonical demonstrations, indexed per application, retrieved by digest
// similarity, and replayed to skip exploratory probing. Retrieval never
// crosses application boundaries and injection never touches the planner.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orchsim/judge.hpp"
#include "orchsim/memory.hpp"
#include "orchsim/sim_env.hpp"
#include "orchsim/suite_io.hpp"
#include "orchsim/tasks.hpp"

namespace orchsim {

constexpr int kDemoRetrieveK = 3;
constexpr double kDemoThreshold = 0.8;

struct Trajectory {
  std::string task_id;
  std::string app_id;
  std::string initial_digest;  // app-state digest when the task started
  std::vector<ActionRecord> actions;
  bool success = false;
};

struct DemoAction {
  ActionOp op = ActionOp::Edit;
  std::string artifact_id;  // open target (re-targeted at replay)
  std::string key;
  std::string value;

  bool operator==(const DemoAction&) const = default;
};

struct CanonicalDemo {
  std::string demo_id;
  std::string task_id;
  std::string app_id;
  std::string digest;  // task description + initial state
  std::vector<DemoAction> actions;
  Embedding embedding{};

  std::vector<EditStep> edit_steps() const {
    std::vector<EditStep> out;
    for (const auto& a : actions)
      if (a.op == ActionOp::Edit) out.push_back({a.key, a.value});
    return out;
  }
};

// Minimal canonical form: error-outcome actions vanish, consecutive opens of
// the same artifact collapse, and read-only probing (inspect/reload/rescan)
// is dropped — a demo carries only the focus change plus the edits.
inline CanonicalDemo distill(const Trajectory& trajectory, const std::string& description) {
  if (!trajectory.success)
    fail(Errc::NotSuccessful, "cannot distill failed trajectory for " + trajectory.task_id);
  CanonicalDemo demo;
  demo.task_id = trajectory.task_id;
  demo.app_id = trajectory.app_id;
  demo.digest = description + " | " + trajectory.initial_digest;
  demo.embedding = embed(demo.digest);
  for (const auto& a : trajectory.actions) {
    if (a.outcome != ActionOutcome::Ok) continue;
    if (a.op == ActionOp::Open) {
      if (!demo.actions.empty() && demo.actions.back().op == ActionOp::Open &&
          demo.actions.back().artifact_id == a.artifact_id)
        continue;  // redundant re-open
      demo.actions.push_back({ActionOp::Open, a.artifact_id, {}, {}});
    } else if (a.op == ActionOp::Edit) {
      demo.actions.push_back({ActionOp::Edit, {}, a.key, a.value});
    }
    // Inspect/Reload/Rescan are read-only probing; minimality drops them.
  }
  return demo;
}

struct ScoredDemo {
  const CanonicalDemo* demo = nullptr;
  double similarity = 0;
};

// Application-partitioned demo store. Lookups stay inside one partition so a
// near-identical task in another application can never mislead replay.
class DemoIndex {
 public:
  const CanonicalDemo& add(CanonicalDemo demo) {
    if (demo.demo_id.empty()) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "d%06llu", static_cast<unsigned long long>(next_seq_++));
      demo.demo_id = buf;
    }
    auto& part = partitions_[demo.app_id];
    part.push_back(std::move(demo));
    return part.back();
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [_, part] : partitions_) n += part.size();
    return n;
  }

  std::size_t partition_size(const std::string& app_id) const {
    auto it = partitions_.find(app_id);
    return it == partitions_.end() ? 0 : it->second.size();
  }

  // Pure cosine ranking within the app partition, ties by demo id.
  std::vector<ScoredDemo> retrieve(const std::string& query_digest, const std::string& app_id,
                                   int k = kDemoRetrieveK) const {
    std::vector<ScoredDemo> out;
    auto it = partitions_.find(app_id);
    if (it == partitions_.end()) return out;
    Embedding q = embed(query_digest);
    for (const auto& d : it->second) out.push_back({&d, cosine(q, d.embedding)});
    std::sort(out.begin(), out.end(), [](const ScoredDemo& a, const ScoredDemo& b) {
      if (a.similarity != b.similarity) return a.similarity > b.similarity;
      return a.demo->demo_id < b.demo->demo_id;
    });
    if (int(out.size()) > k) out.resize(std::size_t(k));
    return out;
  }

  // Injection gate: the best same-app demo at or above the similarity
  // threshold, if any. Execution state may hold the result; plans never do.
  std::optional<ScoredDemo> inject(const std::string& query_digest, const std::string& app_id,
                                   double threshold = kDemoThreshold) const {
    auto ranked = retrieve(query_digest, app_id, 1);
    if (ranked.empty() || ranked[0].similarity < threshold) return std::nullopt;
    return ranked[0];
  }

  // Persistence piggybacks on the memory record-log line format: content is
  // the digest line followed by one tab-separated action line each.
  std::string save() const {
    SemanticStore store;
    for (const auto& [app, part] : partitions_) {
      for (const auto& d : part) {
        MemoryRecord rec;
        rec.record_id = d.demo_id;
        rec.kind = RecordKind::Demonstration;
        rec.task_tag = d.task_id;
        rec.app_tag = app;
        rec.content = escape_field(d.digest);
        for (const auto& a : d.actions) {
          if (a.op == ActionOp::Open)
            rec.content += "\nopen\t" + escape_field(a.artifact_id);
          else
            rec.content += "\nedit\t" + escape_field(a.key) + "\t" + escape_field(a.value);
        }
        store.store(std::move(rec));
      }
    }
    return store.log();
  }

  static DemoIndex load(const std::string& log_text) {
    DemoIndex index;
    SemanticStore store = SemanticStore::replay_log(log_text);
    for (const auto& id : store.ids()) {
      const MemoryRecord& rec = store.get(id);
      if (rec.kind != RecordKind::Demonstration) continue;
      CanonicalDemo demo;
      demo.demo_id = rec.record_id;
      demo.task_id = rec.task_tag;
      demo.app_id = rec.app_tag;
      auto lines = split(rec.content, '\n');
      demo.digest = lines.empty() ? std::string() : unescape_field(lines[0]);
      demo.embedding = embed(demo.digest);
      for (std::size_t i = 1; i < lines.size(); ++i) {
        auto fields = split(lines[i], '\t');
        if (fields.empty()) continue;
        if (fields[0] == "open" && fields.size() == 2) {
          demo.actions.push_back({ActionOp::Open, unescape_field(fields[1]), {}, {}});
        } else if (fields[0] == "edit" && fields.size() == 3) {
          demo.actions.push_back(
              {ActionOp::Edit, {}, unescape_field(fields[1]), unescape_field(fields[2])});
        } else {
          fail(Errc::ParseError, "bad demo action line '" + std::string(lines[i]) + "'");
        }
      }
      std::uint64_t seq = 0;
      if (demo.demo_id.size() > 1 && demo.demo_id[0] == 'd')
        seq = std::strtoull(demo.demo_id.c_str() + 1, nullptr, 10);
      if (seq >= index.next_seq_) index.next_seq_ = seq + 1;
      index.partitions_[demo.app_id].push_back(std::move(demo));
    }
    for (auto& [_, part] : index.partitions_)
      std::sort(part.begin(), part.end(), [](const CanonicalDemo& a, const CanonicalDemo& b) {
        return a.demo_id < b.demo_id;
      });
    return index;
  }

 private:
  std::map<std::string, std::vector<CanonicalDemo>> partitions_;
  std::uint64_t next_seq_ = 0;
};

// How many of the demo's leading edits agree with the task's own script.
// Replay applies exactly that prefix; a demo from a near-identical sibling
// task therefore fast-forwards the shared prefix and the task's remaining
// steps run normally — it can never write a foreign value.
inline std::size_t replay_prefix(const CanonicalDemo& demo, const TaskSpec& task) {
  auto edits = demo.edit_steps();
  std::size_t n = 0;
  while (n < edits.size() && n < task.edit_script.size() && edits[n] == task.edit_script[n]) ++n;
  return n;
}

}  // namespace orchsim
