#pragma once

// Long-term memory: records scored for retrieval by recency, importance, and
// semantic similarity. Embeddings are 256-bucket feature hashes of lowercased
// tokens, L2-normalized; the empty text maps to a zero vector that never
// scores similarity. Every mutation appends to an in-memory log whose replay
// reconstructs the store exactly.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orchsim/common.hpp"
#include "orchsim/tokens.hpp"

namespace orchsim {

constexpr int kEmbeddingBuckets = 256;
using Embedding = std::array<float, kEmbeddingBuckets>;

inline Embedding embed(std::string_view text) {
  Embedding v{};
  std::string lower(text);
  for (auto& c : lower) c = char(std::tolower(static_cast<unsigned char>(c)));
  for (const auto& tok : tokenize(lower)) v[fnv1a(tok) % kEmbeddingBuckets] += 1.0f;
  double norm = 0;
  for (float x : v) norm += double(x) * x;
  if (norm > 0) {
    float inv = float(1.0 / std::sqrt(norm));
    for (auto& x : v) x *= inv;
  }
  return v;
}

inline bool is_zero(const Embedding& v) {
  for (float x : v)
    if (x != 0.0f) return false;
  return true;
}

// Both vectors are unit length (or zero), so the dot product is the cosine.
// A zero vector is the no-information sentinel and scores 0.
inline double cosine(const Embedding& a, const Embedding& b) {
  if (is_zero(a) || is_zero(b)) return 0.0;
  double dot = 0;
  for (int i = 0; i < kEmbeddingBuckets; ++i) dot += double(a[i]) * b[i];
  return dot;
}

enum class RecordKind { ActionSummary, Reflection, MonthlyPlan, DailyPlan, Demonstration, Note };

inline const char* record_kind_name(RecordKind k) {
  switch (k) {
    case RecordKind::ActionSummary: return "action_summary";
    case RecordKind::Reflection: return "reflection";
    case RecordKind::MonthlyPlan: return "monthly_plan";
    case RecordKind::DailyPlan: return "daily_plan";
    case RecordKind::Demonstration: return "demonstration";
    case RecordKind::Note: return "note";
  }
  return "?";
}

inline RecordKind record_kind_from(std::string_view name) {
  if (name == "action_summary") return RecordKind::ActionSummary;
  if (name == "reflection") return RecordKind::Reflection;
  if (name == "monthly_plan") return RecordKind::MonthlyPlan;
  if (name == "daily_plan") return RecordKind::DailyPlan;
  if (name == "demonstration") return RecordKind::Demonstration;
  if (name == "note") return RecordKind::Note;
  fail(Errc::ParseError, "unknown record kind " + std::string(name));
}

struct MemoryRecord {
  std::string record_id;
  RecordKind kind = RecordKind::Note;
  bool important = false;
  std::string task_tag;
  std::string app_tag;
  SimMinute created_at = 0;
  SimMinute last_accessed = 0;
  std::string content;
  Embedding embedding{};  // derived from content, not serialized
};

struct RetrievalQuery {
  std::string text;
  SimMinute now = 0;
  int k = 5;
  double half_life_minutes = 100.0;  // 20 cycles at the 5-minute cycle interval
  std::optional<RecordKind> kind;
  std::optional<std::string> app_tag;
};

struct ScoredRecord {
  std::string record_id;
  double score = 0;
  double recency = 0;
  double similarity = 0;
};

class SemanticStore {
 public:
  // Stores a record, assigning the next sequential id when none is given.
  const std::string& store(MemoryRecord record) {
    if (record.record_id.empty()) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "m%06llu", static_cast<unsigned long long>(next_seq_++));
      record.record_id = buf;
    } else {
      bump_seq(record.record_id);
    }
    record.embedding = embed(record.content);
    append_log(record);
    auto [it, _] = records_.insert_or_assign(record.record_id, std::move(record));
    return it->first;
  }

  bool has(const std::string& id) const { return records_.count(id) != 0; }
  std::size_t size() const { return records_.size(); }

  const MemoryRecord& get(const std::string& id) const {
    auto it = records_.find(id);
    if (it == records_.end()) fail(Errc::UnknownTask, "no memory record " + id);
    return it->second;
  }

  // Weighted retrieval: 0.4 recency + 0.4 importance + 0.2 similarity.
  // Recency decays as exp(-age/half_life) with age in minutes since last
  // access. Returns at most k records, ties broken by record id, and marks
  // last_accessed on everything returned.
  std::vector<ScoredRecord> retrieve(const RetrievalQuery& query) {
    Embedding q = embed(query.text);
    std::vector<ScoredRecord> scored;
    for (auto& [id, rec] : records_) {
      if (query.kind && rec.kind != *query.kind) continue;
      if (query.app_tag && rec.app_tag != *query.app_tag) continue;
      double age = double(query.now - rec.last_accessed);
      if (age < 0) age = 0;
      ScoredRecord s;
      s.record_id = id;
      s.recency = std::exp(-age / query.half_life_minutes);
      s.similarity = cosine(q, rec.embedding);
      s.score = 0.4 * s.recency + 0.4 * (rec.important ? 1.0 : 0.0) + 0.2 * s.similarity;
      scored.push_back(s);
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredRecord& a, const ScoredRecord& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.record_id < b.record_id;
    });
    if (int(scored.size()) > query.k) scored.resize(std::size_t(query.k));
    for (const auto& s : scored) {
      auto& rec = records_.at(s.record_id);
      rec.last_accessed = query.now;
      append_log(rec);
    }
    return scored;
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : records_) out.push_back(id);
    return out;
  }

  std::vector<const MemoryRecord*> by_kind(RecordKind kind) const {
    std::vector<const MemoryRecord*> out;
    for (const auto& [_, rec] : records_)
      if (rec.kind == kind) out.push_back(&rec);
    return out;
  }

  // Append-only log: one record per line, last line per id wins on replay.
  const std::string& log() const { return log_; }

  static SemanticStore replay_log(const std::string& text) {
    SemanticStore store;
    for (std::string_view line : split(text, '\n')) {
      if (line.empty()) continue;
      auto f = split(line, '\t');
      if (f.size() != 8) fail(Errc::ParseError, "memory log line needs 8 fields");
      MemoryRecord rec;
      rec.record_id = unescape_field(f[0]);
      rec.kind = record_kind_from(f[1]);
      rec.important = f[2] == "1";
      rec.task_tag = unescape_field(f[3]);
      rec.app_tag = unescape_field(f[4]);
      rec.created_at = std::stoll(std::string(f[5]));
      rec.last_accessed = std::stoll(std::string(f[6]));
      rec.content = unescape_field(f[7]);
      rec.embedding = embed(rec.content);
      store.bump_seq(rec.record_id);
      store.records_.insert_or_assign(rec.record_id, rec);
      store.log_ += std::string(line) + "\n";
    }
    return store;
  }

 private:
  void append_log(const MemoryRecord& r) {
    log_ += escape_field(r.record_id) + "\t" + record_kind_name(r.kind) + "\t" +
            (r.important ? "1" : "0") + "\t" + escape_field(r.task_tag) + "\t" +
            escape_field(r.app_tag) + "\t" + std::to_string(r.created_at) + "\t" +
            std::to_string(r.last_accessed) + "\t" + escape_field(r.content) + "\n";
  }

  void bump_seq(const std::string& id) {
    if (id.size() > 1 && id[0] == 'm') {
      char* end = nullptr;
      unsigned long long n = std::strtoull(id.c_str() + 1, &end, 10);
      if (end && *end == '\0' && n >= next_seq_) next_seq_ = n + 1;
    }
  }

  std::map<std::string, MemoryRecord> records_;
  std::string log_;
  std::uint64_t next_seq_ = 0;
};

// End-of-day consolidation input: the terminal outcome of one task.
struct DayOutcome {
  std::string task_id;
  std::string app_id;
  bool completed = false;  // else skipped
  int attempts = 0;
  long steps = 0;
};

// Writes one ActionSummary per terminal task plus a single Reflection that
// lists the skipped task ids. Returns the ids of the created records.
inline std::vector<std::string> consolidate_day(SemanticStore& store, int day,
                                                const std::vector<DayOutcome>& outcomes,
                                                SimMinute now) {
  std::vector<std::string> created;
  std::string skipped_ids;
  long completed = 0, skipped = 0;
  for (const auto& o : outcomes) {
    MemoryRecord rec;
    rec.kind = RecordKind::ActionSummary;
    rec.important = !o.completed;  // failures and skips are task-critical
    rec.task_tag = o.task_id;
    rec.app_tag = o.app_id;
    rec.created_at = rec.last_accessed = now;
    rec.content = "task " + o.task_id + (o.completed ? " completed" : " skipped") + " after " +
                  std::to_string(o.attempts) + " attempts " + std::to_string(o.steps) +
                  " steps app " + o.app_id;
    created.push_back(store.store(std::move(rec)));
    if (o.completed) {
      ++completed;
    } else {
      ++skipped;
      if (!skipped_ids.empty()) skipped_ids += ",";
      skipped_ids += o.task_id;
    }
  }
  MemoryRecord refl;
  refl.kind = RecordKind::Reflection;
  refl.created_at = refl.last_accessed = now;
  refl.content = "day " + std::to_string(day) + " reflection: completed " +
                 std::to_string(completed) + " skipped " + std::to_string(skipped) +
                 (skipped_ids.empty() ? std::string() : " skipped_ids " + skipped_ids);
  created.push_back(store.store(std::move(refl)));
  return created;
}

}  // namespace orchsim
