#pragma once

// Task-suite file format. Line-oriented UTF-8: one task per line as
// tab-separated field=value pairs, dependency edges as dep=<task>:<prereq>
// lines. Tabs, newlines, backslashes, and colons inside values are escaped;
// save(load(f)) is byte-identical for canonical files.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "orchsim/common.hpp"
#include "orchsim/sim_env.hpp"
#include "orchsim/tasks.hpp"

namespace orchsim {

struct Suite {
  std::vector<TaskSpec> tasks;                               // file order
  std::vector<std::pair<std::string, std::string>> deps;     // (task, prereq), file order

  DependencyGraph graph() const { return DependencyGraph::build(tasks, deps); }

  const TaskSpec* find(const std::string& id) const {
    for (const auto& t : tasks)
      if (t.task_id == id) return &t;
    return nullptr;
  }

  // A task belongs to category "multi" when any prerequisite lives in a
  // different application; otherwise to its own app.
  std::string category(const TaskSpec& task) const {
    for (const auto& [t, p] : deps) {
      if (t != task.task_id) continue;
      const TaskSpec* pre = find(p);
      if (pre && pre->app_id != task.app_id) return "multi";
    }
    return task.app_id;
  }

  std::map<std::string, long> category_counts() const {
    std::map<std::string, long> out;
    for (const auto& t : tasks) ++out[category(t)];
    return out;
  }
};

namespace detail {

inline std::string escape_pair_key(std::string_view key) {
  std::string esc = escape_field(key);
  std::string out;
  for (char c : esc) {
    if (c == ':') out += "\\:";
    else out += c;
  }
  return out;
}

// Splits at the first ':' preceded by an even number of backslashes.
inline std::pair<std::string, std::string> split_pair(std::string_view s) {
  std::size_t backslashes = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\') {
      ++backslashes;
      continue;
    }
    if (s[i] == ':' && backslashes % 2 == 0)
      return {unescape_field(s.substr(0, i)), unescape_field(s.substr(i + 1))};
    backslashes = 0;
  }
  fail(Errc::ParseError, "expected key:value in '" + std::string(s) + "'");
}

}  // namespace detail

inline std::string save_suite(const Suite& suite) {
  std::string out;
  for (const auto& t : suite.tasks) {
    out += "id=" + escape_field(t.task_id);
    out += "\tapp=" + escape_field(t.app_id);
    out += "\tdesc=" + escape_field(t.description);
    out += "\tpriority=" + std::to_string(t.priority);
    out += "\tfootprint=" + std::to_string(t.state_footprint);
    out += "\tsteps=" + std::to_string(t.step_count);
    if (t.deadline) out += "\tdeadline=" + std::to_string(*t.deadline);
    out += "\tdeliverable=" + escape_field(t.deliverable_id);
    for (const auto& e : t.edit_script)
      out += "\tedit=" + detail::escape_pair_key(e.key) + ":" + escape_field(e.value);
    out += "\n";
  }
  for (const auto& [task, prereq] : suite.deps)
    out += "dep=" + detail::escape_pair_key(task) + ":" + escape_field(prereq) + "\n";
  return out;
}

inline Suite parse_suite(const std::string& text) {
  Suite suite;
  std::size_t lineno = 0;
  for (std::string_view line : split(text, '\n')) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line.substr(0, 4) == "dep=") {
      suite.deps.push_back(detail::split_pair(line.substr(4)));
      continue;
    }
    TaskSpec t;
    bool saw_id = false;
    for (std::string_view field : split(line, '\t')) {
      auto eq = field.find('=');
      if (eq == std::string_view::npos)
        fail(Errc::ParseError, "line " + std::to_string(lineno) + ": no '=' in field");
      std::string_view name = field.substr(0, eq);
      std::string_view value = field.substr(eq + 1);
      if (name == "id") {
        t.task_id = unescape_field(value);
        saw_id = true;
      } else if (name == "app") {
        t.app_id = unescape_field(value);
      } else if (name == "desc") {
        t.description = unescape_field(value);
      } else if (name == "priority") {
        t.priority = std::stoi(std::string(value));
      } else if (name == "footprint") {
        t.state_footprint = std::stol(std::string(value));
      } else if (name == "steps") {
        t.step_count = std::stoi(std::string(value));
      } else if (name == "deadline") {
        t.deadline = std::stoll(std::string(value));
      } else if (name == "deliverable") {
        t.deliverable_id = unescape_field(value);
      } else if (name == "edit") {
        auto [k, v] = detail::split_pair(value);
        t.edit_script.push_back({k, v});
      } else {
        fail(Errc::ParseError, "line " + std::to_string(lineno) + ": unknown field '" +
                                   std::string(name) + "'");
      }
    }
    if (!saw_id) fail(Errc::ParseError, "line " + std::to_string(lineno) + ": task without id");
    suite.tasks.push_back(std::move(t));
  }
  return suite;
}

inline void validate_suite(const Suite& suite) {
  for (const auto& t : suite.tasks) {
    if (t.task_id.empty() || t.app_id.empty() || t.deliverable_id.empty())
      fail(Errc::ParseError, "task missing id/app/deliverable");
    if (t.state_footprint <= 0) fail(Errc::ParseError, t.task_id + ": footprint must be positive");
    if (t.step_count < 10 || t.step_count > 30)
      fail(Errc::ParseError, t.task_id + ": step_count outside 10..30");
    if (int(t.edit_script.size()) != t.step_count)
      fail(Errc::ParseError, t.task_id + ": steps != edit script length");
  }
  suite.graph();  // rejects unknown endpoints and cycles
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::FixtureMissing, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::ParseError, "cannot write " + path);
  out << content;
}

inline Suite load_suite(const std::string& path) {
  Suite s = parse_suite(read_file(path));
  validate_suite(s);
  return s;
}

// Documents serialize as sorted key=value lines with the shared escaping;
// '=' inside keys is escaped so the first unescaped '=' is the separator.
inline std::string doc_to_text(const Doc& doc) {
  std::string out;
  for (const auto& [k, v] : doc) {
    std::string key = escape_field(k);
    std::string esc;
    for (char c : key) {
      if (c == '=') esc += "\\=";
      else esc += c;
    }
    out += esc + "=" + escape_field(v) + "\n";
  }
  return out;
}

inline Doc doc_from_text(const std::string& text) {
  Doc doc;
  for (std::string_view line : split(text, '\n')) {
    if (line.empty()) continue;
    std::size_t backslashes = 0, eq = std::string_view::npos;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '\\') {
        ++backslashes;
        continue;
      }
      if (line[i] == '=' && backslashes % 2 == 0) {
        eq = i;
        break;
      }
      backslashes = 0;
    }
    if (eq == std::string_view::npos) fail(Errc::ParseError, "document line without '='");
    doc[unescape_field(line.substr(0, eq))] = unescape_field(line.substr(eq + 1));
  }
  return doc;
}

// Builds the simulated workspace for a set of tasks: every referenced app
// exists and every deliverable starts as an empty document.
inline Workspace make_workspace(const std::vector<TaskSpec>& tasks) {
  Workspace ws;
  for (const auto& t : tasks) {
    if (!ws.has_app(t.app_id)) ws.add_app(t.app_id);
    ws.app(t.app_id).create_artifact(t.deliverable_id);
  }
  return ws;
}

}  // namespace orchsim
