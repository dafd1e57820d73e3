#pragma once

// Persistent digital-employee identity: who the agent is, which applications
// it is responsible for, which tools it may call, and its working schedule.

#include <string>
#include <vector>

#include "orchsim/common.hpp"

namespace orchsim {

struct Responsibility {
  std::string app_id;
  std::string text;
};

struct Identity {
  std::string agent_id;
  std::string name;
  std::string role;
  std::vector<Responsibility> responsibilities;
  std::vector<std::string> tools;
  int start_hour = 8;
  int end_hour = 18;
  int cycle_interval = 5;  // minimum sim minutes between cycle starts

  void validate() const {
    if (start_hour >= end_hour) fail(Errc::BadConfig, "schedule start must precede end");
    if (cycle_interval <= 0) fail(Errc::BadConfig, "cycle interval must be positive");
  }

  bool has_tool(const std::string& name_) const {
    for (const auto& t : tools)
      if (t == name_) return true;
    return false;
  }
};

inline std::string save_identity(const Identity& id) {
  std::string out;
  out += "agent=" + escape_field(id.agent_id);
  out += "\tname=" + escape_field(id.name);
  out += "\trole=" + escape_field(id.role);
  out += "\tstart=" + std::to_string(id.start_hour);
  out += "\tend=" + std::to_string(id.end_hour);
  out += "\tinterval=" + std::to_string(id.cycle_interval);
  out += "\n";
  for (const auto& r : id.responsibilities)
    out += "resp=" + escape_field(r.app_id) + "\ttext=" + escape_field(r.text) + "\n";
  for (const auto& t : id.tools) out += "tool=" + escape_field(t) + "\n";
  return out;
}

inline Identity parse_identity(const std::string& text) {
  Identity id;
  for (std::string_view line : split(text, '\n')) {
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, '\t');
    auto value_of = [&](std::string_view field) {
      auto eq = field.find('=');
      if (eq == std::string_view::npos) fail(Errc::ParseError, "identity field needs '='");
      return std::pair(field.substr(0, eq), field.substr(eq + 1));
    };
    auto [head, head_val] = value_of(fields[0]);
    if (head == "agent") {
      for (auto f : fields) {
        auto [k, v] = value_of(f);
        if (k == "agent") id.agent_id = unescape_field(v);
        else if (k == "name") id.name = unescape_field(v);
        else if (k == "role") id.role = unescape_field(v);
        else if (k == "start") id.start_hour = std::stoi(std::string(v));
        else if (k == "end") id.end_hour = std::stoi(std::string(v));
        else if (k == "interval") id.cycle_interval = std::stoi(std::string(v));
        else fail(Errc::ParseError, "unknown identity field '" + std::string(k) + "'");
      }
    } else if (head == "resp") {
      Responsibility r;
      r.app_id = unescape_field(head_val);
      for (std::size_t i = 1; i < fields.size(); ++i) {
        auto [k, v] = value_of(fields[i]);
        if (k == "text") r.text = unescape_field(v);
      }
      id.responsibilities.push_back(std::move(r));
    } else if (head == "tool") {
      id.tools.push_back(unescape_field(head_val));
    } else {
      fail(Errc::ParseError, "unknown identity line '" + std::string(head) + "'");
    }
  }
  id.validate();
  return id;
}

}  // namespace orchsim
