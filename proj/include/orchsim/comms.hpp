#pragma once

// Inter-agent messaging: two channels (email, chat), per-recipient FIFO
// queues, at-most-once delivery, channel outages with single-fallback
// routing, and an append-only transmission log. The network object is
// shared between agent threads, so every operation takes the mutex.

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "orchsim/common.hpp"
#include "orchsim/planning.hpp"

namespace orchsim {

enum class Channel { Email, Chat };

inline const char* channel_name(Channel c) { return c == Channel::Email ? "email" : "chat"; }

inline Channel other_channel(Channel c) { return c == Channel::Email ? Channel::Chat : Channel::Email; }

struct Message {
  std::uint64_t msg_id = 0;
  std::string from;
  std::string to;
  Channel channel = Channel::Email;
  std::string body;
  SimMinute sent_at = 0;
};

enum class SendOutcome { Delivered, ChannelDown };

struct SendAttempt {
  Channel channel = Channel::Email;
  SendOutcome outcome = SendOutcome::Delivered;
};

struct SendReport {
  std::vector<SendAttempt> attempts;
  std::optional<std::uint64_t> msg_id;  // set when some attempt delivered

  bool delivered() const { return msg_id.has_value(); }
};

class Network {
 public:
  void add_agent(const std::string& agent_id) {
    std::lock_guard<std::mutex> lock(mu_);
    mailboxes_[agent_id];  // default-construct both channel queues
  }

  void set_channel_down(Channel channel, bool down) {
    std::lock_guard<std::mutex> lock(mu_);
    down_[channel == Channel::Email ? 0 : 1] = down;
  }

  bool channel_down(Channel channel) const {
    std::lock_guard<std::mutex> lock(mu_);
    return down_[channel == Channel::Email ? 0 : 1];
  }

  SendOutcome send(const std::string& from, const std::string& to, Channel channel,
                   const std::string& body, SimMinute now) {
    std::lock_guard<std::mutex> lock(mu_);
    return send_locked(from, to, channel, body, now);
  }

  // Try the requested channel, then once on the alternate. Both down is an
  // error the caller must handle; partial outages degrade silently.
  SendReport send_with_fallback(const std::string& from, const std::string& to, Channel preferred,
                                const std::string& body, SimMinute now) {
    std::lock_guard<std::mutex> lock(mu_);
    SendReport report;
    SendOutcome first = send_locked(from, to, preferred, body, now);
    report.attempts.push_back({preferred, first});
    if (first == SendOutcome::Delivered) {
      report.msg_id = last_msg_id_;
      return report;
    }
    Channel alt = other_channel(preferred);
    SendOutcome second = send_locked(from, to, alt, body, now);
    report.attempts.push_back({alt, second});
    if (second == SendOutcome::Delivered) {
      report.msg_id = last_msg_id_;
      return report;
    }
    fail(Errc::AllChannelsDown,
         "no channel reaches " + to + " (email and chat both down)");
  }

  // Drain the recipient's queues: all pending email in arrival order, then
  // all pending chat. Each message is handed out exactly once.
  std::vector<Message> poll(const std::string& agent_id) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = mailboxes_.find(agent_id);
    if (it == mailboxes_.end()) fail(Errc::UnknownAgent, "unknown agent '" + agent_id + "'");
    std::vector<Message> out;
    for (auto& queue : it->second.queues) {
      for (auto& m : queue) out.push_back(std::move(m));
      queue.clear();
    }
    return out;
  }

  std::size_t pending(const std::string& agent_id) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = mailboxes_.find(agent_id);
    if (it == mailboxes_.end()) fail(Errc::UnknownAgent, "unknown agent '" + agent_id + "'");
    return it->second.queues[0].size() + it->second.queues[1].size();
  }

  // Append-only record of every send attempt, delivered or not.
  std::string log() const {
    std::lock_guard<std::mutex> lock(mu_);
    return log_;
  }

 private:
  struct Mailbox {
    std::deque<Message> queues[2];  // [0]=email, [1]=chat
  };

  SendOutcome send_locked(const std::string& from, const std::string& to, Channel channel,
                          const std::string& body, SimMinute now) {
    auto it = mailboxes_.find(to);
    if (it == mailboxes_.end()) fail(Errc::UnknownAgent, "unknown agent '" + to + "'");
    int ci = channel == Channel::Email ? 0 : 1;
    SendOutcome outcome = down_[ci] ? SendOutcome::ChannelDown : SendOutcome::Delivered;
    std::uint64_t id = 0;
    if (outcome == SendOutcome::Delivered) {
      id = ++last_msg_id_;
      it->second.queues[ci].push_back({id, from, to, channel, body, now});
    }
    log_ += format_time(now);
    log_ += '\t';
    log_ += channel_name(channel);
    log_ += '\t';
    log_ += escape_field(from);
    log_ += '\t';
    log_ += escape_field(to);
    log_ += '\t';
    log_ += outcome == SendOutcome::Delivered ? "delivered" : "channel_down";
    log_ += '\t';
    log_ += outcome == SendOutcome::Delivered ? std::to_string(id) : std::string("-");
    log_ += '\t';
    log_ += escape_field(body);
    log_ += '\n';
    return outcome;
  }

  mutable std::mutex mu_;
  std::map<std::string, Mailbox> mailboxes_;
  bool down_[2] = {false, false};
  std::uint64_t last_msg_id_ = 0;
  std::string log_;
};

// A received message enters planning as new information; the planner decides
// what, if anything, changes.
inline PlanUpdateEvent to_plan_event(const Message& message) {
  PlanUpdateEvent event;
  event.kind = PlanEventKind::NewInformation;
  event.payload = "from " + message.from + " via " + channel_name(message.channel) + ": " +
                  message.body;
  event.at = message.sent_at;
  return event;
}

}  // namespace orchsim
