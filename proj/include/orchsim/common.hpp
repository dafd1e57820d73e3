#pragma once

// Shared primitives: simulated time, deterministic hashing and RNG,
// error codes, and the escaping scheme used by every line-oriented format.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace orchsim {

// Sim time is integer minutes since day 1, 00:00. One calendar month is 30 days.
using SimMinute = std::int64_t;

constexpr SimMinute kMinutesPerDay = 24 * 60;
constexpr int kDaysPerMonth = 30;

inline SimMinute day_start(int day) { return SimMinute(day - 1) * kMinutesPerDay; }
inline int day_of(SimMinute t) { return int(t / kMinutesPerDay) + 1; }
inline int minute_of_day(SimMinute t) { return int(t % kMinutesPerDay); }

inline std::string format_time(SimMinute t) {
  int d = day_of(t), m = minute_of_day(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "d%02d %02d:%02d", d, m / 60, m % 60);
  return buf;
}

enum class Errc {
  CycleDetected,
  UnknownTask,
  UnknownApp,
  UnknownArtifact,
  ZeroTotal,
  OverCompression,
  PlanExists,
  NoPlan,
  UnknownAgent,
  AllChannelsDown,
  AlternationViolation,
  SchemaViolation,
  NotSuccessful,
  FixtureMissing,
  ParseError,
  BadConfig,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::CycleDetected: return "CycleDetected";
    case Errc::UnknownTask: return "UnknownTask";
    case Errc::UnknownApp: return "UnknownApp";
    case Errc::UnknownArtifact: return "UnknownArtifact";
    case Errc::ZeroTotal: return "ZeroTotal";
    case Errc::OverCompression: return "OverCompression";
    case Errc::PlanExists: return "PlanExists";
    case Errc::NoPlan: return "NoPlan";
    case Errc::UnknownAgent: return "UnknownAgent";
    case Errc::AllChannelsDown: return "AllChannelsDown";
    case Errc::AlternationViolation: return "AlternationViolation";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::NotSuccessful: return "NotSuccessful";
    case Errc::FixtureMissing: return "FixtureMissing";
    case Errc::ParseError: return "ParseError";
    case Errc::BadConfig: return "BadConfig";
  }
  return "?";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

// FNV-1a 64-bit. std::hash is not stable across platforms; this is.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// splitmix64: tiny deterministic RNG. All seeded behavior in the project goes
// through this so runs are byte-identical on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n) without implementation-defined distributions.
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

  // Uniform in [lo, hi] inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + std::int64_t(below(std::uint64_t(hi - lo + 1)));
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t state_;
};

// Escaping for tab-separated line formats: backslash, tab, newline, and
// carriage return. Field parsers split on raw tabs, so escaped bytes survive
// round trips exactly.
inline std::string escape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string unescape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out += s[i];
      continue;
    }
    switch (s[++i]) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      default: out += s[i];
    }
  }
  return out;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

// Percentage with one decimal, round half up, exact integer arithmetic:
// tenths = (2000*part + total) / (2*total).
// Percentage in integer tenths (87 = 8.7%), round half up. Exact integer
// arithmetic keeps every report reproducible bit-for-bit.
inline std::int64_t percent_1dp(std::int64_t part, std::int64_t total) {
  if (total <= 0) fail(Errc::ZeroTotal, "percentage over empty set");
  return (2000 * part + total) / (2 * total);
}

inline std::string format_1dp(std::int64_t tenths) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld.%lld", static_cast<long long>(tenths / 10),
                static_cast<long long>(tenths % 10));
  return buf;
}

}  // namespace orchsim
