#include "fieldstore/report.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace fieldstore {

char phase_code(Phase p) {
  switch (p) {
    case Phase::kWrite: return 'w';
    case Phase::kRead: return 'r';
    case Phase::kPopulate: return 'p';
  }
  return '?';
}

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::kWrite: return "write";
    case Phase::kRead: return "read";
    case Phase::kPopulate: return "populate";
  }
  return "?";
}

Phase phase_from_code(char c) {
  switch (c) {
    case 'w': return Phase::kWrite;
    case 'r': return Phase::kRead;
    case 'p': return Phase::kPopulate;
  }
  throw std::invalid_argument(std::string("bad phase code: ") + c);
}

namespace {

// Pulls "name=" off the front of `in` and parses the value up to the next
// space (or end of string).
std::string take_field(std::istringstream& in, const std::string& name) {
  std::string token;
  if (!(in >> token) || !token.starts_with(name + "="))
    throw std::invalid_argument("expected field '" + name + "'");
  return token.substr(name.size() + 1);
}

}  // namespace

std::string format_record_line(const TimingRecord& rec) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "REC worker=%d phase=%c start=%.9f end=%.9f bytes=%llu "
                "ops=%llu",
                rec.worker_id, phase_code(rec.phase), rec.start, rec.end,
                static_cast<unsigned long long>(rec.bytes),
                static_cast<unsigned long long>(rec.ops));
  return buf;
}

TimingRecord parse_record_line(const std::string& line) {
  std::istringstream in(line);
  std::string tag;
  in >> tag;
  if (tag != "REC") throw std::invalid_argument("not a REC line: " + line);
  TimingRecord rec;
  rec.worker_id = std::stoi(take_field(in, "worker"));
  std::string phase = take_field(in, "phase");
  if (phase.size() != 1) throw std::invalid_argument("bad phase: " + phase);
  rec.phase = phase_from_code(phase[0]);
  rec.start = std::stod(take_field(in, "start"));
  rec.end = std::stod(take_field(in, "end"));
  rec.bytes = std::stoull(take_field(in, "bytes"));
  rec.ops = std::stoull(take_field(in, "ops"));
  return rec;
}

std::string format_audit_line(int worker_id, Phase phase, const OpCounts& c) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "AUD worker=%d phase=%c arrw=%llu arrr=%llu put=%llu "
                "get=%llu exist=%llu cont=%llu",
                worker_id, phase_code(phase),
                static_cast<unsigned long long>(c.array_writes),
                static_cast<unsigned long long>(c.array_reads),
                static_cast<unsigned long long>(c.kv_puts),
                static_cast<unsigned long long>(c.kv_gets),
                static_cast<unsigned long long>(c.exist_checks),
                static_cast<unsigned long long>(c.container_creates));
  return buf;
}

std::tuple<int, Phase, OpCounts> parse_audit_line(const std::string& line) {
  std::istringstream in(line);
  std::string tag;
  in >> tag;
  if (tag != "AUD") throw std::invalid_argument("not an AUD line: " + line);
  int worker = std::stoi(take_field(in, "worker"));
  std::string phase = take_field(in, "phase");
  if (phase.size() != 1) throw std::invalid_argument("bad phase: " + phase);
  OpCounts c;
  c.array_writes = std::stoull(take_field(in, "arrw"));
  c.array_reads = std::stoull(take_field(in, "arrr"));
  c.kv_puts = std::stoull(take_field(in, "put"));
  c.kv_gets = std::stoull(take_field(in, "get"));
  c.exist_checks = std::stoull(take_field(in, "exist"));
  c.container_creates = std::stoull(take_field(in, "cont"));
  return {worker, phase_from_code(phase[0]), c};
}

}  // namespace fieldstore
