#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fieldstore/object_api.hpp"

namespace fieldstore {

enum class Phase { kWrite, kRead, kPopulate };

char phase_code(Phase p);                    // 'w' / 'r' / 'p'
std::string_view phase_name(Phase p);        // "write" / "read" / "populate"
Phase phase_from_code(char c);

// Per-worker, per-phase timing. Timestamps are seconds since the run epoch
// established by the orchestrator before spawning (one clock domain per run).
struct TimingRecord {
  int worker_id = 0;
  Phase phase = Phase::kWrite;
  double start = 0;
  double end = 0;
  std::uint64_t bytes = 0;
  std::uint64_t ops = 0;
};

// Worker-to-orchestrator wire format, one record per line:
//   REC worker=<id> phase=<w|r|p> start=<f64> end=<f64> bytes=<u64> ops=<u64>
std::string format_record_line(const TimingRecord& rec);
TimingRecord parse_record_line(const std::string& line);

// Optional companion line carrying the worker's store-level op audit:
//   AUD worker=<id> phase=<w|r|p> arrw=.. arrr=.. put=.. get=.. exist=.. cont=..
std::string format_audit_line(int worker_id, Phase phase, const OpCounts& c);
std::tuple<int, Phase, OpCounts> parse_audit_line(const std::string& line);

// Flat echo of the effective configuration, carried into every report and
// emitted verbatim into CSV rows.
struct ConfigEcho {
  std::string pattern;  // "a", "b" or "segments"
  std::string mode;     // "full", "no-containers" or "-"
  std::string backend;  // "posix" or "memory"
  std::uint64_t object_size_bytes = 0;
  int nodes = 0;
  int workers_per_node = 0;
  int iterations = 0;
};

struct RunReport {
  ConfigEcho config;
  int repetition = 0;
  std::vector<TimingRecord> records;
  // Barrier release timestamp per phase, same clock domain as the records.
  std::map<Phase, double> release;
  // Store-level op counts per (worker, phase), where workers reported them.
  std::map<std::pair<int, Phase>, OpCounts> audits;
};

}  // namespace fieldstore
