#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fieldstore/report.hpp"

namespace fieldstore {

enum class Metric { kSynchronous, kGlobalTiming };

std::string_view to_string(Metric m);  // "synchronous" / "global_timing"

enum class MetricsErrorKind { kEmptyInput, kDegenerateWindow };

class MetricsError : public std::runtime_error {
 public:
  MetricsError(MetricsErrorKind kind, const std::string& detail)
      : std::runtime_error(detail), kind_(kind) {}
  MetricsErrorKind kind() const { return kind_; }

 private:
  MetricsErrorKind kind_;
};

struct BandwidthResult {
  Metric metric = Metric::kSynchronous;
  Phase phase = Phase::kWrite;
  std::uint64_t bytes_total = 0;
  double wall_seconds = 0;
  double bandwidth = 0;  // bytes per second
};

struct AggregateResult {
  std::vector<double> values;  // per-repetition bandwidths
  double mean = 0;
  double min = 0;
  double max = 0;
};

// Sum(bytes) / (max end - barrier release). All records must share one phase
// and start at or after the release.
BandwidthResult synchronous_bandwidth(std::span<const TimingRecord> records,
                                      double release_time);

// Sum(bytes) / (max end - min start). Invariant under uniform time
// translation of all records.
BandwidthResult global_timing_bandwidth(std::span<const TimingRecord> records);

AggregateResult aggregate(std::span<const double> values);

struct SweepCandidate {
  int worker_count = 0;
  double mean_bandwidth = 0;
};

// Picks the candidate with maximal mean bandwidth; ties go to the smaller
// worker count.
SweepCandidate best_of(std::span<const SweepCandidate> candidates);

// ---------------------------------------------------------------------------
// Emission

// One row per (report, phase, metric).
struct ResultRow {
  ConfigEcho config;
  int repetition = 0;
  BandwidthResult result;
};

std::vector<ResultRow> compute_rows(std::span<const RunReport> reports);

inline constexpr const char* kCsvHeader =
    "pattern,mode,backend,object_size_bytes,nodes,workers_per_node,"
    "iterations,repetition,phase,metric,bytes_total,wall_seconds,"
    "bandwidth_bytes_per_sec";

void emit_csv(std::span<const ResultRow> rows, std::ostream& out);
std::vector<ResultRow> parse_csv(std::istream& in);

void emit_json(std::span<const ResultRow> rows, std::ostream& out);

// Plot-ready series: one block per (pattern, mode, metric, phase), blocks
// separated by a blank line, `x mean min max` per point.
struct SeriesPoint {
  double x = 0;
  AggregateResult agg;
};

struct Series {
  std::string pattern;
  std::string mode;
  Metric metric = Metric::kGlobalTiming;
  Phase phase = Phase::kWrite;
  std::vector<SeriesPoint> points;
};

void emit_plotdata(std::span<const Series> series, std::ostream& out);

}  // namespace fieldstore
