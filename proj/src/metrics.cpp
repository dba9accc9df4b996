#include "fieldstore/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace fieldstore {

std::string_view to_string(Metric m) {
  return m == Metric::kSynchronous ? "synchronous" : "global_timing";
}

namespace {

std::uint64_t total_bytes(std::span<const TimingRecord> records) {
  std::uint64_t total = 0;
  for (const auto& r : records) total += r.bytes;
  return total;
}

void require_single_phase(std::span<const TimingRecord> records) {
  for (const auto& r : records) {
    if (r.phase != records.front().phase)
      throw MetricsError(MetricsErrorKind::kEmptyInput,
                         "records span multiple phases");
  }
}

}  // namespace

BandwidthResult synchronous_bandwidth(std::span<const TimingRecord> records,
                                      double release_time) {
  if (records.empty())
    throw MetricsError(MetricsErrorKind::kEmptyInput, "no records");
  require_single_phase(records);
  double max_end = records.front().end;
  for (const auto& r : records) max_end = std::max(max_end, r.end);
  std::uint64_t bytes = total_bytes(records);
  double wall = max_end - release_time;
  if (wall <= 0 && bytes > 0)
    throw MetricsError(MetricsErrorKind::kDegenerateWindow,
                       "zero-length phase window");
  BandwidthResult out;
  out.metric = Metric::kSynchronous;
  out.phase = records.front().phase;
  out.bytes_total = bytes;
  out.wall_seconds = wall;
  out.bandwidth = wall > 0 ? static_cast<double>(bytes) / wall : 0.0;
  return out;
}

BandwidthResult global_timing_bandwidth(
    std::span<const TimingRecord> records) {
  if (records.empty())
    throw MetricsError(MetricsErrorKind::kEmptyInput, "no records");
  require_single_phase(records);
  double min_start = records.front().start;
  double max_end = records.front().end;
  for (const auto& r : records) {
    min_start = std::min(min_start, r.start);
    max_end = std::max(max_end, r.end);
  }
  std::uint64_t bytes = total_bytes(records);
  double wall = max_end - min_start;
  if (wall <= 0 && bytes > 0)
    throw MetricsError(MetricsErrorKind::kDegenerateWindow,
                       "zero-length activity window");
  BandwidthResult out;
  out.metric = Metric::kGlobalTiming;
  out.phase = records.front().phase;
  out.bytes_total = bytes;
  out.wall_seconds = wall;
  out.bandwidth = wall > 0 ? static_cast<double>(bytes) / wall : 0.0;
  return out;
}

AggregateResult aggregate(std::span<const double> values) {
  if (values.empty())
    throw MetricsError(MetricsErrorKind::kEmptyInput, "no values");
  AggregateResult out;
  out.values.assign(values.begin(), values.end());
  double sum = 0;
  out.min = values.front();
  out.max = values.front();
  for (double v : values) {
    sum += v;
    out.min = std::min(out.min, v);
    out.max = std::max(out.max, v);
  }
  out.mean = sum / static_cast<double>(values.size());
  return out;
}

SweepCandidate best_of(std::span<const SweepCandidate> candidates) {
  if (candidates.empty())
    throw MetricsError(MetricsErrorKind::kEmptyInput, "no candidates");
  SweepCandidate best = candidates.front();
  for (const auto& c : candidates.subspan(1)) {
    if (c.mean_bandwidth > best.mean_bandwidth ||
        (c.mean_bandwidth == best.mean_bandwidth &&
         c.worker_count < best.worker_count)) {
      best = c;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Emission

std::vector<ResultRow> compute_rows(std::span<const RunReport> reports) {
  std::vector<ResultRow> rows;
  for (const auto& report : reports) {
    for (Phase phase : {Phase::kPopulate, Phase::kWrite, Phase::kRead}) {
      std::vector<TimingRecord> phase_records;
      for (const auto& r : report.records)
        if (r.phase == phase) phase_records.push_back(r);
      if (phase_records.empty()) continue;
      auto release = report.release.find(phase);
      if (release != report.release.end()) {
        rows.push_back({report.config, report.repetition,
                        synchronous_bandwidth(phase_records, release->second)});
      }
      rows.push_back({report.config, report.repetition,
                      global_timing_bandwidth(phase_records)});
    }
  }
  return rows;
}

namespace {

std::string f64(double v) {
  std::ostringstream s;
  s << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return s.str();
}

}  // namespace

void emit_csv(std::span<const ResultRow> rows, std::ostream& out) {
  out << kCsvHeader << "\n";
  for (const auto& row : rows) {
    out << row.config.pattern << ',' << row.config.mode << ','
        << row.config.backend << ',' << row.config.object_size_bytes << ','
        << row.config.nodes << ',' << row.config.workers_per_node << ','
        << row.config.iterations << ',' << row.repetition << ','
        << phase_name(row.result.phase) << ',' << to_string(row.result.metric)
        << ',' << row.result.bytes_total << ',' << f64(row.result.wall_seconds)
        << ',' << f64(row.result.bandwidth) << "\n";
  }
}

std::vector<ResultRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::invalid_argument("missing or unexpected CSV header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::istringstream ls(line);
    std::string col;
    while (std::getline(ls, col, ',')) cols.push_back(col);
    if (cols.size() != 13)
      throw std::invalid_argument("bad CSV row: " + line);
    ResultRow row;
    row.config.pattern = cols[0];
    row.config.mode = cols[1];
    row.config.backend = cols[2];
    row.config.object_size_bytes = std::stoull(cols[3]);
    row.config.nodes = std::stoi(cols[4]);
    row.config.workers_per_node = std::stoi(cols[5]);
    row.config.iterations = std::stoi(cols[6]);
    row.repetition = std::stoi(cols[7]);
    for (Phase p : {Phase::kWrite, Phase::kRead, Phase::kPopulate})
      if (phase_name(p) == cols[8]) row.result.phase = p;
    row.result.metric = cols[9] == "synchronous" ? Metric::kSynchronous
                                                 : Metric::kGlobalTiming;
    row.result.bytes_total = std::stoull(cols[10]);
    row.result.wall_seconds = std::stod(cols[11]);
    row.result.bandwidth = std::stod(cols[12]);
    rows.push_back(row);
  }
  return rows;
}

void emit_json(std::span<const ResultRow> rows, std::ostream& out) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : rows) {
    arr.push_back({{"pattern", row.config.pattern},
                   {"mode", row.config.mode},
                   {"backend", row.config.backend},
                   {"object_size_bytes", row.config.object_size_bytes},
                   {"nodes", row.config.nodes},
                   {"workers_per_node", row.config.workers_per_node},
                   {"iterations", row.config.iterations},
                   {"repetition", row.repetition},
                   {"phase", phase_name(row.result.phase)},
                   {"metric", to_string(row.result.metric)},
                   {"bytes_total", row.result.bytes_total},
                   {"wall_seconds", row.result.wall_seconds},
                   {"bandwidth_bytes_per_sec", row.result.bandwidth}});
  }
  out << arr.dump(2) << "\n";
}

void emit_plotdata(std::span<const Series> series, std::ostream& out) {
  bool first = true;
  for (const auto& s : series) {
    if (!first) out << "\n";
    first = false;
    out << "# pattern=" << s.pattern << " mode=" << s.mode
        << " metric=" << to_string(s.metric)
        << " phase=" << phase_name(s.phase) << "\n";
    for (const auto& p : s.points) {
      out << f64(p.x) << ' ' << f64(p.agg.mean) << ' ' << f64(p.agg.min)
          << ' ' << f64(p.agg.max) << "\n";
    }
  }
}

}  // namespace fieldstore
