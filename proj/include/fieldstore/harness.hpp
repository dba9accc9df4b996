#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <utility>

#include "fieldstore/fieldio.hpp"
#include "fieldstore/report.hpp"

namespace fieldstore {

enum class BackendKind { kPosix, kMemory };
enum class WorkerModel { kProcesses, kThreads };

std::string_view to_string(BackendKind b);
BackendKind backend_from_string(std::string_view text);

enum class HarnessErrorKind {
  kConfigInvalid,
  kWorkerFailure,
  kBarrierTimeout,
  kSpawnFailure,
};

class HarnessError : public std::runtime_error {
 public:
  HarnessError(HarnessErrorKind kind, const std::string& detail)
      : std::runtime_error(detail), kind_(kind) {}
  HarnessErrorKind kind() const { return kind_; }

 private:
  HarnessErrorKind kind_;
};

// Fully determines a benchmark run.
struct BenchmarkConfig {
  char pattern = 'a';  // 'a' or 'b'
  FieldioMode mode = FieldioMode::kFull;
  BackendKind backend = BackendKind::kPosix;
  std::filesystem::path root;  // parent directory for per-repetition stores
  int nodes = 1;               // simulated client nodes (worker groups)
  int workers_per_node = 1;
  int iterations = 2000;  // fields per worker
  std::uint64_t object_size = 1024 * 1024;
  int repetitions = 5;
  std::uint64_t seed = 0;
  // Defaults to processes on the posix backend, threads on memory.
  std::optional<WorkerModel> worker_model;
  double barrier_timeout_s = 60.0;
  bool keep_data = false;  // keep per-repetition posix stores on disk

  WorkerModel effective_worker_model() const {
    if (worker_model) return *worker_model;
    return backend == BackendKind::kPosix ? WorkerModel::kProcesses
                                          : WorkerModel::kThreads;
  }

  void validate() const;  // throws HarnessError{ConfigInvalid}
  ConfigEcho echo() const;
};

// ---------------------------------------------------------------------------
// Deterministic workload derivation

// Keys for one worker's field sequence. `tag` distinguishes fresh writes
// ('w') from pre-populated data ('p') in pattern B.
FieldKey derive_field_key(std::uint64_t seed, int repetition, char tag,
                          int node, int worker, int index);

// Seeded pseudorandom payload for one field. Payloads of 16 bytes or more
// carry a self-validating header: [key hash u64][length u32][crc32(body) u32]
// so concurrent readers can check integrity without a side channel.
Bytes make_payload(std::uint64_t seed, std::string_view serialized_key,
                   std::uint64_t size);
// Checks the embedded header; payloads under 16 bytes vacuously pass.
bool payload_checksum_ok(const Bytes& payload);

// ---------------------------------------------------------------------------
// Wave execution
//
// A wave releases a set of workers through one barrier and collects a
// TimingRecord per worker. Workers run setup before arriving at the barrier
// and timestamp their own start after release, so barrier latency is
// excluded from elapsed time.

struct PreparedWork {
  // Timed work; returns (bytes moved, ops completed).
  std::function<std::pair<std::uint64_t, std::uint64_t>()> run;
  // Runs after the clock stops; validation failures still abort the wave but
  // stay out of the measured window.
  std::function<void()> finish = [] {};
  // Optional post-run audit of store-level op counts.
  std::function<std::optional<OpCounts>()> audit = [] {
    return std::optional<OpCounts>{};
  };
};

struct WaveTask {
  int worker_id = 0;
  Phase phase = Phase::kWrite;
  // Runs inside the worker (thread or forked process) before the barrier.
  std::function<PreparedWork(Store&)> prepare;
};

struct WaveOutcome {
  std::vector<TimingRecord> records;
  double release = 0;  // barrier release, seconds since epoch
  std::map<std::pair<int, Phase>, OpCounts> audits;
};

using RunEpoch = std::chrono::steady_clock::time_point;

inline double seconds_since(RunEpoch epoch) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       epoch)
      .count();
}

class WaveRunner {
 public:
  // Thread-mode: all workers share one in-process store.
  WaveRunner(Store& shared_store, RunEpoch epoch, double timeout_s);
  // Process-mode: each forked worker opens the posix store at store_root;
  // records travel back through files under scratch_dir.
  WaveRunner(std::filesystem::path store_root,
             std::filesystem::path scratch_dir, RunEpoch epoch,
             double timeout_s);

  WaveOutcome run(const std::vector<WaveTask>& tasks);

 private:
  WaveOutcome run_threads(const std::vector<WaveTask>& tasks);
  WaveOutcome run_processes(const std::vector<WaveTask>& tasks);

  Store* shared_store_ = nullptr;
  std::filesystem::path store_root_;
  std::filesystem::path scratch_dir_;
  RunEpoch epoch_;
  double timeout_s_;
};

// ---------------------------------------------------------------------------
// Benchmark drivers

// Pattern A: all writers run in a barrier-released phase; once every writer
// has finished, paired readers run in a second phase.
std::vector<RunReport> run_pattern_a(const BenchmarkConfig& config);

// Pattern B: the store is pre-populated, then the writer half and the reader
// half of the nodes run concurrently off one shared barrier; readers target
// pre-populated keys only.
std::vector<RunReport> run_pattern_b(const BenchmarkConfig& config);

std::vector<RunReport> run_benchmark(const BenchmarkConfig& config);

}  // namespace fieldstore
