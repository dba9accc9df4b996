#pragma once

#include "fieldstore/harness.hpp"

namespace fieldstore {

// IOR-style bulk benchmark: every worker performs one large store operation
// per phase, the object assembled from segment-sized parts client-side.
struct SegmentsConfig {
  int segment_count = 100;
  std::uint64_t segment_size = 1024 * 1024;
  int workers = 1;
  int repetitions = 5;
  BackendKind backend = BackendKind::kPosix;
  std::filesystem::path root;
  std::uint64_t seed = 0;
  std::optional<WorkerModel> worker_model;
  double barrier_timeout_s = 60.0;
  bool keep_data = false;

  std::uint64_t object_size() const {
    return static_cast<std::uint64_t>(segment_count) * segment_size;
  }
  WorkerModel effective_worker_model() const {
    if (worker_model) return *worker_model;
    return backend == BackendKind::kPosix ? WorkerModel::kProcesses
                                          : WorkerModel::kThreads;
  }
  void validate() const;
  ConfigEcho echo() const;
};

// Write phase: one array_write of segment_count x segment_size bytes per
// worker, then a barrier, then a read phase with one array_read per worker.
// Workers audit themselves: more than one store-level array op per phase is
// a failure.
std::vector<RunReport> run_segments(const SegmentsConfig& config);

}  // namespace fieldstore
