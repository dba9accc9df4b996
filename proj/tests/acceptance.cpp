// End-to-end acceptance checks for the benchmark suite. Each numbered check
// prints one PASS/FAIL line; the process exits non-zero if any check fails.
//
// Store roots live on a tmpfs (/dev/shm) when available so the posix backend
// measurements are not bottlenecked by a slow disk.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "fieldstore/harness.hpp"
#include "fieldstore/memory_backend.hpp"
#include "fieldstore/metrics.hpp"
#include "fieldstore/posix_backend.hpp"
#include "fieldstore/segments.hpp"
#include "fieldstore/verify.hpp"

using namespace fieldstore;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kMiB = 1024 * 1024;

int g_failures = 0;

void report(int criterion, const std::string& name, bool ok,
            const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " " << criterion << " " << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!ok) ++g_failures;
}

fs::path pick_base_dir() {
  fs::path shm = "/dev/shm";
  std::error_code ec;
  if (fs::is_directory(shm, ec)) {
    fs::path probe = shm / ("fieldstore-probe-" + std::to_string(::getpid()));
    if (fs::create_directory(probe, ec) && !ec) {
      fs::remove(probe, ec);
      return shm;
    }
  }
  return fs::temp_directory_path();
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

std::string seconds(double s) {
  std::ostringstream out;
  out.precision(2);
  out << std::fixed << s << "s";
  return out.str();
}

// --- 1: backend equivalence under a long random op sequence ----------------

void criterion_1(const fs::path& base) {
  Timer timer;
  std::string detail;
  bool ok = false;
  try {
    fs::path root = base / "accept-fuzz";
    fs::remove_all(root);
    fs::create_directories(root);
    PosixStore posix = PosixStore::init(root);
    MemoryStore memory;
    FuzzOptions options;
    options.ops = 10000;
    options.seed = 20260823;
    FuzzResult result = differential_fuzz(posix, memory, options);
    double t = timer.elapsed();
    ok = result.ok() && result.executed == 10000 && t < 60.0;
    detail = "10000 ops, " + std::to_string(result.divergences) +
             " divergences, " + seconds(t);
    if (!result.diagnostics.empty()) detail += "; " + result.diagnostics[0];
    fs::remove_all(root);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(1, "backend-differential-equivalence", ok, detail);
}

// --- 2: pattern A round trip at the reference desk-scale configuration -----

void criterion_2(const fs::path& base) {
  Timer timer;
  std::string detail;
  bool ok = false;
  try {
    fs::path root = base / "accept-pattern-a";
    fs::remove_all(root);
    fs::create_directories(root);
    BenchmarkConfig config;
    config.pattern = 'a';
    config.backend = BackendKind::kPosix;
    config.root = root;
    config.nodes = 2;
    config.workers_per_node = 4;
    config.iterations = 100;
    config.object_size = kMiB;
    config.repetitions = 5;
    config.seed = 1;
    // run_pattern_a throws if any read returns data that is not byte-identical
    // to what the paired writer stored (checksum + full compare in-worker)
    std::vector<RunReport> reports = run_pattern_a(config);
    double t = timer.elapsed();

    bool phases_ordered = reports.size() == 5;
    for (const auto& rep : reports) {
      double max_write_end = 0;
      double min_read_start = 1e300;
      for (const auto& r : rep.records) {
        if (r.phase == Phase::kWrite)
          max_write_end = std::max(max_write_end, r.end);
        if (r.phase == Phase::kRead)
          min_read_start = std::min(min_read_start, r.start);
      }
      if (min_read_start < max_write_end) phases_ordered = false;
    }
    ok = phases_ordered && t < 120.0;
    detail = "5 reps, 8 workers, 100 x 1 MiB each, reads verified, " +
             std::string(phases_ordered ? "read-after-write ordered"
                                        : "PHASE ORDER VIOLATED") +
             ", " + seconds(t);
    fs::remove_all(root);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(2, "pattern-a-round-trip", ok, detail);
}

// --- 3: exact operation sequences on the write and read paths --------------

void criterion_3() {
  std::string detail;
  bool ok = false;
  try {
    AuditCheckResult result = check_fieldio_audits();
    ok = result.ok;
    detail = ok ? "write a-c and read 2 gets + 2 existence checks + 1 array "
                  "read, exact traces"
                : result.failures.front();
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(3, "operation-sequence-fidelity", ok, detail);
}

// --- 4: container layout per mode, checked by tree walk --------------------

void criterion_4(const fs::path& base) {
  std::string detail;
  bool ok = false;
  try {
    auto run_and_walk = [&](FieldioMode mode) {
      fs::path root = base / "accept-layout";
      fs::remove_all(root);
      fs::create_directories(root);
      BenchmarkConfig config;
      config.backend = BackendKind::kPosix;
      config.root = root;
      config.mode = mode;
      config.nodes = 2;
      config.workers_per_node = 3;
      config.iterations = 4;
      config.object_size = 4096;
      config.repetitions = 1;
      config.keep_data = true;
      run_pattern_a(config);

      // walk <root>/rep0/bench: count containers and locate every .arr file
      fs::path pool_dir = root / "rep0" / "bench";
      int containers = 0;
      int arr_containers = 0;
      std::size_t arr_files = 0;
      std::size_t arr_files_in_shared = 0;
      for (const auto& cont : fs::directory_iterator(pool_dir)) {
        if (!cont.is_directory()) continue;
        ++containers;
        bool holds_arrays = false;
        for (const auto& entry : fs::directory_iterator(cont.path())) {
          if (entry.path().extension() == ".arr") {
            holds_arrays = true;
            ++arr_files;
            if (cont.path().filename() == "shared") ++arr_files_in_shared;
          }
        }
        if (holds_arrays) ++arr_containers;
      }
      fs::remove_all(root);
      return std::tuple{containers, arr_containers, arr_files,
                        arr_files_in_shared};
    };

    auto [nc_containers, nc_arr_containers, nc_files, nc_shared] =
        run_and_walk(FieldioMode::kNoContainers);
    auto [full_containers, full_arr_containers, full_files, full_shared] =
        run_and_walk(FieldioMode::kFull);
    (void)full_shared;

    bool nc_ok = nc_containers == 1 && nc_arr_containers == 1 &&
                 nc_files == 24 && nc_shared == 24;  // 6 workers x 4 fields
    bool full_ok = full_arr_containers == 2 * 3 && full_files == 24;
    ok = nc_ok && full_ok;
    detail = "no-containers: " + std::to_string(nc_containers) +
             " container / " + std::to_string(nc_files) +
             " arrays; full: " + std::to_string(full_arr_containers) +
             " array containers (want 6)";
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(4, "mode-layout-conformance", ok, detail);
}

// --- 5: bandwidth metrics against closed-form fixtures ---------------------

void criterion_5() {
  std::string detail;
  bool ok = false;
  try {
    auto rec = [](double start, double end, std::uint64_t bytes) {
      return TimingRecord{0, Phase::kWrite, start, end, bytes, 1};
    };
    auto rel_err = [](double got, double want) {
      return std::fabs(got - want) / want;
    };

    // two workers, [0,10] and [2,10], 100 MiB each -> 20 MiB/s global timing
    std::vector<TimingRecord> global_fix{rec(0.0, 10.0, 100 * kMiB),
                                         rec(2.0, 10.0, 100 * kMiB)};
    double global_bw = global_timing_bandwidth(global_fix).bandwidth;

    // two workers released at 0, ends 8 and 10, 100 MiB each -> 20 MiB/s sync
    std::vector<TimingRecord> sync_fix{rec(1.0, 8.0, 100 * kMiB),
                                       rec(0.5, 10.0, 100 * kMiB)};
    double sync_bw = synchronous_bandwidth(sync_fix, 0.0).bandwidth;

    // uneven fixture: 64 MiB in [1, 5] + 32 MiB in [2, 9] -> 96 MiB / 8 s
    std::vector<TimingRecord> uneven{rec(1.0, 5.0, 64 * kMiB),
                                     rec(2.0, 9.0, 32 * kMiB)};
    double uneven_bw = global_timing_bandwidth(uneven).bandwidth;

    double e1 = rel_err(global_bw, 20.0 * kMiB);
    double e2 = rel_err(sync_bw, 20.0 * kMiB);
    double e3 = rel_err(uneven_bw, 12.0 * kMiB);
    ok = e1 < 1e-9 && e2 < 1e-9 && e3 < 1e-9;
    std::ostringstream d;
    d.precision(3);
    d << "relative errors " << e1 << ", " << e2 << ", " << e3 << " (< 1e-9)";
    detail = d.str();
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(5, "metric-closed-form-correctness", ok, detail);
}

// --- 6: segments identity at defaults ---------------------------------------

void criterion_6(const fs::path& base) {
  std::string detail;
  bool ok = false;
  try {
    fs::path root = base / "accept-segments";
    fs::remove_all(root);
    fs::create_directories(root);
    SegmentsConfig config;  // defaults: 100 segments x 1 MiB
    config.backend = BackendKind::kPosix;
    config.root = root;
    config.workers = 2;
    config.repetitions = 1;
    config.keep_data = true;
    std::vector<RunReport> reports = run_segments(config);

    std::size_t objects = 0;
    bool sizes_exact = true;
    for (const auto& entry :
         fs::recursive_directory_iterator(root / "segrep0")) {
      if (entry.path().extension() != ".arr") continue;
      ++objects;
      if (fs::file_size(entry.path()) != 104857600) sizes_exact = false;
    }

    bool audits_exact = reports.size() == 1 && reports[0].audits.size() == 4;
    for (const auto& [key, counts] : reports[0].audits) {
      if (counts.array_ops() != 1 ||
          counts.array_ops() + counts.metadata_ops() != 1)
        audits_exact = false;
      if (key.second == Phase::kWrite && counts.array_writes != 1)
        audits_exact = false;
      if (key.second == Phase::kRead && counts.array_reads != 1)
        audits_exact = false;
    }
    ok = objects == 2 && sizes_exact && audits_exact;
    detail = std::to_string(objects) +
             " objects of exactly 104857600 bytes, one array op per worker "
             "per phase";
    if (!sizes_exact) detail = "object size mismatch";
    if (!audits_exact) detail += "; audit mismatch";
    fs::remove_all(root);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(6, "segments-identity", ok, detail);
}

// --- 7: pattern B concurrency plus atomic-visibility stress -----------------

void criterion_7(const fs::path& base) {
  std::string detail;
  bool ok = false;
  try {
    fs::path root = base / "accept-pattern-b";
    fs::remove_all(root);
    fs::create_directories(root);
    BenchmarkConfig config;
    config.pattern = 'b';
    config.backend = BackendKind::kPosix;
    config.root = root;
    config.nodes = 2;
    config.workers_per_node = 2;
    config.iterations = 50;
    config.object_size = kMiB;
    config.repetitions = 3;
    config.seed = 2;
    // readers validate every payload; Corrupt anywhere aborts the run
    std::vector<RunReport> reports = run_pattern_b(config);

    bool overlap_every_rep = reports.size() == 3;
    for (const auto& rep : reports) {
      double w_start = 1e300, w_end = 0, r_start = 1e300, r_end = 0;
      for (const auto& r : rep.records) {
        if (r.phase == Phase::kWrite) {
          w_start = std::min(w_start, r.start);
          w_end = std::max(w_end, r.end);
        } else if (r.phase == Phase::kRead) {
          r_start = std::min(r_start, r.start);
          r_end = std::max(r_end, r.end);
        }
      }
      if (!(w_start < r_end && r_start < w_end)) overlap_every_rep = false;
    }
    fs::remove_all(root);

    // atomic-visibility stress: 8 writers x 100 overwrites on one hot key
    // with a concurrent checksumming reader; a torn read counts as Corrupt
    fs::path stress_root = base / "accept-stress";
    fs::remove_all(stress_root);
    fs::create_directories(stress_root);
    PosixStore store = PosixStore::init(stress_root);
    KvHandle kv = pool_create(store, PoolName("p"))
                      .container_create(ContainerName("c"))
                      .kv_open(ObjectId::user(0, 1));
    auto make_value = [](std::uint64_t seed) {
      Bytes body(512);
      Prng(seed).fill(body.data(), body.size());
      std::uint32_t crc = crc32(body);
      Bytes value(4);
      std::memcpy(value.data(), &crc, 4);
      value.insert(value.end(), body.begin(), body.end());
      return value;
    };
    kv.put("hot", make_value(0));
    std::atomic<bool> stop{false};
    std::atomic<int> torn{0};
    std::thread reader([&] {
      while (!stop) {
        Bytes v = kv.get("hot");
        if (v.size() < 4) {
          ++torn;
          continue;
        }
        std::uint32_t want = 0;
        std::memcpy(&want, v.data(), 4);
        if (crc32(v.data() + 4, v.size() - 4) != want) ++torn;
      }
    });
    std::vector<std::thread> writers;
    for (int w = 0; w < 8; ++w)
      writers.emplace_back([&, w] {
        for (int i = 0; i < 100; ++i)
          kv.put("hot", make_value(static_cast<std::uint64_t>(w) * 1000 + i));
      });
    for (auto& t : writers) t.join();
    stop = true;
    reader.join();
    fs::remove_all(stress_root);

    ok = overlap_every_rep && torn == 0;
    detail = std::string(overlap_every_rep ? "write/read overlap in all 3 reps"
                                           : "NO OVERLAP") +
             ", all reads verified, " + std::to_string(torn.load()) +
             " torn reads under 8x100 overwrites";
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(7, "pattern-b-concurrency", ok, detail);
}

// --- 8: metadata cost direction between modes --------------------------------

void criterion_8() {
  std::string detail;
  bool ok = false;
  try {
    auto workload = [](FieldioMode mode) {
      MemoryStore store;
      pool_create(store, PoolName("bench"));
      FieldioSession session(store, PoolName("bench"), mode, 0, 0);
      Bytes data(4096, 0x5a);
      for (int i = 0; i < 100; ++i)
        session.write(FieldKey{"g", "f" + std::to_string(i)}, data);
      return session.op_count_audit();
    };
    OpCounts full = workload(FieldioMode::kFull);
    OpCounts flat = workload(FieldioMode::kNoContainers);
    double per_write_full = full.metadata_ops() / 100.0;
    double per_write_flat = flat.metadata_ops() / 100.0;
    ok = flat.metadata_ops() < full.metadata_ops() &&
         flat.array_writes == full.array_writes;
    std::ostringstream d;
    d << "metadata ops per write: no-containers " << per_write_flat
      << " < full " << per_write_full;
    detail = d.str();
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(8, "metadata-cost-direction", ok, detail);
}

// --- 9: object-size sweep direction ------------------------------------------

void criterion_9(const fs::path& base) {
  Timer timer;
  std::string detail;
  bool ok = false;
  try {
    std::vector<std::uint64_t> sizes{1 * kMiB, 5 * kMiB, 10 * kMiB, 20 * kMiB};
    std::map<Phase, std::vector<double>> series;  // mean bandwidth per size
    for (std::uint64_t size : sizes) {
      fs::path root = base / "accept-sweep";
      fs::remove_all(root);
      fs::create_directories(root);
      BenchmarkConfig config;
      config.backend = BackendKind::kPosix;
      config.root = root;
      config.nodes = 1;
      config.workers_per_node = 2;
      // equal byte budget per worker across sizes, so per-object overhead
      // dominates the comparison rather than raw copy throughput
      config.iterations =
          static_cast<int>(std::max<std::uint64_t>(8, 96 * kMiB / size));
      config.object_size = size;
      config.repetitions = 8;
      config.seed = 3;
      std::vector<RunReport> reports = run_pattern_a(config);
      for (Phase phase : {Phase::kWrite, Phase::kRead}) {
        std::vector<double> values;
        for (const auto& rep : reports) {
          std::vector<TimingRecord> recs;
          for (const auto& r : rep.records)
            if (r.phase == phase) recs.push_back(r);
          values.push_back(global_timing_bandwidth(recs).bandwidth);
        }
        series[phase].push_back(aggregate(values).mean);
      }
      fs::remove_all(root);
    }

    bool four_points = series[Phase::kWrite].size() == 4 &&
                       series[Phase::kRead].size() == 4;
    bool write_up = series[Phase::kWrite][1] > series[Phase::kWrite][0];
    bool read_up = series[Phase::kRead][1] > series[Phase::kRead][0];
    ok = four_points && write_up && read_up;
    std::ostringstream d;
    d.precision(1);
    d << std::fixed << "write MiB/s over {1,5,10,20} MiB: ";
    for (double v : series[Phase::kWrite]) d << v / kMiB << " ";
    d << "| read: ";
    for (double v : series[Phase::kRead]) d << v / kMiB << " ";
    d << "| 5 MiB > 1 MiB for both phases: "
      << (write_up && read_up ? "yes" : "NO") << ", " << seconds(timer.elapsed());
    detail = d.str();
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(9, "object-size-sweep-direction", ok, detail);
}

}  // namespace

int main() {
  fs::path base = pick_base_dir() /
                  ("fieldstore-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(base);
  std::cout << "store roots under " << base << std::endl;

  criterion_1(base);
  criterion_2(base);
  criterion_3();
  criterion_4(base);
  criterion_5();
  criterion_6(base);
  criterion_7(base);
  criterion_8();
  criterion_9(base);

  std::error_code ec;
  fs::remove_all(base, ec);

  if (g_failures > 0) {
    std::cout << g_failures << " criteria FAILED" << std::endl;
    return 1;
  }
  std::cout << "all 9 criteria passed" << std::endl;
  return 0;
}
