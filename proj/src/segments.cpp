#include "fieldstore/segments.hpp"

#include <cstring>
#include <memory>

#include "fieldstore/memory_backend.hpp"
#include "fieldstore/posix_backend.hpp"

namespace fs = std::filesystem;

namespace fieldstore {

void SegmentsConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw HarnessError(HarnessErrorKind::kConfigInvalid, msg);
  };
  if (segment_count < 1) fail("segment-count must be >= 1");
  if (segment_size < 1) fail("segment-size must be >= 1");
  if (workers < 1) fail("workers must be >= 1");
  if (repetitions < 1) fail("repetitions must be >= 1");
  if (barrier_timeout_s <= 0) fail("barrier timeout must be positive");
  if (backend == BackendKind::kMemory &&
      effective_worker_model() == WorkerModel::kProcesses)
    fail("memory backend cannot be shared across OS processes; use threads");
  if (backend == BackendKind::kPosix && root.empty())
    fail("posix backend requires a store root");
}

ConfigEcho SegmentsConfig::echo() const {
  ConfigEcho e;
  e.pattern = "segments";
  e.mode = "-";
  e.backend = std::string(to_string(backend));
  e.object_size_bytes = object_size();
  e.nodes = 1;
  e.workers_per_node = workers;
  e.iterations = 1;
  return e;
}

namespace {

constexpr const char* kPool = "bench";
constexpr const char* kContainer = "seg";

// The object is assembled segment by segment into a staging buffer before the
// timed region; the store sees exactly one operation.
Bytes assemble_object(const SegmentsConfig& config, int worker) {
  Bytes buffer(config.object_size());
  for (int s = 0; s < config.segment_count; ++s) {
    Prng prng(config.seed ^ (static_cast<std::uint64_t>(worker) << 32) ^
              static_cast<std::uint64_t>(s));
    prng.fill(buffer.data() + static_cast<std::uint64_t>(s) *
                                  config.segment_size,
              config.segment_size);
  }
  return buffer;
}

WaveTask make_segments_task(const SegmentsConfig& config, int worker,
                            Phase phase) {
  WaveTask task;
  task.worker_id = worker;
  task.phase = phase;
  task.prepare = [config, worker, phase](Store& store) -> PreparedWork {
    auto counted = std::make_shared<CountingStore>(store);
    try {
      counted->container_create(kPool, kContainer);
    } catch (const StoreError& e) {
      if (e.kind() != ErrorKind::AlreadyExists) throw;
    }
    counted->reset();
    ObjectId oid = ObjectId::user(0, static_cast<std::uint64_t>(worker));

    PreparedWork work;
    if (phase == Phase::kWrite) {
      auto buffer = std::make_shared<Bytes>(assemble_object(config, worker));
      work.run = [counted, oid, buffer] {
        counted->array_write(kPool, kContainer, oid, *buffer);
        return std::make_pair<std::uint64_t, std::uint64_t>(buffer->size(),
                                                            1);
      };
    } else {
      std::uint32_t expect_crc = crc32(assemble_object(config, worker));
      std::uint64_t expect_size = config.object_size();
      work.run = [counted, oid, expect_crc, expect_size] {
        Bytes data = counted->array_read(kPool, kContainer, oid);
        if (data.size() != expect_size || crc32(data) != expect_crc)
          throw StoreError(ErrorKind::Corrupt,
                           "segments object failed read-back check");
        return std::make_pair<std::uint64_t, std::uint64_t>(data.size(), 1);
      };
    }
    work.audit = [counted, phase]() -> std::optional<OpCounts> {
      const OpCounts& c = counted->counts();
      std::uint64_t store_ops = c.array_ops() + c.metadata_ops();
      if (store_ops != 1 || c.array_ops() != 1)
        throw StoreError(ErrorKind::IoFailure,
                         "segments phase issued " + std::to_string(store_ops) +
                             " store ops, expected exactly 1 array op");
      (void)phase;
      return c;
    };
    return work;
  };
  return task;
}

}  // namespace

std::vector<RunReport> run_segments(const SegmentsConfig& config) {
  config.validate();
  std::vector<RunReport> reports;
  for (int rep = 0; rep < config.repetitions; ++rep) {
    std::unique_ptr<MemoryStore> memory;
    std::unique_ptr<PosixStore> posix;
    Store* store = nullptr;
    fs::path store_root;
    fs::path scratch;
    if (config.backend == BackendKind::kPosix) {
      store_root = config.root / ("segrep" + std::to_string(rep));
      scratch = config.root / ("segrep" + std::to_string(rep) + ".reports");
      posix = std::make_unique<PosixStore>(PosixStore::init(store_root));
      store = posix.get();
    } else {
      memory = std::make_unique<MemoryStore>();
      store = memory.get();
    }
    pool_create(*store, PoolName(kPool));
    RunEpoch epoch = std::chrono::steady_clock::now();

    auto make_runner = [&](int wave) {
      if (config.effective_worker_model() == WorkerModel::kThreads)
        return WaveRunner(*store, epoch, config.barrier_timeout_s);
      return WaveRunner(store_root, scratch / ("wave" + std::to_string(wave)),
                        epoch, config.barrier_timeout_s);
    };

    RunReport report;
    report.config = config.echo();
    report.repetition = rep;

    std::vector<WaveTask> writers;
    std::vector<WaveTask> readers;
    for (int w = 0; w < config.workers; ++w) {
      writers.push_back(make_segments_task(config, w, Phase::kWrite));
      readers.push_back(make_segments_task(config, w, Phase::kRead));
    }

    WaveOutcome write_wave = make_runner(0).run(writers);
    report.release[Phase::kWrite] = write_wave.release;
    report.records.insert(report.records.end(), write_wave.records.begin(),
                          write_wave.records.end());
    for (const auto& [k, v] : write_wave.audits) report.audits[k] = v;

    WaveOutcome read_wave = make_runner(1).run(readers);
    report.release[Phase::kRead] = read_wave.release;
    report.records.insert(report.records.end(), read_wave.records.begin(),
                          read_wave.records.end());
    for (const auto& [k, v] : read_wave.audits) report.audits[k] = v;

    if (config.backend == BackendKind::kPosix && !config.keep_data) {
      std::error_code ec;
      fs::remove_all(store_root, ec);
      fs::remove_all(scratch, ec);
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace fieldstore
