#include "fieldstore/harness.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "fieldstore/memory_backend.hpp"
#include "fieldstore/posix_backend.hpp"

namespace fs = std::filesystem;

namespace fieldstore {

std::string_view to_string(BackendKind b) {
  return b == BackendKind::kPosix ? "posix" : "memory";
}

BackendKind backend_from_string(std::string_view text) {
  if (text == "posix") return BackendKind::kPosix;
  if (text == "memory") return BackendKind::kMemory;
  throw std::invalid_argument("unknown backend: " + std::string(text));
}

void BenchmarkConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw HarnessError(HarnessErrorKind::kConfigInvalid, msg);
  };
  if (pattern != 'a' && pattern != 'b') fail("pattern must be 'a' or 'b'");
  if (nodes < 1) fail("nodes must be >= 1");
  if (workers_per_node < 1) fail("workers-per-node must be >= 1");
  if (iterations < 1) fail("iterations must be >= 1");
  if (repetitions < 1) fail("repetitions must be >= 1");
  if (pattern == 'b' && nodes % 2 != 0)
    fail("pattern b requires an even node count (half write, half read)");
  if (barrier_timeout_s <= 0) fail("barrier timeout must be positive");
  if (backend == BackendKind::kMemory &&
      effective_worker_model() == WorkerModel::kProcesses)
    fail("memory backend cannot be shared across OS processes; use threads");
  if (backend == BackendKind::kPosix && root.empty())
    fail("posix backend requires a store root");
}

ConfigEcho BenchmarkConfig::echo() const {
  ConfigEcho e;
  e.pattern = std::string(1, pattern);
  e.mode = std::string(to_string(mode));
  e.backend = std::string(to_string(backend));
  e.object_size_bytes = object_size;
  e.nodes = nodes;
  e.workers_per_node = workers_per_node;
  e.iterations = iterations;
  return e;
}

// ---------------------------------------------------------------------------
// Workload derivation

FieldKey derive_field_key(std::uint64_t seed, int repetition, char tag,
                          int node, int worker, int index) {
  FieldKey key;
  key.group = "s" + std::to_string(seed) + ".r" + std::to_string(repetition) +
              "." + std::string(1, tag) + ".n" + std::to_string(node) + ".w" +
              std::to_string(worker);
  key.name = "f" + std::to_string(index);
  return key;
}

Bytes make_payload(std::uint64_t seed, std::string_view serialized_key,
                   std::uint64_t size) {
  Bytes out(size);
  std::uint64_t key_hash = fnv1a64(serialized_key);
  Prng prng(seed ^ (key_hash * 0x9e3779b97f4a7c15ULL) ^ size);
  if (size < 16) {
    prng.fill(out.data(), out.size());
    return out;
  }
  prng.fill(out.data() + 16, out.size() - 16);
  std::uint32_t len32 = static_cast<std::uint32_t>(size);
  std::uint32_t body_crc = crc32(out.data() + 16, out.size() - 16);
  std::memcpy(out.data(), &key_hash, 8);
  std::memcpy(out.data() + 8, &len32, 4);
  std::memcpy(out.data() + 12, &body_crc, 4);
  return out;
}

bool payload_checksum_ok(const Bytes& payload) {
  if (payload.size() < 16) return true;
  std::uint32_t len32 = 0;
  std::uint32_t body_crc = 0;
  std::memcpy(&len32, payload.data() + 8, 4);
  std::memcpy(&body_crc, payload.data() + 12, 4);
  return len32 == static_cast<std::uint32_t>(payload.size()) &&
         body_crc == crc32(payload.data() + 16, payload.size() - 16);
}

// ---------------------------------------------------------------------------
// Wave runner

WaveRunner::WaveRunner(Store& shared_store, RunEpoch epoch, double timeout_s)
    : shared_store_(&shared_store), epoch_(epoch), timeout_s_(timeout_s) {}

WaveRunner::WaveRunner(fs::path store_root, fs::path scratch_dir,
                       RunEpoch epoch, double timeout_s)
    : store_root_(std::move(store_root)),
      scratch_dir_(std::move(scratch_dir)),
      epoch_(epoch),
      timeout_s_(timeout_s) {}

WaveOutcome WaveRunner::run(const std::vector<WaveTask>& tasks) {
  if (tasks.empty())
    throw HarnessError(HarnessErrorKind::kConfigInvalid, "empty wave");
  return shared_store_ ? run_threads(tasks) : run_processes(tasks);
}

namespace {

struct ThreadSync {
  std::mutex m;
  std::condition_variable cv;
  int arrived = 0;
  int failed = 0;
  bool released = false;
};

}  // namespace

WaveOutcome WaveRunner::run_threads(const std::vector<WaveTask>& tasks) {
  const int n = static_cast<int>(tasks.size());
  ThreadSync sync;
  std::vector<std::optional<TimingRecord>> records(tasks.size());
  std::vector<std::optional<OpCounts>> audits(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  auto timeout = std::chrono::duration<double>(timeout_s_);

  std::vector<std::thread> threads;
  threads.reserve(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    threads.emplace_back([&, i] {
      const WaveTask& task = tasks[i];
      try {
        PreparedWork work = task.prepare(*shared_store_);
        {
          std::unique_lock lock(sync.m);
          ++sync.arrived;
          sync.cv.notify_all();
          if (!sync.cv.wait_for(lock, timeout,
                                [&] { return sync.released; }))
            throw HarnessError(HarnessErrorKind::kBarrierTimeout,
                               "worker " + std::to_string(task.worker_id) +
                                   " timed out at barrier");
        }
        double t0 = seconds_since(epoch_);
        auto [bytes, ops] = work.run();
        double t1 = seconds_since(epoch_);
        work.finish();
        records[i] = TimingRecord{task.worker_id, task.phase, t0, t1, bytes,
                                  ops};
        audits[i] = work.audit();
      } catch (...) {
        errors[i] = std::current_exception();
        std::lock_guard lock(sync.m);
        ++sync.failed;
        sync.cv.notify_all();
      }
    });
  }

  double release_time = 0;
  bool timed_out = false;
  {
    std::unique_lock lock(sync.m);
    bool all = sync.cv.wait_for(
        lock, timeout, [&] { return sync.arrived + sync.failed >= n; });
    if (!all) timed_out = true;
    release_time = seconds_since(epoch_);
    sync.released = true;
    sync.cv.notify_all();
  }
  for (auto& t : threads) t.join();

  if (timed_out)
    throw HarnessError(HarnessErrorKind::kBarrierTimeout,
                       "not all workers reached the barrier within " +
                           std::to_string(timeout_s_) + " s");
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (errors[i]) {
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        throw HarnessError(HarnessErrorKind::kWorkerFailure,
                           "worker " + std::to_string(tasks[i].worker_id) +
                               " failed: " + e.what());
      }
    }
  }

  WaveOutcome outcome;
  outcome.release = release_time;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    outcome.records.push_back(*records[i]);
    if (audits[i])
      outcome.audits[{tasks[i].worker_id, tasks[i].phase}] = *audits[i];
  }
  return outcome;
}

namespace {

void write_whole_file(const fs::path& path, const std::string& content) {
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) return;
  ssize_t ignored = ::write(fd, content.data(), content.size());
  (void)ignored;
  ::close(fd);
}

std::string read_whole_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

[[noreturn]] void child_main(const WaveTask& task, const fs::path& store_root,
                             const fs::path& scratch_dir, RunEpoch epoch,
                             int arrive_fd, int release_fd) {
  std::string error;
  try {
    PosixStore store(store_root);
    PreparedWork work = task.prepare(store);

    char arrived = 'A';
    if (::write(arrive_fd, &arrived, 1) != 1)
      throw HarnessError(HarnessErrorKind::kWorkerFailure,
                         "barrier arrive pipe closed");
    char buf;
    ssize_t n;
    do {
      n = ::read(release_fd, &buf, 1);  // parent closing its end releases us
    } while (n < 0 && errno == EINTR);

    double t0 = seconds_since(epoch);
    auto [bytes, ops] = work.run();
    double t1 = seconds_since(epoch);
    work.finish();

    TimingRecord rec{task.worker_id, task.phase, t0, t1, bytes, ops};
    std::string out = format_record_line(rec) + "\n";
    if (auto counts = work.audit())
      out += format_audit_line(task.worker_id, task.phase, *counts) + "\n";
    write_whole_file(
        scratch_dir / ("w" + std::to_string(task.worker_id) + ".rec"), out);
    ::_exit(0);
  } catch (const std::exception& e) {
    error = e.what();
  } catch (...) {
    error = "unknown error";
  }
  write_whole_file(
      scratch_dir / ("w" + std::to_string(task.worker_id) + ".err"), error);
  char failed = 'E';
  ssize_t ignored = ::write(arrive_fd, &failed, 1);
  (void)ignored;
  ::_exit(1);
}

}  // namespace

WaveOutcome WaveRunner::run_processes(const std::vector<WaveTask>& tasks) {
  fs::create_directories(scratch_dir_);

  int arrive[2];
  int release[2];
  if (::pipe(arrive) != 0 || ::pipe(release) != 0)
    throw HarnessError(HarnessErrorKind::kSpawnFailure, "pipe failed");

  std::vector<pid_t> pids;
  pids.reserve(tasks.size());
  for (const auto& task : tasks) {
    pid_t pid = ::fork();
    if (pid < 0) {
      for (pid_t p : pids) ::kill(p, SIGKILL);
      for (pid_t p : pids) ::waitpid(p, nullptr, 0);
      throw HarnessError(HarnessErrorKind::kSpawnFailure,
                         std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
      ::close(arrive[0]);
      ::close(release[1]);
      child_main(task, store_root_, scratch_dir_, epoch_, arrive[1],
                 release[0]);
    }
    pids.push_back(pid);
  }
  ::close(arrive[1]);
  ::close(release[0]);

  auto kill_all = [&] {
    for (pid_t p : pids) ::kill(p, SIGKILL);
    for (pid_t p : pids) ::waitpid(p, nullptr, 0);
    ::close(arrive[0]);
    ::close(release[1]);
  };

  // Wait for every worker to arrive (or report a setup failure).
  std::size_t got = 0;
  bool setup_failed = false;
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration<double>(timeout_s_);
  while (got < tasks.size() && !setup_failed) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      kill_all();
      throw HarnessError(HarnessErrorKind::kBarrierTimeout,
                         "not all workers reached the barrier within " +
                             std::to_string(timeout_s_) + " s");
    }
    struct pollfd pfd{arrive[0], POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (rc <= 0) continue;
    char buf[64];
    ssize_t n = ::read(arrive[0], buf, sizeof(buf));
    for (ssize_t i = 0; i < n; ++i) {
      ++got;
      if (buf[i] == 'E') setup_failed = true;
    }
  }
  ::close(arrive[0]);

  if (setup_failed) {
    kill_all();
    std::string detail = "worker setup failed";
    for (const auto& task : tasks) {
      fs::path err =
          scratch_dir_ / ("w" + std::to_string(task.worker_id) + ".err");
      if (fs::exists(err)) {
        detail += "; worker " + std::to_string(task.worker_id) + ": " +
                  read_whole_file(err);
      }
    }
    throw HarnessError(HarnessErrorKind::kWorkerFailure, detail);
  }

  double release_time = seconds_since(epoch_);
  ::close(release[1]);  // EOF releases every worker at once

  std::string failures;
  for (std::size_t i = 0; i < pids.size(); ++i) {
    int status = 0;
    ::waitpid(pids[i], &status, 0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      int id = tasks[i].worker_id;
      fs::path err = scratch_dir_ / ("w" + std::to_string(id) + ".err");
      failures += "; worker " + std::to_string(id) + ": " +
                  (fs::exists(err) ? read_whole_file(err) : "crashed");
    }
  }
  if (!failures.empty())
    throw HarnessError(HarnessErrorKind::kWorkerFailure,
                       "run aborted, partial reports" + failures);

  WaveOutcome outcome;
  outcome.release = release_time;
  for (const auto& task : tasks) {
    fs::path rec =
        scratch_dir_ / ("w" + std::to_string(task.worker_id) + ".rec");
    std::ifstream in(rec);
    if (!in)
      throw HarnessError(HarnessErrorKind::kWorkerFailure,
                         "missing report from worker " +
                             std::to_string(task.worker_id));
    std::string line;
    while (std::getline(in, line)) {
      if (line.starts_with("REC ")) {
        outcome.records.push_back(parse_record_line(line));
      } else if (line.starts_with("AUD ")) {
        auto [worker, phase, counts] = parse_audit_line(line);
        outcome.audits[{worker, phase}] = counts;
      }
    }
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// Field I/O benchmark drivers

namespace {

struct FieldUnit {
  int node = 0;
  int worker = 0;
  int global_id = 0;
  Phase phase = Phase::kWrite;
  char tag = 'w';  // key group tag: 'w' fresh writes, 'p' pre-populated
};

WaveTask make_field_task(const BenchmarkConfig& config, int repetition,
                         const FieldUnit& unit) {
  WaveTask task;
  task.worker_id = unit.global_id;
  task.phase = unit.phase;
  task.prepare = [config, repetition, unit](Store& store) -> PreparedWork {
    auto session = std::make_shared<FieldioSession>(
        store, PoolName("bench"), config.mode, unit.node, unit.worker);
    // Payload generation and the expected-value copies for read validation
    // are client-side setup, so they happen before the barrier and stay out
    // of the timed window.
    auto keys = std::make_shared<std::vector<FieldKey>>();
    auto payloads = std::make_shared<std::vector<Bytes>>();
    for (int i = 0; i < config.iterations; ++i) {
      FieldKey key = derive_field_key(config.seed, repetition, unit.tag,
                                      unit.node, unit.worker, i);
      payloads->push_back(
          make_payload(config.seed, key.serialize(), config.object_size));
      keys->push_back(std::move(key));
    }
    PreparedWork work;
    // pre-sized destination buffers keep allocation out of the read loop
    auto read_back = std::make_shared<std::vector<Bytes>>();
    if (unit.phase == Phase::kRead)
      read_back->assign(config.iterations, Bytes(config.object_size));
    work.run = [config, unit, session, keys, payloads, read_back] {
      std::uint64_t bytes = 0;
      std::uint64_t ops = 0;
      for (int i = 0; i < config.iterations; ++i) {
        const FieldKey& key = (*keys)[i];
        if (unit.phase == Phase::kRead) {
          Bytes& data = (*read_back)[i];
          session->read_into(key, data);
          bytes += data.size();
        } else {
          session->write(key, (*payloads)[i]);
          bytes += config.object_size;
        }
        ++ops;
      }
      return std::make_pair(bytes, ops);
    };
    // Readers validate everything they fetched once the clock has stopped:
    // CRC over each payload body, then a full byte compare against the
    // expected data. A mismatch anywhere aborts the wave.
    if (unit.phase == Phase::kRead) {
      work.finish = [keys, payloads, read_back] {
        for (std::size_t i = 0; i < read_back->size(); ++i) {
          if (!payload_checksum_ok((*read_back)[i]))
            throw StoreError(ErrorKind::Corrupt,
                             "payload checksum failed for " +
                                 (*keys)[i].serialize());
          if ((*read_back)[i] != (*payloads)[i])
            throw StoreError(ErrorKind::Corrupt,
                             "payload differs from written data for " +
                                 (*keys)[i].serialize());
        }
        read_back->clear();
        read_back->shrink_to_fit();
      };
    }
    work.audit = [session] {
      return std::optional<OpCounts>(session->op_count_audit());
    };
    return work;
  };
  return task;
}

struct RepetitionContext {
  std::unique_ptr<MemoryStore> memory;
  std::unique_ptr<PosixStore> posix;
  Store* store = nullptr;
  fs::path store_root;
  fs::path scratch_dir;
  RunEpoch epoch;

  WaveRunner make_runner(const BenchmarkConfig& config, int wave_index) {
    if (config.effective_worker_model() == WorkerModel::kThreads)
      return WaveRunner(*store, epoch, config.barrier_timeout_s);
    return WaveRunner(store_root,
                      scratch_dir / ("wave" + std::to_string(wave_index)),
                      epoch, config.barrier_timeout_s);
  }
};

RepetitionContext open_repetition(const BenchmarkConfig& config,
                                  int repetition) {
  RepetitionContext ctx;
  if (config.backend == BackendKind::kPosix) {
    ctx.store_root = config.root / ("rep" + std::to_string(repetition));
    ctx.scratch_dir =
        config.root / ("rep" + std::to_string(repetition) + ".reports");
    ctx.posix = std::make_unique<PosixStore>(PosixStore::init(ctx.store_root));
    ctx.store = ctx.posix.get();
  } else {
    ctx.memory = std::make_unique<MemoryStore>();
    ctx.store = ctx.memory.get();
  }
  pool_create(*ctx.store, PoolName("bench"));
  ctx.epoch = std::chrono::steady_clock::now();
  return ctx;
}

void close_repetition(const BenchmarkConfig& config, RepetitionContext& ctx) {
  if (config.backend == BackendKind::kPosix && !config.keep_data) {
    std::error_code ec;
    fs::remove_all(ctx.store_root, ec);
    fs::remove_all(ctx.scratch_dir, ec);
  }
}

void merge_wave(RunReport& report, const WaveOutcome& outcome) {
  report.records.insert(report.records.end(), outcome.records.begin(),
                        outcome.records.end());
  for (const auto& [key, counts] : outcome.audits) report.audits[key] = counts;
}

}  // namespace

std::vector<RunReport> run_pattern_a(const BenchmarkConfig& config) {
  config.validate();
  std::vector<RunReport> reports;
  for (int rep = 0; rep < config.repetitions; ++rep) {
    RepetitionContext ctx = open_repetition(config, rep);
    RunReport report;
    report.config = config.echo();
    report.repetition = rep;

    std::vector<WaveTask> writers;
    std::vector<WaveTask> readers;
    for (int node = 0; node < config.nodes; ++node) {
      for (int w = 0; w < config.workers_per_node; ++w) {
        int gid = node * config.workers_per_node + w;
        writers.push_back(make_field_task(
            config, rep, {node, w, gid, Phase::kWrite, 'w'}));
        readers.push_back(
            make_field_task(config, rep, {node, w, gid, Phase::kRead, 'w'}));
      }
    }

    // Phase 1: all writers; phase 2 starts only after every writer finished.
    WaveOutcome write_wave = ctx.make_runner(config, 0).run(writers);
    report.release[Phase::kWrite] = write_wave.release;
    merge_wave(report, write_wave);

    WaveOutcome read_wave = ctx.make_runner(config, 1).run(readers);
    report.release[Phase::kRead] = read_wave.release;
    merge_wave(report, read_wave);

    close_repetition(config, ctx);
    reports.push_back(std::move(report));
  }
  return reports;
}

std::vector<RunReport> run_pattern_b(const BenchmarkConfig& config) {
  config.validate();
  std::vector<RunReport> reports;
  const int half = config.nodes / 2;
  for (int rep = 0; rep < config.repetitions; ++rep) {
    RepetitionContext ctx = open_repetition(config, rep);
    RunReport report;
    report.config = config.echo();
    report.repetition = rep;

    // Pre-populate the dataset the reader half will consume.
    std::vector<WaveTask> populate;
    for (int node = half; node < config.nodes; ++node) {
      for (int w = 0; w < config.workers_per_node; ++w) {
        int gid = node * config.workers_per_node + w;
        populate.push_back(make_field_task(
            config, rep, {node, w, gid, Phase::kPopulate, 'p'}));
      }
    }
    WaveOutcome populate_wave = ctx.make_runner(config, 0).run(populate);
    report.release[Phase::kPopulate] = populate_wave.release;
    merge_wave(report, populate_wave);

    // Writer half and reader half share one barrier and run concurrently.
    std::vector<WaveTask> mixed;
    for (int node = 0; node < half; ++node) {
      for (int w = 0; w < config.workers_per_node; ++w) {
        int gid = node * config.workers_per_node + w;
        mixed.push_back(
            make_field_task(config, rep, {node, w, gid, Phase::kWrite, 'w'}));
      }
    }
    for (int node = half; node < config.nodes; ++node) {
      for (int w = 0; w < config.workers_per_node; ++w) {
        int gid = node * config.workers_per_node + w;
        mixed.push_back(
            make_field_task(config, rep, {node, w, gid, Phase::kRead, 'p'}));
      }
    }
    WaveOutcome mixed_wave = ctx.make_runner(config, 1).run(mixed);
    report.release[Phase::kWrite] = mixed_wave.release;
    report.release[Phase::kRead] = mixed_wave.release;
    merge_wave(report, mixed_wave);

    close_repetition(config, ctx);
    reports.push_back(std::move(report));
  }
  return reports;
}

std::vector<RunReport> run_benchmark(const BenchmarkConfig& config) {
  return config.pattern == 'a' ? run_pattern_a(config)
                               : run_pattern_b(config);
}

}  // namespace fieldstore
