#include "fieldstore/verify.hpp"

#include <filesystem>
#include <functional>
#include <random>

#include "fieldstore/fieldio.hpp"
#include "fieldstore/key_codec.hpp"
#include "fieldstore/memory_backend.hpp"

namespace fs = std::filesystem;

namespace fieldstore {

namespace {

// Outcome of one operation rendered for comparison.
std::string run_op(Store& store, const std::function<std::string(Store&)>& op) {
  try {
    return "ok:" + op(store);
  } catch (const StoreError& e) {
    return "err:" + std::string(to_string(e.kind()));
  }
}

std::string render_bytes(const Bytes& b) {
  return std::to_string(b.size()) + ":" + to_hex32(crc32(b));
}

struct FuzzUniverse {
  std::vector<std::string> pools{"p0", "p1"};
  std::vector<std::string> conts{"c0", "c1", "c2", "ghost"};
  std::vector<ObjectId> oids;
  std::vector<std::string> keys{"k0", "k1", "step.0012", "a/b c",
                                "key\x01with\xff bytes", "k-longer_name.x"};

  FuzzUniverse() {
    for (std::uint64_t i = 0; i < 6; ++i) oids.push_back(ObjectId::user(0, i));
    // one id with reserved bits set, rejected at kv_open/array_write
    oids.push_back(ObjectId::parse("0000000100000000000000000000002a"));
  }
};

}  // namespace

FuzzResult differential_fuzz(Store& subject, Store& oracle,
                             const FuzzOptions& options) {
  std::mt19937_64 rng(options.seed);
  FuzzUniverse u;
  FuzzResult result;

  auto pick = [&](const auto& v) -> const auto& {
    return v[rng() % v.size()];
  };

  for (std::uint64_t i = 0; i < options.ops; ++i) {
    int kind = static_cast<int>(rng() % 12);
    std::string pool = pick(u.pools);
    std::string cont = pick(u.conts);
    ObjectId oid = pick(u.oids);
    std::string key = pick(u.keys);
    Bytes value(rng() % 64);
    {
      Prng gen(rng());
      gen.fill(value.data(), value.size());
    }

    std::function<std::string(Store&)> op;
    std::string desc;
    switch (kind) {
      case 0:
        desc = "pool_create " + pool;
        op = [=](Store& s) {
          pool_create(s, PoolName(pool));
          return std::string("pool");
        };
        break;
      case 1:
        desc = "pool_connect " + pool;
        op = [=](Store& s) {
          auto h = pool_connect(s, PoolName(pool));
          auto list = h.container_list();
          std::string joined;
          for (const auto& c : list) joined += c + ",";
          return joined;
        };
        break;
      case 2:
        desc = "container_create " + pool + "/" + cont;
        op = [=](Store& s) {
          pool_connect(s, PoolName(pool))
              .container_create(ContainerName(cont));
          return std::string("cont");
        };
        break;
      case 3:
        desc = "container_open " + pool + "/" + cont;
        op = [=](Store& s) {
          pool_connect(s, PoolName(pool)).container_open(ContainerName(cont));
          return std::string("open");
        };
        break;
      case 4:
        desc = "container_exists " + pool + "/" + cont;
        op = [=](Store& s) {
          bool b = pool_connect(s, PoolName(pool))
                       .container_exists(ContainerName(cont));
          return std::string(b ? "true" : "false");
        };
        break;
      case 5:
        desc = "kv_put " + pool + "/" + cont + "/" + oid.render() + "/" +
               encode_key_filename(key);
        op = [=](Store& s) {
          pool_connect(s, PoolName(pool))
              .container_open(ContainerName(cont))
              .kv_open(oid)
              .put(key, value);
          return std::string("put");
        };
        break;
      case 6:
        desc = "kv_get " + pool + "/" + cont + "/" + oid.render() + "/" +
               encode_key_filename(key);
        op = [=](Store& s) {
          return render_bytes(pool_connect(s, PoolName(pool))
                                  .container_open(ContainerName(cont))
                                  .kv_open(oid)
                                  .get(key));
        };
        break;
      case 7:
        desc = "kv_key_exists";
        op = [=](Store& s) {
          bool b = pool_connect(s, PoolName(pool))
                       .container_open(ContainerName(cont))
                       .kv_open(oid)
                       .key_exists(key);
          return std::string(b ? "true" : "false");
        };
        break;
      case 8:
        desc = "kv_object_exists";
        op = [=](Store& s) {
          bool b = pool_connect(s, PoolName(pool))
                       .container_open(ContainerName(cont))
                       .kv_object_exists(oid);
          return std::string(b ? "true" : "false");
        };
        break;
      case 9:
        desc = "array_write " + pool + "/" + cont + "/" + oid.render();
        op = [=](Store& s) {
          pool_connect(s, PoolName(pool))
              .container_open(ContainerName(cont))
              .array_write(oid, value);
          return std::string("wrote");
        };
        break;
      case 10:
        desc = "array_read " + pool + "/" + cont + "/" + oid.render();
        op = [=](Store& s) {
          return render_bytes(pool_connect(s, PoolName(pool))
                                  .container_open(ContainerName(cont))
                                  .array_read(oid));
        };
        break;
      default:
        desc = "array_exists";
        op = [=](Store& s) {
          bool b = pool_connect(s, PoolName(pool))
                       .container_open(ContainerName(cont))
                       .array_exists(oid);
          return std::string(b ? "true" : "false");
        };
        break;
    }

    std::string got = run_op(subject, op);
    std::string want = run_op(oracle, op);
    ++result.executed;
    if (got != want) {
      ++result.divergences;
      if (result.diagnostics.size() < 20)
        result.diagnostics.push_back("op " + std::to_string(i) + " (" + desc +
                                     "): subject=" + got +
                                     " oracle=" + want);
    }
  }

  if (options.compare_dumps) {
    std::string got = subject.dump();
    std::string want = oracle.dump();
    if (got != want) {
      ++result.divergences;
      result.diagnostics.push_back("final dump listings differ");
    }
  }
  return result;
}

std::string fuzz_sequence_fingerprint(const FuzzOptions& options) {
  MemoryStore a;
  MemoryStore b;
  FuzzOptions opts = options;
  opts.compare_dumps = false;
  differential_fuzz(a, b, opts);
  return a.dump();
}

std::vector<std::string> check_store_consistency(PosixStore& store) {
  std::vector<std::string> problems;
  const fs::path& root = store.root();
  for (const auto& pool_entry : fs::directory_iterator(root)) {
    if (!pool_entry.is_directory()) continue;
    std::string pool = pool_entry.path().filename().string();
    for (const auto& cont_entry : fs::directory_iterator(pool_entry.path())) {
      if (!cont_entry.is_directory()) continue;
      for (const auto& obj_entry : fs::directory_iterator(cont_entry.path())) {
        std::string name = obj_entry.path().filename().string();
        if (!obj_entry.is_directory() || !name.ends_with(".kv")) continue;
        ObjectId kv_oid = ObjectId::parse(name.substr(0, name.size() - 3));
        for (const auto& key_entry :
             fs::directory_iterator(obj_entry.path())) {
          if (!key_entry.is_regular_file()) continue;
          std::string enc = key_entry.path().filename().string();
          if (enc.starts_with(".tmp.")) continue;
          std::string where = pool + "/" +
                              cont_entry.path().filename().string() + "/" +
                              kv_oid.render() + "/" + enc;
          Bytes value;
          try {
            value = store.kv_get(pool, cont_entry.path().filename().string(),
                                 kv_oid, decode_key_filename(enc));
          } catch (const StoreError&) {
            problems.push_back("Corrupt: unreadable key " + where);
            continue;
          }
          ArrayLocator loc;
          try {
            loc = ArrayLocator::parse(std::string_view(
                reinterpret_cast<const char*>(value.data()), value.size()));
          } catch (const StoreError&) {
            problems.push_back("Corrupt: unparseable locator at " + where);
            continue;
          }
          // Index entries for other KV objects (global index) carry len=0
          // and point at a .kv directory rather than an array.
          if (store.kv_object_exists(pool, loc.container, loc.oid)) continue;
          if (!store.array_exists(pool, loc.container, loc.oid)) {
            problems.push_back("Corrupt: dangling locator at " + where);
            continue;
          }
          Bytes data = store.array_read(pool, loc.container, loc.oid);
          if (data.size() != loc.length)
            problems.push_back(
                "Corrupt: array " + loc.oid.render() + " has " +
                std::to_string(data.size()) + " bytes, locator at " + where +
                " says " + std::to_string(loc.length));
        }
      }
    }
  }
  return problems;
}

AuditCheckResult check_fieldio_audits() {
  AuditCheckResult result;
  auto fail = [&](const std::string& msg) {
    result.ok = false;
    result.failures.push_back(msg);
  };

  auto workload = [](FieldioMode mode) {
    MemoryStore store;
    pool_create(store, PoolName("bench"));
    FieldioSession session(store, PoolName("bench"), mode, 0, 0);
    Bytes data(64, 0x5a);
    for (int i = 0; i < 10; ++i)
      session.write({"g0", "f" + std::to_string(i)}, data);
    return session.op_count_audit();
  };

  {
    MemoryStore store;
    pool_create(store, PoolName("bench"));
    FieldioSession session(store, PoolName("bench"), FieldioMode::kFull, 0, 0);
    session.reset_audit();
    session.write({"g0", "f0"}, Bytes(32, 1));
    std::vector<std::string> want = {"array_write", "kv_object_exists",
                                     "kv_put", "kv_put"};
    if (session.op_trace() != want)
      fail("first write trace is not array_write/kv_object_exists/kv_put "
           "plus global registration");
    session.reset_audit();
    session.write({"g0", "f1"}, Bytes(32, 1));
    want = {"array_write", "kv_object_exists", "kv_put"};
    if (session.op_trace() != want)
      fail("steady-state write trace is not array_write/kv_object_exists/"
           "kv_put");
    session.reset_audit();
    session.read({"g0", "f0"});
    want = {"kv_object_exists", "kv_get", "kv_object_exists", "kv_get",
            "array_read"};
    if (session.op_trace() != want)
      fail("read trace is not the exact 5-step sequence");
    OpCounts counts = session.op_count_audit();
    if (counts.kv_gets != 2 || counts.exist_checks != 2 ||
        counts.array_reads != 1 || counts.kv_puts != 0 ||
        counts.array_writes != 0)
      fail("read path did not issue exactly 2 gets + 2 existence checks + 1 "
           "array read");
  }

  {
    OpCounts full = workload(FieldioMode::kFull);
    OpCounts nc = workload(FieldioMode::kNoContainers);
    if (nc.metadata_ops() >= full.metadata_ops())
      fail("no-containers mode did not issue strictly fewer metadata ops");
  }
  return result;
}

}  // namespace fieldstore
