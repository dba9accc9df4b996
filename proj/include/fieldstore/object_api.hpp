#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fieldstore/util.hpp"

namespace fieldstore {

// ---------------------------------------------------------------------------
// Errors

enum class ErrorKind {
  PoolNotFound,
  ContainerNotFound,
  ObjectNotFound,
  KeyNotFound,
  AlreadyExists,
  InvalidName,
  InvalidObjectId,
  IoFailure,
  Corrupt,
};

std::string_view to_string(ErrorKind kind);

class StoreError : public std::runtime_error {
 public:
  StoreError(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
        kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// ---------------------------------------------------------------------------
// Identifiers

// 128-bit object identifier. The high 32 bits are reserved for the backend
// and must be zero on user-constructed ids; the low 96 bits are user-managed.
class ObjectId {
 public:
  ObjectId() = default;

  // Builds an id from the 96 user-managed bits, split as top-32 / low-64.
  static ObjectId user(std::uint32_t top32, std::uint64_t low64) {
    ObjectId id;
    id.hi_ = top32;
    id.lo_ = low64;
    return id;
  }

  std::uint32_t reserved() const {
    return static_cast<std::uint32_t>(hi_ >> 32);
  }
  std::uint32_t user_top() const { return static_cast<std::uint32_t>(hi_); }
  std::uint64_t user_low() const { return lo_; }

  // Exactly 32 lowercase hex characters, big-endian, zero-padded.
  std::string render() const;
  // Inverse of render(); throws InvalidObjectId on malformed input.
  static ObjectId parse(std::string_view hex32);

  friend bool operator==(const ObjectId&, const ObjectId&) = default;
  friend auto operator<=>(const ObjectId&, const ObjectId&) = default;

 private:
  std::uint64_t hi_ = 0;  // [reserved 32 | user top 32]
  std::uint64_t lo_ = 0;  // user low 64
};

// Validated name usable as a path component: non-empty, <= 128 bytes,
// characters from [A-Za-z0-9._-] only.
class StoreName {
 public:
  explicit StoreName(std::string name);
  const std::string& str() const { return name_; }
  friend bool operator==(const StoreName&, const StoreName&) = default;
  friend auto operator<=>(const StoreName&, const StoreName&) = default;

  static bool is_valid(std::string_view name);

 private:
  std::string name_;
};

using PoolName = StoreName;
using ContainerName = StoreName;

// Artifact limits; oversize inputs fail with InvalidName / IoFailure.
inline constexpr std::size_t kMaxKeyEncodedBytes = 1024;
inline constexpr std::size_t kMaxKvValueBytes = 64ULL * 1024 * 1024;

// ---------------------------------------------------------------------------
// Backend contract
//
// Backends implement this flat interface; the handle types below provide the
// user-facing API and do the shared validation. All operations are
// individually atomic to observers; there are no cross-operation
// transactions. Implementations must be safe for concurrent use by multiple
// workers sharing one Store instance.

class Store {
 public:
  virtual ~Store() = default;

  virtual void pool_create(const std::string& pool) = 0;
  virtual bool pool_exists(const std::string& pool) = 0;

  virtual void container_create(const std::string& pool,
                                const std::string& cont) = 0;
  virtual bool container_exists(const std::string& pool,
                                const std::string& cont) = 0;
  virtual std::vector<std::string> container_list(const std::string& pool) = 0;

  virtual bool kv_object_exists(const std::string& pool,
                                const std::string& cont,
                                const ObjectId& oid) = 0;
  virtual void kv_put(const std::string& pool, const std::string& cont,
                      const ObjectId& oid, const std::string& key,
                      const Bytes& value) = 0;
  virtual Bytes kv_get(const std::string& pool, const std::string& cont,
                       const ObjectId& oid, const std::string& key) = 0;
  virtual bool kv_key_exists(const std::string& pool, const std::string& cont,
                             const ObjectId& oid, const std::string& key) = 0;

  virtual void array_write(const std::string& pool, const std::string& cont,
                           const ObjectId& oid, const Bytes& data) = 0;
  virtual Bytes array_read(const std::string& pool, const std::string& cont,
                           const ObjectId& oid) = 0;
  // Same read, but into a caller-provided buffer whose capacity is reused;
  // lets benchmark loops avoid a per-iteration allocation.
  virtual void array_read_into(const std::string& pool,
                               const std::string& cont, const ObjectId& oid,
                               Bytes& out) {
    out = array_read(pool, cont, oid);
  }
  virtual bool array_exists(const std::string& pool, const std::string& cont,
                            const ObjectId& oid) = 0;

  // Canonical sorted listing of the whole store, one entry per line:
  //   POOL <pool> 0 00000000
  //   CONT <pool>/<cont> 0 00000000
  //   KV <pool>/<cont>/<oid32hex>/<encoded-key> <length> <crc32hex>
  //   ARR <pool>/<cont>/<oid32hex> <length> <crc32hex>
  virtual std::string dump() = 0;
};

// ---------------------------------------------------------------------------
// Handles

class ContainerHandle;
class KvHandle;

class PoolHandle {
 public:
  PoolHandle(Store& store, PoolName name)
      : store_(&store), name_(std::move(name)) {}

  const PoolName& name() const { return name_; }
  Store& store() const { return *store_; }

  ContainerHandle container_create(const ContainerName& name) const;
  ContainerHandle container_open(const ContainerName& name) const;
  bool container_exists(const ContainerName& name) const;
  std::vector<std::string> container_list() const;

 private:
  Store* store_;
  PoolName name_;
};

class ContainerHandle {
 public:
  ContainerHandle(Store& store, PoolName pool, ContainerName name)
      : store_(&store), pool_(std::move(pool)), name_(std::move(name)) {}

  const PoolName& pool() const { return pool_; }
  const ContainerName& name() const { return name_; }

  KvHandle kv_open(const ObjectId& oid) const;
  bool kv_object_exists(const ObjectId& oid) const;

  void array_write(const ObjectId& oid, const Bytes& data) const;
  Bytes array_read(const ObjectId& oid) const;
  void array_read_into(const ObjectId& oid, Bytes& out) const;
  bool array_exists(const ObjectId& oid) const;

 private:
  Store* store_;
  PoolName pool_;
  ContainerName name_;
};

// KV objects materialize lazily on the first put; kv_open on a fresh oid is
// valid and kv_object_exists stays false until a put completes.
class KvHandle {
 public:
  KvHandle(Store& store, PoolName pool, ContainerName cont, ObjectId oid)
      : store_(&store),
        pool_(std::move(pool)),
        cont_(std::move(cont)),
        oid_(oid) {}

  const ObjectId& oid() const { return oid_; }

  void put(const std::string& key, const Bytes& value) const;
  Bytes get(const std::string& key) const;
  bool key_exists(const std::string& key) const;

 private:
  Store* store_;
  PoolName pool_;
  ContainerName cont_;
  ObjectId oid_;
};

// Second create of the same pool fails with AlreadyExists.
PoolHandle pool_create(Store& store, const PoolName& name);
PoolHandle pool_connect(Store& store, const PoolName& name);

// ---------------------------------------------------------------------------
// Instrumentation

struct OpCounts {
  std::uint64_t array_writes = 0;
  std::uint64_t array_reads = 0;
  std::uint64_t kv_puts = 0;
  std::uint64_t kv_gets = 0;
  std::uint64_t exist_checks = 0;
  std::uint64_t container_creates = 0;

  std::uint64_t array_ops() const { return array_writes + array_reads; }
  std::uint64_t metadata_ops() const {
    return kv_puts + kv_gets + exist_checks + container_creates;
  }
};

// Decorator counting every store-level call and recording the op sequence.
class CountingStore : public Store {
 public:
  explicit CountingStore(Store& inner) : inner_(&inner) {}

  const OpCounts& counts() const { return counts_; }
  const std::vector<std::string>& trace() const { return trace_; }
  void reset() {
    counts_ = {};
    trace_.clear();
  }

  void pool_create(const std::string& pool) override;
  bool pool_exists(const std::string& pool) override;
  void container_create(const std::string& pool,
                        const std::string& cont) override;
  bool container_exists(const std::string& pool,
                        const std::string& cont) override;
  std::vector<std::string> container_list(const std::string& pool) override;
  bool kv_object_exists(const std::string& pool, const std::string& cont,
                        const ObjectId& oid) override;
  void kv_put(const std::string& pool, const std::string& cont,
              const ObjectId& oid, const std::string& key,
              const Bytes& value) override;
  Bytes kv_get(const std::string& pool, const std::string& cont,
               const ObjectId& oid, const std::string& key) override;
  bool kv_key_exists(const std::string& pool, const std::string& cont,
                     const ObjectId& oid, const std::string& key) override;
  void array_write(const std::string& pool, const std::string& cont,
                   const ObjectId& oid, const Bytes& data) override;
  Bytes array_read(const std::string& pool, const std::string& cont,
                   const ObjectId& oid) override;
  void array_read_into(const std::string& pool, const std::string& cont,
                       const ObjectId& oid, Bytes& out) override;
  bool array_exists(const std::string& pool, const std::string& cont,
                    const ObjectId& oid) override;
  std::string dump() override { return inner_->dump(); }

 private:
  Store* inner_;
  OpCounts counts_;
  std::vector<std::string> trace_;
};

}  // namespace fieldstore
