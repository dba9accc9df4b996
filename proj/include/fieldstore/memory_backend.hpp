#pragma once

#include <map>
#include <mutex>
#include <string>

#include "fieldstore/object_api.hpp"

namespace fieldstore {

// In-memory reference implementation of the Store contract. Thread-safe
// within one process; not shareable across processes, so the harness runs
// memory-backend workers as threads only.
class MemoryStore : public Store {
 public:
  MemoryStore() = default;

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
  bool array_exists(const std::string& pool, const std::string& cont,
                    const ObjectId& oid) override;
  std::string dump() override;

 private:
  struct Container {
    std::map<ObjectId, std::map<std::string, Bytes>> kv_objects;
    std::map<ObjectId, Bytes> arrays;
  };
  using Pool = std::map<std::string, Container>;

  Pool& require_pool(const std::string& pool);
  Container& require_container(const std::string& pool,
                               const std::string& cont);

  std::mutex mutex_;
  std::map<std::string, Pool> pools_;
};

}  // namespace fieldstore
