#include "fieldstore/memory_backend.hpp"

#include <algorithm>

#include "fieldstore/key_codec.hpp"

namespace fieldstore {

MemoryStore::Pool& MemoryStore::require_pool(const std::string& pool) {
  auto it = pools_.find(pool);
  if (it == pools_.end())
    throw StoreError(ErrorKind::PoolNotFound, "pool '" + pool + "'");
  return it->second;
}

MemoryStore::Container& MemoryStore::require_container(
    const std::string& pool, const std::string& cont) {
  Pool& p = require_pool(pool);
  auto it = p.find(cont);
  if (it == p.end())
    throw StoreError(ErrorKind::ContainerNotFound,
                     "container '" + cont + "' in pool '" + pool + "'");
  return it->second;
}

void MemoryStore::pool_create(const std::string& pool) {
  std::lock_guard lock(mutex_);
  auto [it, inserted] = pools_.try_emplace(pool);
  if (!inserted)
    throw StoreError(ErrorKind::AlreadyExists, "pool '" + pool + "'");
}

bool MemoryStore::pool_exists(const std::string& pool) {
  std::lock_guard lock(mutex_);
  return pools_.contains(pool);
}

void MemoryStore::container_create(const std::string& pool,
                                   const std::string& cont) {
  std::lock_guard lock(mutex_);
  Pool& p = require_pool(pool);
  auto [it, inserted] = p.try_emplace(cont);
  if (!inserted)
    throw StoreError(ErrorKind::AlreadyExists, "container '" + cont + "'");
}

bool MemoryStore::container_exists(const std::string& pool,
                                   const std::string& cont) {
  std::lock_guard lock(mutex_);
  return require_pool(pool).contains(cont);
}

std::vector<std::string> MemoryStore::container_list(const std::string& pool) {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [name, c] : require_pool(pool)) out.push_back(name);
  return out;
}

bool MemoryStore::kv_object_exists(const std::string& pool,
                                   const std::string& cont,
                                   const ObjectId& oid) {
  std::lock_guard lock(mutex_);
  return require_container(pool, cont).kv_objects.contains(oid);
}

void MemoryStore::kv_put(const std::string& pool, const std::string& cont,
                         const ObjectId& oid, const std::string& key,
                         const Bytes& value) {
  std::lock_guard lock(mutex_);
  require_container(pool, cont).kv_objects[oid][key] = value;
}

Bytes MemoryStore::kv_get(const std::string& pool, const std::string& cont,
                          const ObjectId& oid, const std::string& key) {
  std::lock_guard lock(mutex_);
  auto& kvs = require_container(pool, cont).kv_objects;
  auto obj = kvs.find(oid);
  if (obj != kvs.end()) {
    auto val = obj->second.find(key);
    if (val != obj->second.end()) return val->second;
  }
  throw StoreError(ErrorKind::KeyNotFound,
                   "key '" + key + "' in " + oid.render());
}

bool MemoryStore::kv_key_exists(const std::string& pool,
                                const std::string& cont, const ObjectId& oid,
                                const std::string& key) {
  std::lock_guard lock(mutex_);
  auto& kvs = require_container(pool, cont).kv_objects;
  auto obj = kvs.find(oid);
  return obj != kvs.end() && obj->second.contains(key);
}

void MemoryStore::array_write(const std::string& pool, const std::string& cont,
                              const ObjectId& oid, const Bytes& data) {
  std::lock_guard lock(mutex_);
  require_container(pool, cont).arrays[oid] = data;
}

Bytes MemoryStore::array_read(const std::string& pool, const std::string& cont,
                              const ObjectId& oid) {
  std::lock_guard lock(mutex_);
  auto& arrays = require_container(pool, cont).arrays;
  auto it = arrays.find(oid);
  if (it == arrays.end())
    throw StoreError(ErrorKind::ObjectNotFound, "array " + oid.render());
  return it->second;
}

bool MemoryStore::array_exists(const std::string& pool,
                               const std::string& cont, const ObjectId& oid) {
  std::lock_guard lock(mutex_);
  return require_container(pool, cont).arrays.contains(oid);
}

std::string MemoryStore::dump() {
  std::lock_guard lock(mutex_);
  std::vector<std::string> lines;
  for (const auto& [pool, conts] : pools_) {
    lines.push_back("POOL " + pool + " 0 00000000");
    for (const auto& [cont, c] : conts) {
      lines.push_back("CONT " + pool + "/" + cont + " 0 00000000");
      for (const auto& [oid, keys] : c.kv_objects) {
        for (const auto& [key, value] : keys) {
          lines.push_back("KV " + pool + "/" + cont + "/" + oid.render() +
                          "/" + encode_key_filename(key) + " " +
                          std::to_string(value.size()) + " " +
                          to_hex32(crc32(value)));
        }
      }
      for (const auto& [oid, data] : c.arrays) {
        lines.push_back("ARR " + pool + "/" + cont + "/" + oid.render() + " " +
                        std::to_string(data.size()) + " " +
                        to_hex32(crc32(data)));
      }
    }
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace fieldstore
