#include "fieldstore/object_api.hpp"

#include "fieldstore/key_codec.hpp"

namespace fieldstore {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PoolNotFound: return "PoolNotFound";
    case ErrorKind::ContainerNotFound: return "ContainerNotFound";
    case ErrorKind::ObjectNotFound: return "ObjectNotFound";
    case ErrorKind::KeyNotFound: return "KeyNotFound";
    case ErrorKind::AlreadyExists: return "AlreadyExists";
    case ErrorKind::InvalidName: return "InvalidName";
    case ErrorKind::InvalidObjectId: return "InvalidObjectId";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::Corrupt: return "Corrupt";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// ObjectId

std::string ObjectId::render() const {
  static const char* hex = "0123456789abcdef";
  std::string out(32, '0');
  std::uint64_t parts[2] = {hi_, lo_};
  for (int p = 0; p < 2; ++p) {
    std::uint64_t v = parts[p];
    for (int i = 15; i >= 0; --i) {
      out[p * 16 + i] = hex[v & 0xf];
      v >>= 4;
    }
  }
  return out;
}

ObjectId ObjectId::parse(std::string_view hex32) {
  if (hex32.size() != 32)
    throw StoreError(ErrorKind::InvalidObjectId,
                     "expected 32 hex chars, got '" + std::string(hex32) + "'");
  std::uint64_t parts[2] = {0, 0};
  for (int i = 0; i < 32; ++i) {
    char c = hex32[i];
    std::uint64_t nibble;
    if (c >= '0' && c <= '9')
      nibble = static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f')
      nibble = static_cast<std::uint64_t>(c - 'a' + 10);
    else
      throw StoreError(ErrorKind::InvalidObjectId,
                       "non-hex character in object id");
    parts[i / 16] = (parts[i / 16] << 4) | nibble;
  }
  ObjectId id;
  id.hi_ = parts[0];
  id.lo_ = parts[1];
  return id;
}

// ---------------------------------------------------------------------------
// Names

bool StoreName::is_valid(std::string_view name) {
  if (name.empty() || name.size() > 128) return false;
  for (char c : name) {
    bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
              (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

StoreName::StoreName(std::string name) : name_(std::move(name)) {
  if (!is_valid(name_))
    throw StoreError(ErrorKind::InvalidName, "invalid name '" + name_ + "'");
}

// ---------------------------------------------------------------------------
// Handles

PoolHandle pool_create(Store& store, const PoolName& name) {
  store.pool_create(name.str());
  return PoolHandle(store, name);
}

PoolHandle pool_connect(Store& store, const PoolName& name) {
  if (!store.pool_exists(name.str()))
    throw StoreError(ErrorKind::PoolNotFound, "pool '" + name.str() + "'");
  return PoolHandle(store, name);
}

ContainerHandle PoolHandle::container_create(const ContainerName& name) const {
  store_->container_create(name_.str(), name.str());
  return ContainerHandle(*store_, name_, name);
}

ContainerHandle PoolHandle::container_open(const ContainerName& name) const {
  if (!store_->container_exists(name_.str(), name.str()))
    throw StoreError(ErrorKind::ContainerNotFound,
                     "container '" + name.str() + "' in pool '" + name_.str() +
                         "'");
  return ContainerHandle(*store_, name_, name);
}

bool PoolHandle::container_exists(const ContainerName& name) const {
  return store_->container_exists(name_.str(), name.str());
}

std::vector<std::string> PoolHandle::container_list() const {
  return store_->container_list(name_.str());
}

KvHandle ContainerHandle::kv_open(const ObjectId& oid) const {
  if (oid.reserved() != 0)
    throw StoreError(ErrorKind::InvalidObjectId,
                     "reserved bits set in " + oid.render());
  return KvHandle(*store_, pool_, name_, oid);
}

bool ContainerHandle::kv_object_exists(const ObjectId& oid) const {
  return store_->kv_object_exists(pool_.str(), name_.str(), oid);
}

void ContainerHandle::array_write(const ObjectId& oid,
                                  const Bytes& data) const {
  if (oid.reserved() != 0)
    throw StoreError(ErrorKind::InvalidObjectId,
                     "reserved bits set in " + oid.render());
  store_->array_write(pool_.str(), name_.str(), oid, data);
}

Bytes ContainerHandle::array_read(const ObjectId& oid) const {
  return store_->array_read(pool_.str(), name_.str(), oid);
}

void ContainerHandle::array_read_into(const ObjectId& oid, Bytes& out) const {
  store_->array_read_into(pool_.str(), name_.str(), oid, out);
}

bool ContainerHandle::array_exists(const ObjectId& oid) const {
  return store_->array_exists(pool_.str(), name_.str(), oid);
}

void KvHandle::put(const std::string& key, const Bytes& value) const {
  if (key.empty()) throw StoreError(ErrorKind::InvalidName, "empty key");
  if (encode_key_filename(key).size() > kMaxKeyEncodedBytes)
    throw StoreError(ErrorKind::InvalidName, "key too long");
  if (value.size() > kMaxKvValueBytes)
    throw StoreError(ErrorKind::IoFailure, "value exceeds 64 MiB cap");
  store_->kv_put(pool_.str(), cont_.str(), oid_, key, value);
}

Bytes KvHandle::get(const std::string& key) const {
  return store_->kv_get(pool_.str(), cont_.str(), oid_, key);
}

bool KvHandle::key_exists(const std::string& key) const {
  return store_->kv_key_exists(pool_.str(), cont_.str(), oid_, key);
}

// ---------------------------------------------------------------------------
// CountingStore

void CountingStore::pool_create(const std::string& pool) {
  inner_->pool_create(pool);
}
bool CountingStore::pool_exists(const std::string& pool) {
  return inner_->pool_exists(pool);
}
void CountingStore::container_create(const std::string& pool,
                                     const std::string& cont) {
  ++counts_.container_creates;
  trace_.push_back("container_create");
  inner_->container_create(pool, cont);
}
bool CountingStore::container_exists(const std::string& pool,
                                     const std::string& cont) {
  ++counts_.exist_checks;
  trace_.push_back("container_exists");
  return inner_->container_exists(pool, cont);
}
std::vector<std::string> CountingStore::container_list(
    const std::string& pool) {
  return inner_->container_list(pool);
}
bool CountingStore::kv_object_exists(const std::string& pool,
                                     const std::string& cont,
                                     const ObjectId& oid) {
  ++counts_.exist_checks;
  trace_.push_back("kv_object_exists");
  return inner_->kv_object_exists(pool, cont, oid);
}
void CountingStore::kv_put(const std::string& pool, const std::string& cont,
                           const ObjectId& oid, const std::string& key,
                           const Bytes& value) {
  ++counts_.kv_puts;
  trace_.push_back("kv_put");
  inner_->kv_put(pool, cont, oid, key, value);
}
Bytes CountingStore::kv_get(const std::string& pool, const std::string& cont,
                            const ObjectId& oid, const std::string& key) {
  ++counts_.kv_gets;
  trace_.push_back("kv_get");
  return inner_->kv_get(pool, cont, oid, key);
}
bool CountingStore::kv_key_exists(const std::string& pool,
                                  const std::string& cont, const ObjectId& oid,
                                  const std::string& key) {
  ++counts_.exist_checks;
  trace_.push_back("kv_key_exists");
  return inner_->kv_key_exists(pool, cont, oid, key);
}
void CountingStore::array_write(const std::string& pool,
                                const std::string& cont, const ObjectId& oid,
                                const Bytes& data) {
  ++counts_.array_writes;
  trace_.push_back("array_write");
  inner_->array_write(pool, cont, oid, data);
}
Bytes CountingStore::array_read(const std::string& pool,
                                const std::string& cont, const ObjectId& oid) {
  ++counts_.array_reads;
  trace_.push_back("array_read");
  return inner_->array_read(pool, cont, oid);
}
void CountingStore::array_read_into(const std::string& pool,
                                    const std::string& cont,
                                    const ObjectId& oid, Bytes& out) {
  ++counts_.array_reads;
  trace_.push_back("array_read");
  inner_->array_read_into(pool, cont, oid, out);
}
bool CountingStore::array_exists(const std::string& pool,
                                 const std::string& cont,
                                 const ObjectId& oid) {
  ++counts_.exist_checks;
  trace_.push_back("array_exists");
  return inner_->array_exists(pool, cont, oid);
}

}  // namespace fieldstore
