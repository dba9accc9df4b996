#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "fieldstore/object_api.hpp"

namespace fieldstore {

enum class FieldioMode { kFull, kNoContainers };

std::string_view to_string(FieldioMode mode);
FieldioMode fieldio_mode_from_string(std::string_view text);

// Hierarchical key for one weather field: a group component that partitions
// the index (e.g. forecast step / parameter family) and a name unique within
// the group.
struct FieldKey {
  std::string group;
  std::string name;

  // `<enc(group)>:<enc(name)>`; the filename encoding keeps ':' out of the
  // components, so distinct keys serialize distinctly.
  std::string serialize() const;

  friend bool operator==(const FieldKey&, const FieldKey&) = default;
  friend auto operator<=>(const FieldKey&, const FieldKey&) = default;
};

// Pointer stored as an index value, linking an index entry to its target
// object. Wire format (exact): `cont=<name>;oid=<32hex>;len=<decimal>`.
struct ArrayLocator {
  std::string container;
  ObjectId oid;
  std::uint64_t length = 0;

  std::string serialize() const;
  static ArrayLocator parse(std::string_view text);  // throws Corrupt

  friend bool operator==(const ArrayLocator&, const ArrayLocator&) = default;
};

// Container / object naming for the two-level index. In full mode every
// worker gets an exclusive array container, every node a shared node index
// and all workers one global index; in no-containers mode a single shared
// container holds everything.
struct IndexTopology {
  FieldioMode mode = FieldioMode::kFull;

  std::string array_container(int node_id, int worker_id) const;
  std::string node_index_container(int node_id) const;
  std::string global_index_container() const;

  // Index KVs live in a reserved slice of the 96-bit user OID space so they
  // never collide with per-worker array OIDs.
  static ObjectId global_index_oid() { return ObjectId::user(0xffffffff, 0); }
  static ObjectId node_index_oid(int node_id) {
    return ObjectId::user(0xffffffff, 1 + static_cast<std::uint64_t>(node_id));
  }
  static ObjectId field_array_oid(int node_id, int worker_id,
                                  std::uint64_t sequence) {
    auto tag = static_cast<std::uint32_t>((node_id << 16) | worker_id);
    return ObjectId::user(tag, sequence);
  }
};

// One worker's view of the field store. Write path per field:
//   a) array write into the session's array container under a fresh OID,
//   b) existence check on the node index KV,
//   c) key put into the node index (serialized key -> array locator),
// plus a once-per-group idempotent registration of the node index in the
// global index. Read path: global index existence check, global get, node
// index existence check, node get, array read.
class FieldioSession {
 public:
  FieldioSession(Store& store, const PoolName& pool, FieldioMode mode,
                 int node_id, int worker_id);

  ArrayLocator write(const FieldKey& key, const Bytes& data);
  Bytes read(const FieldKey& key);
  // Same read path into a caller-provided buffer (capacity reused).
  void read_into(const FieldKey& key, Bytes& out);

  // Store-level operation counts issued by this session since open.
  OpCounts op_count_audit() const { return counted_.counts(); }
  const std::vector<std::string>& op_trace() const { return counted_.trace(); }
  void reset_audit() { counted_.reset(); }

  int node_id() const { return node_id_; }
  int worker_id() const { return worker_id_; }
  FieldioMode mode() const { return topology_.mode; }

 private:
  void create_container_idempotent(const std::string& name);

  CountingStore counted_;
  PoolName pool_;
  IndexTopology topology_;
  int node_id_;
  int worker_id_;
  std::uint64_t next_sequence_ = 0;
  std::set<std::string> written_keys_;
  std::set<std::string> registered_groups_;
};

}  // namespace fieldstore
