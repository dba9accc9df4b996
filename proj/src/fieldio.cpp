#include "fieldstore/fieldio.hpp"

#include <charconv>

#include "fieldstore/key_codec.hpp"

namespace fieldstore {

std::string_view to_string(FieldioMode mode) {
  return mode == FieldioMode::kFull ? "full" : "no-containers";
}

FieldioMode fieldio_mode_from_string(std::string_view text) {
  if (text == "full") return FieldioMode::kFull;
  if (text == "no-containers" || text == "no_containers")
    return FieldioMode::kNoContainers;
  throw std::invalid_argument("unknown fieldio mode: " + std::string(text));
}

std::string FieldKey::serialize() const {
  return encode_key_filename(group) + ":" + encode_key_filename(name);
}

std::string ArrayLocator::serialize() const {
  return "cont=" + container + ";oid=" + oid.render() + ";len=" +
         std::to_string(length);
}

ArrayLocator ArrayLocator::parse(std::string_view text) {
  auto fail = [&] {
    throw StoreError(ErrorKind::Corrupt,
                     "malformed locator '" + std::string(text) + "'");
  };
  if (!text.starts_with("cont=")) fail();
  std::size_t semi1 = text.find(';');
  if (semi1 == std::string_view::npos) fail();
  std::string_view cont = text.substr(5, semi1 - 5);
  std::string_view rest = text.substr(semi1 + 1);
  if (!rest.starts_with("oid=")) fail();
  std::size_t semi2 = rest.find(';');
  if (semi2 == std::string_view::npos) fail();
  std::string_view oid_hex = rest.substr(4, semi2 - 4);
  std::string_view len_part = rest.substr(semi2 + 1);
  if (!len_part.starts_with("len=")) fail();
  std::string_view len_text = len_part.substr(4);
  ArrayLocator loc;
  if (!StoreName::is_valid(cont)) fail();
  loc.container = std::string(cont);
  try {
    loc.oid = ObjectId::parse(oid_hex);
  } catch (const StoreError&) {
    fail();
  }
  auto [ptr, ec] = std::from_chars(
      len_text.data(), len_text.data() + len_text.size(), loc.length);
  if (ec != std::errc() || ptr != len_text.data() + len_text.size()) fail();
  return loc;
}

std::string IndexTopology::array_container(int node_id, int worker_id) const {
  if (mode == FieldioMode::kNoContainers) return "shared";
  return "arr.n" + std::to_string(node_id) + ".w" + std::to_string(worker_id);
}

std::string IndexTopology::node_index_container(int node_id) const {
  if (mode == FieldioMode::kNoContainers) return "shared";
  return "idx.n" + std::to_string(node_id);
}

std::string IndexTopology::global_index_container() const {
  if (mode == FieldioMode::kNoContainers) return "shared";
  return "idx.global";
}

FieldioSession::FieldioSession(Store& store, const PoolName& pool,
                               FieldioMode mode, int node_id, int worker_id)
    : counted_(store),
      pool_(pool),
      topology_{mode},
      node_id_(node_id),
      worker_id_(worker_id) {
  if (mode == FieldioMode::kNoContainers) {
    create_container_idempotent("shared");
  } else {
    create_container_idempotent(topology_.array_container(node_id, worker_id));
    create_container_idempotent(topology_.node_index_container(node_id));
    create_container_idempotent(topology_.global_index_container());
  }
}

void FieldioSession::create_container_idempotent(const std::string& name) {
  try {
    counted_.container_create(pool_.str(), name);
  } catch (const StoreError& e) {
    if (e.kind() != ErrorKind::AlreadyExists) throw;
  }
}

ArrayLocator FieldioSession::write(const FieldKey& key, const Bytes& data) {
  std::string serialized = key.serialize();
  if (!written_keys_.insert(serialized).second)
    throw StoreError(ErrorKind::AlreadyExists,
                     "field '" + serialized + "' already written");

  std::string array_cont = topology_.array_container(node_id_, worker_id_);
  std::string node_cont = topology_.node_index_container(node_id_);
  ObjectId node_oid = IndexTopology::node_index_oid(node_id_);
  ObjectId array_oid =
      IndexTopology::field_array_oid(node_id_, worker_id_, next_sequence_++);

  // a) array write, worker-exclusive container in full mode
  counted_.array_write(pool_.str(), array_cont, array_oid, data);
  // b) node index existence check (the KV materializes lazily on first put)
  counted_.kv_object_exists(pool_.str(), node_cont, node_oid);
  // c) index entry
  ArrayLocator locator{array_cont, array_oid, data.size()};
  std::string loc_text = locator.serialize();
  counted_.kv_put(pool_.str(), node_cont, node_oid, serialized,
                  Bytes(loc_text.begin(), loc_text.end()));

  // Register this node's index for the group, once per session per group.
  if (registered_groups_.insert(key.group).second) {
    ArrayLocator node_loc{node_cont, node_oid, 0};
    std::string node_loc_text = node_loc.serialize();
    counted_.kv_put(pool_.str(), topology_.global_index_container(),
                    IndexTopology::global_index_oid(),
                    encode_key_filename(key.group),
                    Bytes(node_loc_text.begin(), node_loc_text.end()));
  }
  return locator;
}

Bytes FieldioSession::read(const FieldKey& key) {
  Bytes out;
  read_into(key, out);
  return out;
}

void FieldioSession::read_into(const FieldKey& key, Bytes& out) {
  std::string global_cont = topology_.global_index_container();
  ObjectId global_oid = IndexTopology::global_index_oid();

  // a) global index existence check
  counted_.kv_object_exists(pool_.str(), global_cont, global_oid);
  // b) group -> node index locator
  Bytes node_loc_bytes = counted_.kv_get(pool_.str(), global_cont, global_oid,
                                         encode_key_filename(key.group));
  ArrayLocator node_loc = ArrayLocator::parse(
      std::string_view(reinterpret_cast<const char*>(node_loc_bytes.data()),
                       node_loc_bytes.size()));
  // c) node index existence check
  counted_.kv_object_exists(pool_.str(), node_loc.container, node_loc.oid);
  // d) full key -> array locator
  Bytes loc_bytes = counted_.kv_get(pool_.str(), node_loc.container,
                                    node_loc.oid, key.serialize());
  ArrayLocator locator = ArrayLocator::parse(std::string_view(
      reinterpret_cast<const char*>(loc_bytes.data()), loc_bytes.size()));
  // e) array read
  counted_.array_read_into(pool_.str(), locator.container, locator.oid, out);
  if (out.size() != locator.length)
    throw StoreError(ErrorKind::Corrupt,
                     "array " + locator.oid.render() + " has " +
                         std::to_string(out.size()) + " bytes, locator says " +
                         std::to_string(locator.length));
}

}  // namespace fieldstore
