#pragma once

#include <filesystem>
#include <string>

#include "fieldstore/key_codec.hpp"
#include "fieldstore/object_api.hpp"

namespace fieldstore {

// Key-to-filename mapping used inside KV directories.
inline std::string map_key_filename(std::string_view key) {
  if (key.empty()) throw StoreError(ErrorKind::InvalidName, "empty key");
  return encode_key_filename(key);
}

// Pure path mapping from store coordinates to on-disk locations:
//   <root>/<pool>/
//   <root>/<pool>/<container>/
//   <root>/<pool>/<container>/<oid32hex>.kv/<encoded-key>
//   <root>/<pool>/<container>/<oid32hex>.arr
// KV directories carry ".kv" and arrays ".arr" so the two object kinds with
// the same OID cannot collide.
struct PathMapping {
  std::filesystem::path root;

  std::filesystem::path pool_dir(const std::string& pool) const {
    return root / pool;
  }
  std::filesystem::path container_dir(const std::string& pool,
                                      const std::string& cont) const {
    return root / pool / cont;
  }
  std::filesystem::path kv_dir(const std::string& pool,
                               const std::string& cont,
                               const ObjectId& oid) const {
    return container_dir(pool, cont) / (oid.render() + ".kv");
  }
  std::filesystem::path key_file(const std::string& pool,
                                 const std::string& cont, const ObjectId& oid,
                                 const std::string& key) const {
    return kv_dir(pool, cont, oid) / map_key_filename(key);
  }
  std::filesystem::path array_file(const std::string& pool,
                                   const std::string& cont,
                                   const ObjectId& oid) const {
    return container_dir(pool, cont) / (oid.render() + ".arr");
  }
};

// Writes value to a uniquely named temp file in path's directory, then
// renames it over path. Readers of path never observe partial content.
void atomic_put_file(const std::filesystem::path& path, const Bytes& value);

inline constexpr const char* kSentinelName = ".fieldstore";
inline constexpr const char* kSentinelContent = "fieldstore-v1\n";

// Store contract on a POSIX directory tree, mirroring a helper library that
// maps pools and containers to directories, KV objects to directories of
// key-named files and arrays to plain files. Safe for concurrent use from
// multiple processes sharing the tree; atomicity relies on rename and mkdir.
class PosixStore : public Store {
 public:
  // Opens an existing store root; the sentinel file must be present.
  explicit PosixStore(const std::filesystem::path& root);

  // Creates root (if needed) and the sentinel, then opens it.
  static PosixStore init(const std::filesystem::path& root);

  const std::filesystem::path& root() const { return mapping_.root; }
  const PathMapping& mapping() const { return mapping_; }

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
  std::string dump() override;

 private:
  void require_pool(const std::string& pool);
  void require_container(const std::string& pool, const std::string& cont);

  PathMapping mapping_;
};

}  // namespace fieldstore
