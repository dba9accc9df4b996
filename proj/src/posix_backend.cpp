#include "fieldstore/posix_backend.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <system_error>

namespace fs = std::filesystem;

namespace fieldstore {

namespace {

[[noreturn]] void throw_io(const std::string& what, int err = errno) {
  throw StoreError(ErrorKind::IoFailure,
                   what + ": " + std::strerror(err));
}

void read_file_into(const fs::path& path, ErrorKind missing_kind,
                    const std::string& missing_what, Bytes& out) {
  int fd = ::open(path.c_str(), O_RDONLY);
  if (fd < 0) {
    if (errno == ENOENT || errno == ENOTDIR)
      throw StoreError(missing_kind, missing_what);
    throw_io("open " + path.string());
  }
  off_t size = ::lseek(fd, 0, SEEK_END);
  if (size < 0) {
    ::close(fd);
    throw_io("lseek " + path.string());
  }
  ::lseek(fd, 0, SEEK_SET);
  out.resize(static_cast<std::size_t>(size));
  std::size_t done = 0;
  while (done < out.size()) {
    ssize_t n = ::read(fd, out.data() + done, out.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      int err = errno;
      ::close(fd);
      throw_io("read " + path.string(), err);
    }
    if (n == 0) break;  // concurrent truncation; return what we have
    done += static_cast<std::size_t>(n);
  }
  ::close(fd);
  out.resize(done);
}

Bytes read_file(const fs::path& path, ErrorKind missing_kind,
                const std::string& missing_what) {
  Bytes out;
  read_file_into(path, missing_kind, missing_what, out);
  return out;
}

void write_all(int fd, const Bytes& value, const fs::path& path) {
  std::size_t done = 0;
  while (done < value.size()) {
    ssize_t n = ::write(fd, value.data() + done, value.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_io("write " + path.string());
    }
    done += static_cast<std::size_t>(n);
  }
}

}  // namespace

void atomic_put_file(const fs::path& path, const Bytes& value) {
  static std::atomic<std::uint64_t> counter{0};
  fs::path dir = path.parent_path();
  fs::path tmp = dir / (".tmp." + std::to_string(::getpid()) + "." +
                        std::to_string(counter.fetch_add(1)) + "." +
                        path.filename().string());
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_EXCL, 0644);
  if (fd < 0) throw_io("create " + tmp.string());
  try {
    write_all(fd, value, tmp);
  } catch (...) {
    ::close(fd);
    ::unlink(tmp.c_str());
    throw;
  }
  ::close(fd);
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    int err = errno;
    ::unlink(tmp.c_str());
    throw_io("rename " + tmp.string() + " -> " + path.string(), err);
  }
}

PosixStore::PosixStore(const fs::path& root) : mapping_{root} {
  std::error_code ec;
  if (!fs::is_regular_file(root / kSentinelName, ec))
    throw StoreError(ErrorKind::IoFailure,
                     "not a fieldstore root (missing sentinel): " +
                         root.string());
}

PosixStore PosixStore::init(const fs::path& root) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw StoreError(ErrorKind::IoFailure, "mkdir " + root.string());
  fs::path sentinel = root / kSentinelName;
  if (!fs::exists(sentinel)) {
    const char* text = kSentinelContent;
    atomic_put_file(sentinel, Bytes(text, text + std::strlen(text)));
  }
  return PosixStore(root);
}

void PosixStore::require_pool(const std::string& pool) {
  if (!fs::is_directory(mapping_.pool_dir(pool)))
    throw StoreError(ErrorKind::PoolNotFound, "pool '" + pool + "'");
}

void PosixStore::require_container(const std::string& pool,
                                   const std::string& cont) {
  require_pool(pool);
  if (!fs::is_directory(mapping_.container_dir(pool, cont)))
    throw StoreError(ErrorKind::ContainerNotFound,
                     "container '" + cont + "' in pool '" + pool + "'");
}

void PosixStore::pool_create(const std::string& pool) {
  fs::path dir = mapping_.pool_dir(pool);
  if (::mkdir(dir.c_str(), 0755) != 0) {
    if (errno == EEXIST)
      throw StoreError(ErrorKind::AlreadyExists, "pool '" + pool + "'");
    throw_io("mkdir " + dir.string());
  }
}

bool PosixStore::pool_exists(const std::string& pool) {
  return fs::is_directory(mapping_.pool_dir(pool));
}

void PosixStore::container_create(const std::string& pool,
                                  const std::string& cont) {
  require_pool(pool);
  fs::path dir = mapping_.container_dir(pool, cont);
  if (::mkdir(dir.c_str(), 0755) != 0) {
    if (errno == EEXIST)
      throw StoreError(ErrorKind::AlreadyExists, "container '" + cont + "'");
    throw_io("mkdir " + dir.string());
  }
}

bool PosixStore::container_exists(const std::string& pool,
                                  const std::string& cont) {
  require_pool(pool);
  return fs::is_directory(mapping_.container_dir(pool, cont));
}

std::vector<std::string> PosixStore::container_list(const std::string& pool) {
  require_pool(pool);
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(mapping_.pool_dir(pool))) {
    if (entry.is_directory()) out.push_back(entry.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool PosixStore::kv_object_exists(const std::string& pool,
                                  const std::string& cont,
                                  const ObjectId& oid) {
  require_container(pool, cont);
  return fs::is_directory(mapping_.kv_dir(pool, cont, oid));
}

void PosixStore::kv_put(const std::string& pool, const std::string& cont,
                        const ObjectId& oid, const std::string& key,
                        const Bytes& value) {
  require_container(pool, cont);
  fs::path dir = mapping_.kv_dir(pool, cont, oid);
  // Several workers share one KV; EEXIST from the lazy mkdir is expected.
  if (::mkdir(dir.c_str(), 0755) != 0 && errno != EEXIST)
    throw_io("mkdir " + dir.string());
  atomic_put_file(mapping_.key_file(pool, cont, oid, key), value);
}

Bytes PosixStore::kv_get(const std::string& pool, const std::string& cont,
                         const ObjectId& oid, const std::string& key) {
  require_container(pool, cont);
  return read_file(mapping_.key_file(pool, cont, oid, key),
                   ErrorKind::KeyNotFound,
                   "key '" + key + "' in " + oid.render());
}

bool PosixStore::kv_key_exists(const std::string& pool,
                               const std::string& cont, const ObjectId& oid,
                               const std::string& key) {
  require_container(pool, cont);
  return fs::is_regular_file(mapping_.key_file(pool, cont, oid, key));
}

void PosixStore::array_write(const std::string& pool, const std::string& cont,
                             const ObjectId& oid, const Bytes& data) {
  require_container(pool, cont);
  atomic_put_file(mapping_.array_file(pool, cont, oid), data);
}

Bytes PosixStore::array_read(const std::string& pool, const std::string& cont,
                             const ObjectId& oid) {
  require_container(pool, cont);
  return read_file(mapping_.array_file(pool, cont, oid),
                   ErrorKind::ObjectNotFound, "array " + oid.render());
}

void PosixStore::array_read_into(const std::string& pool,
                                 const std::string& cont, const ObjectId& oid,
                                 Bytes& out) {
  require_container(pool, cont);
  read_file_into(mapping_.array_file(pool, cont, oid),
                 ErrorKind::ObjectNotFound, "array " + oid.render(), out);
}

bool PosixStore::array_exists(const std::string& pool, const std::string& cont,
                              const ObjectId& oid) {
  require_container(pool, cont);
  return fs::is_regular_file(mapping_.array_file(pool, cont, oid));
}

std::string PosixStore::dump() {
  std::vector<std::string> lines;
  for (const auto& pool_entry : fs::directory_iterator(mapping_.root)) {
    if (!pool_entry.is_directory()) continue;
    std::string pool = pool_entry.path().filename().string();
    lines.push_back("POOL " + pool + " 0 00000000");
    for (const auto& cont_entry : fs::directory_iterator(pool_entry.path())) {
      if (!cont_entry.is_directory()) continue;
      std::string cont = cont_entry.path().filename().string();
      lines.push_back("CONT " + pool + "/" + cont + " 0 00000000");
      for (const auto& obj_entry : fs::directory_iterator(cont_entry.path())) {
        std::string name = obj_entry.path().filename().string();
        if (name.starts_with(".tmp.")) continue;
        if (obj_entry.is_directory() && name.ends_with(".kv")) {
          std::string oid = name.substr(0, name.size() - 3);
          for (const auto& key_entry :
               fs::directory_iterator(obj_entry.path())) {
            if (!key_entry.is_regular_file()) continue;
            std::string enc = key_entry.path().filename().string();
            if (enc.starts_with(".tmp.")) continue;
            Bytes value = read_file(key_entry.path(), ErrorKind::IoFailure,
                                    "key file vanished");
            lines.push_back("KV " + pool + "/" + cont + "/" + oid + "/" + enc +
                            " " + std::to_string(value.size()) + " " +
                            to_hex32(crc32(value)));
          }
        } else if (obj_entry.is_regular_file() && name.ends_with(".arr")) {
          std::string oid = name.substr(0, name.size() - 4);
          Bytes data = read_file(obj_entry.path(), ErrorKind::IoFailure,
                                 "array file vanished");
          lines.push_back("ARR " + pool + "/" + cont + "/" + oid + " " +
                          std::to_string(data.size()) + " " +
                          to_hex32(crc32(data)));
        }
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
