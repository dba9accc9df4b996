#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fieldstore/object_api.hpp"
#include "fieldstore/posix_backend.hpp"

namespace fieldstore {

struct FuzzOptions {
  std::uint64_t ops = 10000;
  std::uint64_t seed = 0;
  bool compare_dumps = true;  // final layout conformance via dump listings
};

struct FuzzResult {
  std::uint64_t executed = 0;
  std::uint64_t divergences = 0;
  std::vector<std::string> diagnostics;  // one entry per divergence (capped)

  bool ok() const { return divergences == 0; }
};

// Executes a seeded random single-threaded op sequence drawn from the store
// contract against both stores and compares every observable outcome
// (returned values, booleans, error kinds). With compare_dumps, also checks
// the final canonical listings match.
FuzzResult differential_fuzz(Store& subject, Store& oracle,
                             const FuzzOptions& options);

// Replays one op sequence and returns the oracle's final dump; used to check
// that the same seed reproduces the identical sequence.
std::string fuzz_sequence_fingerprint(const FuzzOptions& options);

// Scans an existing posix store for broken index entries: every KV value
// must parse as an ArrayLocator whose array exists with matching length.
// Returns one message per problem, each naming Corrupt.
std::vector<std::string> check_store_consistency(PosixStore& store);

struct AuditCheckResult {
  bool ok = true;
  std::vector<std::string> failures;
};

// Runs small instrumented fieldio sessions and checks the write path issues
// exactly array-write + existence-check + key-put (plus the one-off global
// registration), the read path exactly 2 gets + 2 existence checks + 1 array
// read, and that no-containers mode needs strictly fewer metadata ops than
// full mode for the same workload.
AuditCheckResult check_fieldio_audits();

}  // namespace fieldstore
