#pragma once

#include <cstdint>

namespace itsforge::alloc_tracker {

// Bytes currently allocated through operator new, as reported by the
// allocator's usable size.
std::int64_t live_bytes();

// Tracks the peak growth of live allocations over the lifetime of the scope:
// max(live - live_at_start, 0). One scope may be active at a time.
class Scope {
 public:
  Scope();
  ~Scope();
  Scope(const Scope&) = delete;
  Scope& operator=(const Scope&) = delete;

  std::int64_t peak_bytes() const;
};

}  // namespace itsforge::alloc_tracker
