#include "alloc_tracker.hpp"

#include <malloc.h>

#include <atomic>
#include <cstdlib>
#include <new>

namespace {

std::atomic<std::int64_t> g_live{0};
std::atomic<std::int64_t> g_scope_start{0};
std::atomic<std::int64_t> g_scope_peak{0};
std::atomic<bool> g_scope_active{false};

void on_alloc(void* p) {
  if (!p) return;
  auto live = g_live.fetch_add(static_cast<std::int64_t>(malloc_usable_size(p)),
                               std::memory_order_relaxed) +
              static_cast<std::int64_t>(malloc_usable_size(p));
  if (!g_scope_active.load(std::memory_order_relaxed)) return;
  auto growth = live - g_scope_start.load(std::memory_order_relaxed);
  auto peak = g_scope_peak.load(std::memory_order_relaxed);
  while (growth > peak &&
         !g_scope_peak.compare_exchange_weak(peak, growth, std::memory_order_relaxed)) {
  }
}

void on_free(void* p) {
  if (!p) return;
  g_live.fetch_sub(static_cast<std::int64_t>(malloc_usable_size(p)), std::memory_order_relaxed);
}

void* checked_malloc(std::size_t n) {
  if (n == 0) n = 1;
  void* p = std::malloc(n);
  if (!p) throw std::bad_alloc();
  on_alloc(p);
  return p;
}

void* checked_aligned(std::size_t n, std::size_t align) {
  void* p = nullptr;
  if (posix_memalign(&p, align < sizeof(void*) ? sizeof(void*) : align, n ? n : 1))
    throw std::bad_alloc();
  on_alloc(p);
  return p;
}

}  // namespace

void* operator new(std::size_t n) { return checked_malloc(n); }
void* operator new[](std::size_t n) { return checked_malloc(n); }
void* operator new(std::size_t n, std::align_val_t a) {
  return checked_aligned(n, static_cast<std::size_t>(a));
}
void* operator new[](std::size_t n, std::align_val_t a) {
  return checked_aligned(n, static_cast<std::size_t>(a));
}
void* operator new(std::size_t n, const std::nothrow_t&) noexcept {
  void* p = std::malloc(n ? n : 1);
  on_alloc(p);
  return p;
}
void* operator new[](std::size_t n, const std::nothrow_t&) noexcept {
  void* p = std::malloc(n ? n : 1);
  on_alloc(p);
  return p;
}

void operator delete(void* p) noexcept {
  on_free(p);
  std::free(p);
}
void operator delete[](void* p) noexcept {
  on_free(p);
  std::free(p);
}
void operator delete(void* p, std::size_t) noexcept {
  on_free(p);
  std::free(p);
}
void operator delete[](void* p, std::size_t) noexcept {
  on_free(p);
  std::free(p);
}
void operator delete(void* p, std::align_val_t) noexcept {
  on_free(p);
  std::free(p);
}
void operator delete[](void* p, std::align_val_t) noexcept {
  on_free(p);
  std::free(p);
}
void operator delete(void* p, std::size_t, std::align_val_t) noexcept {
  on_free(p);
  std::free(p);
}
void operator delete[](void* p, std::size_t, std::align_val_t) noexcept {
  on_free(p);
  std::free(p);
}
void operator delete(void* p, const std::nothrow_t&) noexcept {
  on_free(p);
  std::free(p);
}
void operator delete[](void* p, const std::nothrow_t&) noexcept {
  on_free(p);
  std::free(p);
}

namespace itsforge::alloc_tracker {

std::int64_t live_bytes() { return g_live.load(std::memory_order_relaxed); }

Scope::Scope() {
  g_scope_start.store(g_live.load(std::memory_order_relaxed), std::memory_order_relaxed);
  g_scope_peak.store(0, std::memory_order_relaxed);
  g_scope_active.store(true, std::memory_order_relaxed);
}

Scope::~Scope() { g_scope_active.store(false, std::memory_order_relaxed); }

std::int64_t Scope::peak_bytes() const { return g_scope_peak.load(std::memory_order_relaxed); }

}  // namespace itsforge::alloc_tracker
