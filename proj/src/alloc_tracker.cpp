#include "phasesync/alloc_tracker.hpp"

#include <atomic>
#include <cstdlib>
#include <new>

namespace phasesync::alloc {
namespace {

std::atomic<std::size_t> g_current{0};
std::atomic<std::size_t> g_peak{0};

// Size prefix keeps max_align_t alignment for the returned block.
constexpr std::size_t kHeader = alignof(std::max_align_t);

void* tracked_alloc(std::size_t size) noexcept {
  void* raw = std::malloc(size + kHeader);
  if (!raw) return nullptr;
  *static_cast<std::size_t*>(raw) = size;
  const std::size_t now = g_current.fetch_add(size, std::memory_order_relaxed) + size;
  std::size_t peak = g_peak.load(std::memory_order_relaxed);
  while (now > peak && !g_peak.compare_exchange_weak(peak, now, std::memory_order_relaxed)) {
  }
  return static_cast<char*>(raw) + kHeader;
}

void tracked_free(void* p) noexcept {
  if (!p) return;
  void* raw = static_cast<char*>(p) - kHeader;
  g_current.fetch_sub(*static_cast<std::size_t*>(raw), std::memory_order_relaxed);
  std::free(raw);
}

void* alloc_or_throw(std::size_t size) {
  if (void* p = tracked_alloc(size == 0 ? 1 : size)) return p;
  throw std::bad_alloc();
}

}  // namespace

std::size_t current_bytes() noexcept { return g_current.load(std::memory_order_relaxed); }
std::size_t peak_bytes() noexcept { return g_peak.load(std::memory_order_relaxed); }
void reset_peak() noexcept { g_peak.store(g_current.load(std::memory_order_relaxed), std::memory_order_relaxed); }

PeakScope::PeakScope() noexcept : baseline_(current_bytes()) { reset_peak(); }

std::size_t PeakScope::transient_peak() const noexcept {
  const std::size_t peak = peak_bytes();
  return peak > baseline_ ? peak - baseline_ : 0;
}

}  // namespace phasesync::alloc

void* operator new(std::size_t size) { return phasesync::alloc::alloc_or_throw(size); }
void* operator new[](std::size_t size) { return phasesync::alloc::alloc_or_throw(size); }
void* operator new(std::size_t size, const std::nothrow_t&) noexcept {
  return phasesync::alloc::tracked_alloc(size == 0 ? 1 : size);
}
void* operator new[](std::size_t size, const std::nothrow_t&) noexcept {
  return phasesync::alloc::tracked_alloc(size == 0 ? 1 : size);
}
void operator delete(void* p) noexcept { phasesync::alloc::tracked_free(p); }
void operator delete[](void* p) noexcept { phasesync::alloc::tracked_free(p); }
void operator delete(void* p, std::size_t) noexcept { phasesync::alloc::tracked_free(p); }
void operator delete[](void* p, std::size_t) noexcept { phasesync::alloc::tracked_free(p); }
void operator delete(void* p, const std::nothrow_t&) noexcept { phasesync::alloc::tracked_free(p); }
void operator delete[](void* p, const std::nothrow_t&) noexcept { phasesync::alloc::tracked_free(p); }
