#include <atomic>
#include <cstdlib>
#include <string_view>

#include "osmbc/kernels.hpp"

namespace osmbc::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(OSMBC_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("OSMBC_KERNELS")) {
    if (std::string_view(env) == "scalar") return Backend::Scalar;
  }
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() noexcept {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

}  // namespace

bool backend_available(Backend b) noexcept {
  return b == Backend::Scalar || cpu_has_avx2();
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

bool set_backend(Backend b) noexcept {
  if (!backend_available(b)) return false;
  current().store(b, std::memory_order_relaxed);
  return true;
}

std::string_view backend_name(Backend b) noexcept {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

void filter_overlapping(BoxesView boxes, const BBox& query, std::uint32_t base,
                        std::vector<std::uint32_t>& out) {
#if defined(OSMBC_HAVE_AVX2_KERNELS)
  if (active_backend() == Backend::Avx2) return avx2::filter_overlapping(boxes, query, base, out);
#endif
  scalar::filter_overlapping(boxes, query, base, out);
}

RingMoments ring_moments(std::span<const Point> ring, Point origin) {
#if defined(OSMBC_HAVE_AVX2_KERNELS)
  if (active_backend() == Backend::Avx2) return avx2::ring_moments(ring, origin);
#endif
  return scalar::ring_moments(ring, origin);
}

bool crossing_parity(std::span<const Point> ring, Point p) {
#if defined(OSMBC_HAVE_AVX2_KERNELS)
  if (active_backend() == Backend::Avx2) return avx2::crossing_parity(ring, p);
#endif
  return scalar::crossing_parity(ring, p);
}

}  // namespace osmbc::kernels
