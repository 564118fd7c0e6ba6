#pragma once

// Data-parallel inner loops used by the geometry and spatial-index code.
//
// Every kernel has a portable scalar implementation and, on x86-64, an AVX2
// implementation. The active backend is chosen once at startup from CPUID and
// can be pinned with set_backend() or the OSMBC_KERNELS=scalar environment
// variable. bbox filtering and crossing parity are bit-exact across backends;
// ring moments differ only in floating-point summation order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "osmbc/geometry.hpp"

namespace osmbc::kernels {

enum class Backend { Scalar, Avx2 };

/// Structure-of-arrays view over a run of boxes.
struct BoxesView {
  const double* min_lon = nullptr;
  const double* min_lat = nullptr;
  const double* max_lon = nullptr;
  const double* max_lat = nullptr;
  std::size_t size = 0;

  BoxesView subview(std::size_t offset, std::size_t count) const noexcept {
    return {min_lon + offset, min_lat + offset, max_lon + offset, max_lat + offset, count};
  }
};

/// Sums over the edges of a closed ring, in coordinates shifted by an origin.
/// cross = Σ (x_i y_{i+1} - x_{i+1} y_i); mx = Σ (x_i + x_{i+1}) c_i; my likewise.
struct RingMoments {
  double cross = 0.0;
  double mx = 0.0;
  double my = 0.0;
};

namespace scalar {
void filter_overlapping(BoxesView boxes, const BBox& query, std::uint32_t base,
                        std::vector<std::uint32_t>& out);
RingMoments ring_moments(std::span<const Point> ring, Point origin);
bool crossing_parity(std::span<const Point> ring, Point p);
}  // namespace scalar

#if defined(OSMBC_HAVE_AVX2_KERNELS)
namespace avx2 {
void filter_overlapping(BoxesView boxes, const BBox& query, std::uint32_t base,
                        std::vector<std::uint32_t>& out);
RingMoments ring_moments(std::span<const Point> ring, Point origin);
bool crossing_parity(std::span<const Point> ring, Point p);
}  // namespace avx2
#endif

bool backend_available(Backend b) noexcept;
Backend active_backend() noexcept;
/// Pins the backend; returns false (and changes nothing) if it is unavailable.
bool set_backend(Backend b) noexcept;
std::string_view backend_name(Backend b) noexcept;

/// Appends base + i for every box i that intersects query (closed set), in ascending order.
void filter_overlapping(BoxesView boxes, const BBox& query, std::uint32_t base,
                        std::vector<std::uint32_t>& out);
RingMoments ring_moments(std::span<const Point> ring, Point origin);
/// Even-odd crossing test of a horizontal ray from p against the ring's edges.
bool crossing_parity(std::span<const Point> ring, Point p);

}  // namespace osmbc::kernels
