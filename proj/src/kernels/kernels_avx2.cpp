// Compiled with -mavx2; only reached when CPUID reports AVX2.
#include <immintrin.h>

#include <bit>

#include "osmbc/kernels.hpp"

namespace osmbc::kernels::avx2 {

namespace {

inline double lane_sum(__m256d v, int a, int b) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return lanes[a] + lanes[b];
}

}  // namespace

void filter_overlapping(BoxesView boxes, const BBox& query, std::uint32_t base,
                        std::vector<std::uint32_t>& out) {
  const __m256d q_min_lon = _mm256_set1_pd(query.min_lon);
  const __m256d q_min_lat = _mm256_set1_pd(query.min_lat);
  const __m256d q_max_lon = _mm256_set1_pd(query.max_lon);
  const __m256d q_max_lat = _mm256_set1_pd(query.max_lat);

  std::size_t i = 0;
  for (; i + 4 <= boxes.size; i += 4) {
    const __m256d a = _mm256_cmp_pd(_mm256_loadu_pd(boxes.min_lon + i), q_max_lon, _CMP_LE_OQ);
    const __m256d b = _mm256_cmp_pd(_mm256_loadu_pd(boxes.max_lon + i), q_min_lon, _CMP_GE_OQ);
    const __m256d c = _mm256_cmp_pd(_mm256_loadu_pd(boxes.min_lat + i), q_max_lat, _CMP_LE_OQ);
    const __m256d d = _mm256_cmp_pd(_mm256_loadu_pd(boxes.max_lat + i), q_min_lat, _CMP_GE_OQ);
    auto mask = static_cast<unsigned>(
        _mm256_movemask_pd(_mm256_and_pd(_mm256_and_pd(a, b), _mm256_and_pd(c, d))));
    while (mask != 0) {
      const int bit = std::countr_zero(mask);
      out.push_back(base + static_cast<std::uint32_t>(i + bit));
      mask &= mask - 1;
    }
  }
  scalar::filter_overlapping(boxes.subview(i, boxes.size - i), query,
                             base + static_cast<std::uint32_t>(i), out);
}

RingMoments ring_moments(std::span<const Point> ring, Point origin) {
  const std::size_t edges = ring.empty() ? 0 : ring.size() - 1;
  const auto* d = reinterpret_cast<const double*>(ring.data());
  const __m256d o = _mm256_setr_pd(origin.lon, origin.lat, origin.lon, origin.lat);

  __m256d acc_cross = _mm256_setzero_pd();
  __m256d acc_moment = _mm256_setzero_pd();
  std::size_t i = 0;
  // Two edges per step: lanes hold (x_i, y_i, x_{i+1}, y_{i+1}).
  for (; i + 2 <= edges; i += 2) {
    const __m256d p = _mm256_sub_pd(_mm256_loadu_pd(d + 2 * i), o);
    const __m256d q = _mm256_sub_pd(_mm256_loadu_pd(d + 2 * i + 2), o);
    const __m256d q_swapped = _mm256_permute_pd(q, 0b0101);
    const __m256d prod = _mm256_mul_pd(p, q_swapped);
    const __m256d cross = _mm256_hsub_pd(prod, prod);
    acc_cross = _mm256_add_pd(acc_cross, cross);
    acc_moment = _mm256_add_pd(acc_moment, _mm256_mul_pd(_mm256_add_pd(p, q), cross));
  }

  RingMoments m;
  m.cross = lane_sum(acc_cross, 0, 2);
  m.mx = lane_sum(acc_moment, 0, 2);
  m.my = lane_sum(acc_moment, 1, 3);
  const RingMoments tail = scalar::ring_moments(ring.subspan(i), origin);
  m.cross += tail.cross;
  m.mx += tail.mx;
  m.my += tail.my;
  return m;
}

bool crossing_parity(std::span<const Point> ring, Point p) {
  const std::size_t edges = ring.empty() ? 0 : ring.size() - 1;
  const auto* d = reinterpret_cast<const double*>(ring.data());
  const __m256d px = _mm256_set1_pd(p.lon);
  const __m256d py = _mm256_set1_pd(p.lat);

  unsigned crossings = 0;
  std::size_t i = 0;
  // Four edges per step. Lane order after unpacking is (i, i+2, i+1, i+3) for
  // both endpoints, which is irrelevant for a parity count.
  for (; i + 4 <= edges; i += 4) {
    const __m256d a01 = _mm256_loadu_pd(d + 2 * i);
    const __m256d a23 = _mm256_loadu_pd(d + 2 * i + 4);
    const __m256d b01 = _mm256_loadu_pd(d + 2 * i + 2);
    const __m256d b23 = _mm256_loadu_pd(d + 2 * i + 6);
    const __m256d ax = _mm256_unpacklo_pd(a01, a23);
    const __m256d ay = _mm256_unpackhi_pd(a01, a23);
    const __m256d bx = _mm256_unpacklo_pd(b01, b23);
    const __m256d by = _mm256_unpackhi_pd(b01, b23);

    const __m256d straddles =
        _mm256_xor_pd(_mm256_cmp_pd(ay, py, _CMP_GT_OQ), _mm256_cmp_pd(by, py, _CMP_GT_OQ));
    const __m256d x_at = _mm256_add_pd(
        _mm256_div_pd(_mm256_mul_pd(_mm256_sub_pd(bx, ax), _mm256_sub_pd(py, ay)),
                      _mm256_sub_pd(by, ay)),
        ax);
    const __m256d hit = _mm256_and_pd(straddles, _mm256_cmp_pd(px, x_at, _CMP_LT_OQ));
    crossings += static_cast<unsigned>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(hit))));
  }
  const bool odd = (crossings & 1U) != 0;
  return odd != scalar::crossing_parity(ring.subspan(i), p);
}

}  // namespace osmbc::kernels::avx2
