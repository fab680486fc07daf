#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qdyn/cell_basis.hpp"

namespace qdyn {

enum class Exec { Serial, Parallel };

// Sums f(k, ksq, acc) over p in the box [-m, m] (k = sum_a p_a b_a, b rows are b_a), skipping
// p = 0 when skip_zero. f adds `width` values into acc.
//
// Serial: one accumulator, lexicographic order.
// Parallel: one accumulator per p_1 slab, slabs reduced in ascending p_1. The result does not
// depend on the thread count.
template <class F>
std::vector<double> box_sum(const IVec3& m, const Eigen::Matrix3d& b, bool skip_zero, int width, F&& f,
                            Exec exec = Exec::Parallel) {
  const Eigen::Vector3d b1 = b.row(0).transpose(), b2 = b.row(1).transpose(), b3 = b.row(2).transpose();
  auto slab = [&](int p1, double* acc) {
    for (int p2 = -m[1]; p2 <= m[1]; ++p2) {
      Eigen::Vector3d k12 = p1 * b1 + p2 * b2;
      for (int p3 = -m[2]; p3 <= m[2]; ++p3) {
        if (skip_zero && p1 == 0 && p2 == 0 && p3 == 0) continue;
        Eigen::Vector3d k = k12 + p3 * b3;
        f(k, k.squaredNorm(), acc);
      }
    }
  };
  std::vector<double> total(width, 0.0);
  if (exec == Exec::Serial) {
    for (int p1 = -m[0]; p1 <= m[0]; ++p1) slab(p1, total.data());
    return total;
  }
  const int nslab = 2 * m[0] + 1;
  std::vector<double> part(static_cast<std::size_t>(nslab) * width, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < nslab; ++s) slab(s - m[0], part.data() + static_cast<std::size_t>(s) * width);
  for (int s = 0; s < nslab; ++s)
    for (int w = 0; w < width; ++w) total[w] += part[static_cast<std::size_t>(s) * width + w];
  return total;
}

}  // namespace qdyn
