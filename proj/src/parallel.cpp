#include "ntdist/parallel.hpp"

#include <omp.h>

namespace ntdist {

namespace {
constexpr std::size_t kLeaf = 32;

double tree_sum(const double* p, std::size_t n) {
  if (n <= kLeaf) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  const std::size_t half = n / 2;
  return tree_sum(p, half) + tree_sum(p + half, n - half);
}
}  // namespace

void set_threads(int n) {
  if (n <= 0) n = omp_get_num_procs();
  omp_set_num_threads(n);
}

int threads() { return omp_get_max_threads(); }

double pairwise_sum(std::span<const double> values) {
  return tree_sum(values.data(), values.size());
}

}  // namespace ntdist
