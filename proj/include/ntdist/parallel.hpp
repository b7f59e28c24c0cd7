#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ntdist {

/// Caps worker threads for all parallel loops. n == 0 restores the default
/// (all available cores). Results never depend on this setting.
void set_threads(int n);
int threads();

/// Sum in a fixed binary-tree order, independent of thread count.
double pairwise_sum(std::span<const double> values);

/// Neumaier-compensated running sum, used for prefix arrays.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace ntdist
