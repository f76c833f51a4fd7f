#pragma once
#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace rgl {

// Error-free running sum (Shewchuk partials). The rounded result depends only on the
// multiset of added terms, never on how they were grouped.
class ExactSum {
 public:
  void add(double x);
  void add(const ExactSum& o) {
    for (double p : o.partials_) add(p);
  }
  double value() const;

 private:
  std::vector<double> partials_;
};

// Runs fn(i) for i in [0, count) on up to `workers` threads. Callers write results by
// index, so output never depends on scheduling.
void parallel_for(std::int64_t count, int workers, const std::function<void(std::int64_t)>& fn);

int default_workers();

}  // namespace rgl
