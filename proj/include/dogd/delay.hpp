#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dogd/oracles.hpp"

namespace dogd {

/// t' = k + d_k - 1.
int arrival_round(int origin, int delay);

/// Per-round delays d_1..d_T with the arrival sets F_t precomputed.
class DelaySchedule {
 public:
  /// delays[k-1] = d_k; every entry must be >= 1.
  explicit DelaySchedule(std::vector<int> delays);

  int horizon() const { return static_cast<int>(delays_.size()); }
  int max_delay() const { return max_delay_; }
  /// Last round with possible arrivals: T + d_max - 1.
  int last_round() const { return horizon() + max_delay_ - 1; }

  int delay(int k) const;
  const std::vector<int>& delays() const { return delays_; }

  /// F_t in ascending order; empty outside [1, last_round()].
  const std::vector<int>& arrivals_at(int t) const;

 private:
  std::vector<int> delays_;
  int max_delay_ = 1;
  std::vector<std::vector<int>> buckets_;  // index t - 1
};

const std::vector<int>& arrivals_at(const DelaySchedule& schedule, int t);

/// s = min{t : F_t nonempty}.
int first_arrival(const DelaySchedule& schedule);

/// d_t i.i.d. uniform on {1, ..., d}.
DelaySchedule uniform_delay_schedule(int d, int horizon, std::uint64_t seed);
DelaySchedule constant_delay_schedule(int d, int horizon);

/// In-flight feedback keyed by arrival round.
class FeedbackBuffer {
 public:
  /// Stores `item`; its arrival round must not precede the last round taken.
  void push(Feedback item);

  /// Removes and returns everything arriving at round t, ascending by origin.
  /// Rounds must be taken in increasing order.
  std::vector<Feedback> take(int t);

  std::size_t pending() const;
  bool empty() const { return pending_.empty(); }

 private:
  std::map<int, std::vector<Feedback>> pending_;
  int current_ = 0;
};

}  // namespace dogd
