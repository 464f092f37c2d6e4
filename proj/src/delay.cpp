#include "dogd/delay.hpp"

#include <algorithm>
#include <boost/random/uniform_int_distribution.hpp>
#include <stdexcept>
#include <string>

namespace dogd {

int arrival_round(int origin, int delay) {
  if (origin < 1) throw std::invalid_argument("arrival_round: origin round must be >= 1");
  if (delay < 1) throw std::invalid_argument("arrival_round: delay must be >= 1");
  return origin + delay - 1;
}

DelaySchedule::DelaySchedule(std::vector<int> delays) : delays_(std::move(delays)) {
  if (delays_.empty()) throw std::invalid_argument("DelaySchedule: horizon must be >= 1");
  for (std::size_t k = 0; k < delays_.size(); ++k) {
    if (delays_[k] < 1) {
      throw std::invalid_argument("DelaySchedule: delay of round " + std::to_string(k + 1) +
                                  " is " + std::to_string(delays_[k]) + ", must be >= 1");
    }
  }
  max_delay_ = *std::max_element(delays_.begin(), delays_.end());
  buckets_.resize(static_cast<std::size_t>(last_round()));
  for (int k = 1; k <= horizon(); ++k) {
    buckets_[static_cast<std::size_t>(arrival_round(k, delays_[k - 1]) - 1)].push_back(k);
  }
}

int DelaySchedule::delay(int k) const {
  if (k < 1 || k > horizon()) throw std::out_of_range("DelaySchedule: round out of range");
  return delays_[static_cast<std::size_t>(k - 1)];
}

const std::vector<int>& DelaySchedule::arrivals_at(int t) const {
  static const std::vector<int> kNone;
  if (t < 1 || t > last_round()) return kNone;
  return buckets_[static_cast<std::size_t>(t - 1)];
}

const std::vector<int>& arrivals_at(const DelaySchedule& schedule, int t) {
  return schedule.arrivals_at(t);
}

int first_arrival(const DelaySchedule& schedule) {
  for (int t = 1; t <= schedule.last_round(); ++t) {
    if (!schedule.arrivals_at(t).empty()) return t;
  }
  throw std::logic_error("first_arrival: schedule has no arrivals");
}

DelaySchedule uniform_delay_schedule(int d, int horizon, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("uniform_delay_schedule: d must be >= 1");
  if (horizon < 1) throw std::invalid_argument("uniform_delay_schedule: horizon must be >= 1");
  Rng rng(seed);
  boost::random::uniform_int_distribution<int> dist(1, d);
  std::vector<int> delays(static_cast<std::size_t>(horizon));
  for (auto& v : delays) v = dist(rng);
  return DelaySchedule(std::move(delays));
}

DelaySchedule constant_delay_schedule(int d, int horizon) {
  if (horizon < 1) throw std::invalid_argument("constant_delay_schedule: horizon must be >= 1");
  return DelaySchedule(std::vector<int>(static_cast<std::size_t>(horizon), d));
}

void FeedbackBuffer::push(Feedback item) {
  if (item.arrival_round <= current_) {
    throw std::logic_error("FeedbackBuffer: item for round " + std::to_string(item.arrival_round) +
                           " pushed after that round was delivered");
  }
  auto& bucket = pending_[item.arrival_round];
  const auto pos = std::upper_bound(
      bucket.begin(), bucket.end(), item.origin_round,
      [](int origin, const Feedback& f) { return origin < f.origin_round; });
  bucket.insert(pos, std::move(item));
}

std::vector<Feedback> FeedbackBuffer::take(int t) {
  if (t <= current_) throw std::logic_error("FeedbackBuffer: rounds must be taken in increasing order");
  current_ = t;
  std::vector<Feedback> out;
  auto it = pending_.begin();
  if (it != pending_.end() && it->first < t) {
    throw std::logic_error("FeedbackBuffer: undelivered feedback for an earlier round");
  }
  if (it != pending_.end() && it->first == t) {
    out = std::move(it->second);
    pending_.erase(it);
  }
  return out;
}

std::size_t FeedbackBuffer::pending() const {
  std::size_t n = 0;
  for (const auto& [round, items] : pending_) n += items.size();
  return n;
}

}  // namespace dogd
