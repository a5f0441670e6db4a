#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psdbscan/types.hpp"

namespace psdbscan {

/// One bulk-synchronous exchange point between W worker threads and a server
/// thread. Each worker deposits exactly one push per generation and blocks
/// until the server publishes the reply for that generation. All waits are
/// bounded; an expired wait or an abort raises ProtocolError.
template <class Push, class Reply>
class BarrierChannel {
 public:
  BarrierChannel(std::size_t parties, std::chrono::milliseconds timeout)
      : parties_(parties), timeout_(timeout), slots_(parties) {}

  /// Worker side: push, then pull the shared reply.
  std::shared_ptr<const Reply> exchange(std::size_t worker, Push push, std::size_t round) {
    std::unique_lock lock(mutex_);
    if (slots_[worker].has_value()) {
      throw ProtocolError("worker " + std::to_string(worker) + " pushed twice in round " +
                          std::to_string(round));
    }
    const std::size_t generation = generation_;
    slots_[worker] = std::move(push);
    ++arrived_;
    if (arrived_ == parties_) server_cv_.notify_all();
    const bool ok = worker_cv_.wait_for(lock, timeout_, [&] {
      return aborted_ || generation_ != generation;
    });
    if (aborted_) throw ProtocolError("exchange aborted in round " + std::to_string(round));
    if (!ok) {
      throw ProtocolError("barrier timeout waiting for server in round " + std::to_string(round));
    }
    return reply_;
  }

  /// Server side: wait for every worker's push of the current generation.
  std::vector<Push> collect(std::size_t round) {
    std::unique_lock lock(mutex_);
    const bool ok = server_cv_.wait_for(lock, timeout_, [&] { return aborted_ || arrived_ == parties_; });
    if (aborted_) throw ProtocolError("exchange aborted in round " + std::to_string(round));
    if (!ok) {
      std::string missing;
      for (std::size_t w = 0; w < parties_; ++w) {
        if (!slots_[w].has_value()) missing += (missing.empty() ? "" : ",") + std::to_string(w);
      }
      throw ProtocolError("barrier timeout in round " + std::to_string(round) +
                          ": missing push from worker(s) " + missing);
    }
    std::vector<Push> pushes;
    pushes.reserve(parties_);
    for (auto& slot : slots_) {
      pushes.push_back(std::move(*slot));
      slot.reset();
    }
    arrived_ = 0;
    return pushes;
  }

  /// Server side: release the workers of the current generation.
  void publish(std::shared_ptr<const Reply> reply) {
    {
      std::lock_guard lock(mutex_);
      reply_ = std::move(reply);
      ++generation_;
    }
    worker_cv_.notify_all();
  }

  void abort() {
    {
      std::lock_guard lock(mutex_);
      aborted_ = true;
    }
    worker_cv_.notify_all();
    server_cv_.notify_all();
  }

 private:
  std::size_t parties_;
  std::chrono::milliseconds timeout_;
  std::mutex mutex_;
  std::condition_variable worker_cv_;
  std::condition_variable server_cv_;
  std::vector<std::optional<Push>> slots_;
  std::size_t arrived_ = 0;
  std::size_t generation_ = 0;
  bool aborted_ = false;
  std::shared_ptr<const Reply> reply_;
};

}  // namespace psdbscan
