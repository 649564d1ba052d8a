#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "json.hpp"

#include "odcube/engine/evaluate.h"
#include "odcube/ingest/neighborhoods.h"
#include "odcube/query/query_manager.h"
#include "odcube/query/stats.h"

namespace odcube {

struct frame_query {
  query_id id{};
  int color{};
  std::size_t count{};
};

// Everything in a frame comes from one (revision, brush_seq) pair.
struct session_frame {
  std::uint64_t sequence{};  // 1-based, per session
  std::uint64_t revision{};
  std::uint64_t brush_seq{};
  bool brush_active{false};
  std::size_t global_count{};
  std::optional<trip_stats> brush_stats;
  std::vector<frame_query> queries;
  std::shared_ptr<result_mask const> brush_mask;  // already AND global
  std::string points;                             // encoded point buffer

  nlohmann::json control() const;
};

// Brush + point evaluation outside any session: what a frame for this
// manager state and brush must contain.
session_frame evaluate_frame(query_manager const& m,
                             std::optional<brush_spec> const& brush,
                             std::uint64_t brush_seq);

// One analyst session over a snapshot. Query mutations are serialized by a
// mutex; a worker thread turns state changes into frames. Brush updates are
// latest-wins: an update arriving while the worker evaluates replaces any
// pending one, and sequence numbers at or below the last accepted one are
// dropped.
class session {
public:
  explicit session(snapshot_ptr snapshot, neighborhood_set regions = {});
  ~session();
  session(session const&) = delete;
  session& operator=(session const&) = delete;

  template <typename Fn>
  auto mutate(Fn&& fn) -> std::invoke_result_t<Fn, query_manager&> {
    std::unique_lock lock{mutex_};
    if constexpr (std::is_void_v<std::invoke_result_t<Fn, query_manager&>>) {
      fn(manager_);
      schedule_if_changed();
    } else {
      auto r = fn(manager_);
      schedule_if_changed();
      return r;
    }
  }

  template <typename Fn>
  auto read(Fn&& fn) const -> std::invoke_result_t<Fn, query_manager const&> {
    std::unique_lock lock{mutex_};
    return fn(static_cast<query_manager const&>(manager_));
  }

  // False when seq is stale. nullopt clears the brush.
  bool submit_brush(std::uint64_t seq, std::optional<brush_spec> brush);

  std::shared_ptr<session_frame const> latest_frame() const;
  // First frame with sequence > after, or nullptr on timeout / stop.
  std::shared_ptr<session_frame const> wait_frame(
      std::uint64_t after, std::chrono::milliseconds timeout) const;

  std::uint64_t brush_seq() const;
  std::uint64_t evaluations() const { return evaluations_.load(); }

  // Test hook: extra latency per worker evaluation.
  void set_eval_delay(std::chrono::milliseconds const d) { eval_delay_ms_ = d.count(); }

  snapshot_ptr const& snapshot() const { return snapshot_; }
  neighborhood_set const& neighborhoods() const { return regions_; }

  void stop();

private:
  void schedule_if_changed();
  void run();

  snapshot_ptr snapshot_;
  neighborhood_set regions_;

  mutable std::mutex mutex_;
  std::condition_variable work_cv_;
  mutable std::condition_variable frame_cv_;
  query_manager manager_;
  std::optional<brush_spec> brush_;
  std::uint64_t brush_seq_{0};
  std::uint64_t scheduled_revision_{0};
  bool dirty_{false};
  bool stop_{false};
  std::shared_ptr<session_frame const> frame_;
  std::uint64_t frame_count_{0};

  std::atomic<std::uint64_t> evaluations_{0};
  std::atomic<std::int64_t> eval_delay_ms_{0};
  std::thread worker_;
};

}  // namespace odcube
