#include "odcube/service/session.h"

#include "odcube/query/query_json.h"
#include "odcube/service/point_buffer.h"

namespace odcube {

nlohmann::json session_frame::control() const {
  auto j = nlohmann::json{{"type", "frame"},
                          {"sequence", sequence},
                          {"revision", revision},
                          {"brush_seq", brush_seq},
                          {"brush_active", brush_active},
                          {"global_count", global_count},
                          {"point_bytes", points.size()}};
  auto qs = nlohmann::json::array();
  for (auto const& q : queries) {
    qs.push_back({{"id", q.id}, {"color", q.color}, {"count", q.count}});
  }
  j["queries"] = std::move(qs);
  j["brush"] = brush_stats ? stats_to_json(*brush_stats) : nlohmann::json{};
  return j;
}

session_frame evaluate_frame(query_manager const& m,
                             std::optional<brush_spec> const& brush,
                             std::uint64_t const brush_seq) {
  auto const& s = m.snapshot();
  auto const& global = *m.global_mask();

  session_frame f;
  f.revision = m.revision();
  f.brush_seq = brush_seq;
  f.global_count = global.count();

  std::vector<result_mask> masks;
  std::vector<colored_mask> colored;
  auto const ids = m.ids();
  masks.reserve(ids.size());
  for (auto const id : ids) {
    auto const& spec = m.spec(id);
    auto const& r = m.result(id);
    f.queries.push_back({id, spec.color, r.stats.count});
    if (spec.visible) {
      masks.push_back(*r.mask);
    }
  }
  for (auto const id : ids) {
    if (m.spec(id).visible) {
      colored.push_back({m.result(id).mask.get(), m.spec(id).color});
    }
  }

  std::uint32_t flags = masks.empty() ? 0U : kFlagHasQueries;
  if (brush) {
    auto mask = eval_brush(s, *brush);
    mask &= global;
    f.brush_active = true;
    f.brush_stats = compute_stats(s, mask);
    f.brush_mask = std::make_shared<result_mask const>(std::move(mask));
    flags |= kFlagBrushActive;
  }
  auto const status = classify(s, global, masks, f.brush_mask.get());
  auto const colors = trip_colors(s.size(), colored);
  f.points = encode(make_point_buffer(s, status, colors, f.revision, flags));
  return f;
}

session::session(snapshot_ptr snapshot, neighborhood_set regions)
    : snapshot_{std::move(snapshot)},
      regions_{std::move(regions)},
      manager_{snapshot_},
      scheduled_revision_{manager_.revision()},
      worker_{[this] { run(); }} {}

session::~session() { stop(); }

void session::stop() {
  {
    std::unique_lock lock{mutex_};
    if (stop_) {
      return;
    }
    stop_ = true;
  }
  work_cv_.notify_all();
  frame_cv_.notify_all();
  if (worker_.joinable()) {
    worker_.join();
  }
}

void session::schedule_if_changed() {
  if (manager_.revision() != scheduled_revision_) {
    scheduled_revision_ = manager_.revision();
    dirty_ = true;
    work_cv_.notify_one();
  }
}

bool session::submit_brush(std::uint64_t const seq, std::optional<brush_spec> brush) {
  if (brush) {
    brush->validate();
  }
  {
    std::unique_lock lock{mutex_};
    if (seq <= brush_seq_) {
      return false;
    }
    brush_seq_ = seq;
    brush_ = std::move(brush);
    dirty_ = true;
  }
  work_cv_.notify_one();
  return true;
}

std::uint64_t session::brush_seq() const {
  std::unique_lock lock{mutex_};
  return brush_seq_;
}

std::shared_ptr<session_frame const> session::latest_frame() const {
  std::unique_lock lock{mutex_};
  return frame_;
}

std::shared_ptr<session_frame const> session::wait_frame(
    std::uint64_t const after, std::chrono::milliseconds const timeout) const {
  std::unique_lock lock{mutex_};
  frame_cv_.wait_for(lock, timeout, [&] {
    return stop_ || (frame_ != nullptr && frame_->sequence > after);
  });
  if (frame_ != nullptr && frame_->sequence > after) {
    return frame_;
  }
  return nullptr;
}

void session::run() {
  std::unique_lock lock{mutex_};
  while (true) {
    work_cv_.wait(lock, [&] { return stop_ || dirty_; });
    if (stop_) {
      return;
    }
    dirty_ = false;

    // Snapshot the state under the lock; the query manager's masks are
    // shared and immutable, so copying the manager is cheap enough.
    auto const state = manager_;
    auto const brush = brush_;
    auto const seq = brush_seq_;
    lock.unlock();

    if (auto const d = eval_delay_ms_.load(); d > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds{d});
    }
    auto f = evaluate_frame(state, brush, seq);
    evaluations_.fetch_add(1);

    lock.lock();
    f.sequence = ++frame_count_;
    frame_ = std::make_shared<session_frame const>(std::move(f));
    frame_cv_.notify_all();
  }
}

}  // namespace odcube
