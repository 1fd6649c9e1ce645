#include "kcl/kinks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kcl/error.hpp"
#include "kcl/geometry.hpp"
#include "kcl/kcl2d.hpp"

namespace kcl {

namespace {

constexpr const char* kModule = "kinks";
constexpr std::ptrdiff_t kPlateauReach = 16;
constexpr double kPlateauFlatness = 1e-3;
constexpr double kLocalization = 2.0;
constexpr std::size_t kSpeedWindow = 5;

struct Jumps {
  double h1, h2, f1, f2;
};

Jumps jumps(const PlateauState& l, const PlateauState& r) {
  return {l.g * std::sin(l.theta) - r.g * std::sin(r.theta),
          l.g * std::cos(l.theta) - r.g * std::cos(r.theta),
          l.m * std::cos(l.theta) - r.m * std::cos(r.theta),
          -l.m * std::sin(l.theta) + r.m * std::sin(r.theta)};
}

}  // namespace

std::vector<KinkRecord> detect_kinks(const KclState2& state, double theta_threshold) {
  if (!(theta_threshold > 0.0)) throw Error(kModule, "threshold must be positive");
  const std::size_t n = state.size();
  const auto count = static_cast<std::ptrdiff_t>(n);
  const bool periodic = state.grid.boundary == Boundary2::periodic;
  auto cell = [&](std::ptrdiff_t i) {
    if (periodic) return static_cast<std::size_t>(((i % count) + count) % count);
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, count - 1));
  };
  auto theta = [&](std::ptrdiff_t i) { return state.theta[cell(i)]; };
  // Change of theta across the three interfaces centred on interface j
  // (between cells j - 1 and j).
  auto window = [&](std::ptrdiff_t j) { return std::abs(normalize_angle(theta(j + 1) - theta(j - 2))); };
  auto single = [&](std::ptrdiff_t j) { return std::abs(normalize_angle(theta(j) - theta(j - 1))); };

  const std::ptrdiff_t first = periodic ? 0 : 1;
  const std::ptrdiff_t last = periodic ? count - 1 : count - 1;
  std::vector<std::ptrdiff_t> located;
  for (std::ptrdiff_t j = first; j <= last; ++j) {
    const double w = window(j);
    if (!(w > theta_threshold)) continue;
    if (w < window(j - 1) || w <= window(j + 1)) continue;
    // Interface inside the window with the largest single jump.
    std::ptrdiff_t c = j;
    for (std::ptrdiff_t k = j - 1; k <= j + 1; ++k) {
      if (!periodic && (k < 1 || k > count - 1)) continue;
      if (single(k) > single(c)) c = k;
    }
    if (window(c) < kLocalization * std::max(window(c - 3), window(c + 3))) continue;
    if (periodic) c = ((c % count) + count) % count;
    if (std::find(located.begin(), located.end(), c) == located.end()) located.push_back(c);
  }
  std::sort(located.begin(), located.end());

  auto h_step = [&](std::ptrdiff_t i) {
    const std::size_t a = cell(i - 1), b = cell(i);
    return std::hypot(state.g[b] * std::sin(state.theta[b]) - state.g[a] * std::sin(state.theta[a]),
                      state.g[b] * std::cos(state.theta[b]) - state.g[a] * std::cos(state.theta[a]));
  };
  // Walks away from interface c (direction -1 or +1) to the first interface
  // where the state has flattened out, or the flattest one within reach.
  auto plateau = [&](std::ptrdiff_t c, std::ptrdiff_t dir) {
    const double scale = h_step(c);
    std::ptrdiff_t best = c + dir;
    double best_step = std::numeric_limits<double>::infinity();
    for (std::ptrdiff_t k = 1; k <= kPlateauReach; ++k) {
      const std::ptrdiff_t j = c + dir * k;
      if (!periodic && (j < 1 || j > count - 1)) break;
      const double d = h_step(j);
      if (d < best_step) {
        best = j;
        best_step = d;
      }
      if (d <= kPlateauFlatness * scale) break;
    }
    return dir < 0 ? cell(best - 1) : cell(best);
  };

  std::vector<KinkRecord> out;
  for (std::ptrdiff_t c : located) {
    const std::size_t l = plateau(c, -1), r = plateau(c, +1);
    KinkRecord k;
    k.xi_location = state.grid.interface(static_cast<std::size_t>(c));
    k.time = state.time;
    k.left = {state.m[l], state.theta[l], state.g[l]};
    k.right = {state.m[r], state.theta[r], state.g[r]};
    k.theta_jump = normalize_angle(k.right.theta - k.left.theta);
    k.right.theta = k.left.theta + k.theta_jump;
    k.m_jump = k.right.m - k.left.m;
    k.g_jump = k.right.g - k.left.g;
    out.push_back(k);
  }
  return out;
}

KinkSpeed kink_speed(const PlateauState& left, const PlateauState& right) {
  const Jumps j = jumps(left, right);
  const double hh = j.h1 * j.h1 + j.h2 * j.h2;
  if (hh == 0.0) throw Error(kModule, "no kink");
  KinkSpeed out;
  out.speed = (j.h1 * j.f1 + j.h2 * j.f2) / hh;
  out.residual = rh_defect(out.speed, left, right);
  return out;
}

double rh_defect(double speed, const PlateauState& left, const PlateauState& right) {
  const Jumps j = jumps(left, right);
  return std::hypot(j.f1 - speed * j.h1, j.f2 - speed * j.h2);
}

KinkTracker::KinkTracker(std::optional<double> period) : period_(period) {}

void KinkTracker::add(double time, std::vector<KinkRecord>& detections, double gate) {
  const double dt = tracks_.empty() ? 0.0 : time - last_time_;
  struct Candidate {
    double distance;
    std::size_t track, detection;
    double unwrapped;
  };
  std::vector<Candidate> candidates;
  for (std::size_t a : active_) {
    const KinkTrack& t = tracks_[a];
    double predicted = t.xi.back();
    if (t.xi.size() >= 2) {
      const std::size_t m = t.xi.size();
      const double span = t.times[m - 1] - t.times[m - 2];
      if (span > 0.0) predicted += (t.xi[m - 1] - t.xi[m - 2]) / span * dt;
    }
    for (std::size_t d = 0; d < detections.size(); ++d) {
      double xi = detections[d].xi_location;
      if (period_) xi += *period_ * std::round((predicted - xi) / *period_);
      const double distance = std::abs(xi - predicted);
      if (distance <= gate) candidates.push_back({distance, a, d, xi});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.distance != y.distance) return x.distance < y.distance;
    if (x.track != y.track) return x.track < y.track;
    return x.detection < y.detection;
  });

  std::vector<bool> track_used(tracks_.size(), false), detection_used(detections.size(), false);
  std::vector<std::size_t> next_active;
  for (const Candidate& c : candidates) {
    if (track_used[c.track] || detection_used[c.detection]) continue;
    track_used[c.track] = detection_used[c.detection] = true;
    tracks_[c.track].times.push_back(time);
    tracks_[c.track].xi.push_back(c.unwrapped);
    detections[c.detection].track = c.track;
    next_active.push_back(c.track);
  }
  for (std::size_t d = 0; d < detections.size(); ++d) {
    if (detection_used[d]) continue;
    KinkTrack t;
    t.id = tracks_.size();
    t.times.push_back(time);
    t.xi.push_back(detections[d].xi_location);
    detections[d].track = t.id;
    next_active.push_back(t.id);
    tracks_.push_back(std::move(t));
  }
  std::sort(next_active.begin(), next_active.end());
  active_ = std::move(next_active);
  last_time_ = time;
}

void KinkTracker::finish(std::span<KinkRecord> records) {
  for (KinkTrack& t : tracks_) {
    t.speed = t.times.size() >= 2 ? least_squares_slope(t.times, t.xi) : 0.0;
  }
  for (KinkRecord& r : records) {
    if (r.track >= tracks_.size()) continue;
    const KinkTrack& t = tracks_[r.track];
    if (t.times.size() < 2) {
      r.speed_K = 0.0;
      continue;
    }
    const auto it = std::lower_bound(t.times.begin(), t.times.end(), r.time);
    const auto pos = static_cast<std::size_t>(it - t.times.begin());
    const std::size_t half = kSpeedWindow / 2;
    std::size_t lo = pos > half ? pos - half : 0;
    std::size_t hi = std::min(t.times.size(), lo + kSpeedWindow);
    lo = hi > kSpeedWindow ? hi - kSpeedWindow : 0;
    r.speed_K = least_squares_slope(std::span(t.times).subspan(lo, hi - lo),
                                    std::span(t.xi).subspan(lo, hi - lo));
  }
}

std::vector<KinkTrack> KinkTracker::persistent(std::size_t min_snapshots) const {
  std::vector<KinkTrack> out;
  for (const KinkTrack& t : tracks_) {
    if (t.times.size() >= min_snapshots) out.push_back(t);
  }
  return out;
}

}  // namespace kcl
