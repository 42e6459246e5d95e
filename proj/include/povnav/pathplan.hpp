#pragma once
// Footprint inflation, shortest visual path, and the servo features
// lambda (horizon proximity, pixels) and phi (path alignment, radians).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "povnav/geometry.hpp"
#include "povnav/navigability.hpp"

namespace povnav {

struct SafeRegion {
  Grid<uint8_t> bits;  // 0 traversable by the robot center, 1 forbidden
  int w() const { return bits.w; }
  int h() const { return bits.h; }
};

struct VisualPath {
  std::vector<FrameBPoint> waypoints;  // first = start (possibly snapped)
  FrameBPoint target;                  // requested target
  double cost = 0.0;                   // 1 per straight step, sqrt(2) diagonal
  double target_offset = 0.0;          // pixels between target and reached end
  bool start_snapped = false;
};

struct NavFeatures {
  double lambda = 0.0;   // pixels
  double phi = 0.0;      // radians, positive toward +y
  double lambda0 = 0.0;  // setpoint
  std::array<double, 2> error{0.0, 0.0};
};

// Lateral dilation of non-navigable pixels by half the robot footprint width
// at each row's ground depth.  Rows imaging at/above the horizon reuse the
// farthest valid row's (smallest) radius.
inline SafeRegion inflate(const NavigabilityImage& nav, const CameraModel& cam,
                          double robot_width, double margin) {
  const int w = nav.w(), h = nav.h();
  const double W = robot_width + 2.0 * margin;

  std::vector<int> radius(h, 1);
  int last = 1;
  for (int r = h - 1; r >= 0; --r) {
    if (const auto z = ground_depth_at_row(cam, r)) {
      const int wpx = W <= 0 ? 0
                             : int(std::ceil(cam.fx * W / *z));
      last = (wpx + 1) / 2;
    }
    radius[r] = last;
  }

  SafeRegion out{Grid<uint8_t>(w, h, 0)};
  std::vector<int> diff(w + 1, 0);
  for (int r = 0; r < h; ++r) {
    std::fill(diff.begin(), diff.end(), 0);
    for (int c = 0; c < w; ++c) {
      if (nav.bin.bits(r, c) == 0) continue;
      const int rad = radius[r];
      diff[std::max(0, c - rad)]++;
      diff[std::min(w, c + rad + 1)]--;
    }
    int acc = 0;
    for (int c = 0; c < w; ++c) {
      acc += diff[c];
      out.bits(r, c) = acc > 0 ? 1 : 0;
    }
  }
  return out;
}

namespace detail {

constexpr std::array<int, 8> kDr{-1, 1, 0, 0, -1, -1, 1, 1};
constexpr std::array<int, 8> kDc{0, 0, -1, 1, -1, 1, -1, 1};
inline constexpr double kSqrt2 = 1.4142135623730951;

// octile distance as (straight, diagonal) step counts
struct StepPair {
  int straight;
  int diagonal;
};

inline StepPair octile_steps(int r0, int c0, int r1, int c1) {
  const int dr = std::abs(r0 - r1), dc = std::abs(c0 - c1);
  const int lo = std::min(dr, dc), hi = std::max(dr, dc);
  return {hi - lo, lo};
}

inline double octile(int r0, int c0, int r1, int c1) {
  const StepPair p = octile_steps(r0, c0, r1, c1);
  return p.straight + kSqrt2 * p.diagonal;
}

struct SearchNode {
  double f;      // canonical a + b*sqrt2 of the summed pair, so true cost
  double cross;  // ties compare exactly equal and fall through to cross
  double g;
  int32_t idx;
  bool operator<(const SearchNode& o) const {
    if (f != o.f) return f > o.f;  // min-heap on f
    if (cross != o.cross) return cross > o.cross;
    if (g != o.g) return g < o.g;  // prefer larger g (deeper) on ties
    return idx > o.idx;
  }
};

// Search scratch persists per thread: a blocked sub-goal makes the search
// sweep the whole reachable component, and reallocating plus zeroing four
// full-grid arrays every frame costs more than the sweep itself.  A cell is
// valid this call iff its stamp reaches `epoch` (epoch = relaxed, epoch + 1 =
// closed); stale cells from earlier calls always carry smaller stamps.
struct PlanScratch {
  std::vector<int32_t> ds, dd, parent;
  std::vector<uint32_t> stamp;
  std::vector<SearchNode> heap;
  std::vector<int32_t> fifo;
  uint32_t epoch = 0;

  void begin(size_t n) {
    if (ds.size() < n) {
      ds.resize(n);
      dd.resize(n);
      parent.resize(n);
      stamp.resize(n, 0);
    }
    if (epoch >= std::numeric_limits<uint32_t>::max() - 2) {
      std::fill(stamp.begin(), stamp.end(), 0);
      epoch = 0;
    }
    epoch += 2;
    heap.clear();
  }
};

inline PlanScratch& plan_scratch() {
  static thread_local PlanScratch s;
  return s;
}

}  // namespace detail

// Shortest 8-connected path through the traversable set.  A blocked start is
// snapped to the nearest traversable pixel within `snap_radius` (euclidean,
// deterministic tie order); an unreachable target resolves to the reachable
// pixel nearest it, with the gap recorded.  nullopt = nothing traversable
// near the start.
inline std::optional<VisualPath> plan_path(const SafeRegion& safe,
                                           FrameBPoint start, FrameBPoint target,
                                           int snap_radius = 15) {
  const int w = safe.w(), h = safe.h();
  const RasterIndex s0 = frameb_to_raster(start, w, h);
  const RasterIndex t0 = frameb_to_raster(target, w, h);

  RasterIndex s = s0;
  bool snapped = false;
  if (safe.bits(s.row, s.col) != 0) {
    // squared integer distances order identically to the euclidean ones
    const int64_t limit2 = int64_t(snap_radius) * snap_radius;
    int64_t best2 = std::numeric_limits<int64_t>::max();
    RasterIndex pick{-1, -1};
    for (int r = std::max(0, s0.row - snap_radius);
         r <= std::min(h - 1, s0.row + snap_radius); ++r)
      for (int c = std::max(0, s0.col - snap_radius);
           c <= std::min(w - 1, s0.col + snap_radius); ++c) {
        if (safe.bits(r, c) != 0) continue;
        const int64_t d2 = int64_t(r - s0.row) * (r - s0.row) +
                           int64_t(c - s0.col) * (c - s0.col);
        if (d2 <= limit2 && d2 < best2) {
          best2 = d2;
          pick = {r, c};
        }
      }
    if (pick.row < 0) return std::nullopt;
    s = pick;
    snapped = true;
  }

  const size_t n = size_t(w) * h;
  detail::PlanScratch& scr = detail::plan_scratch();
  const auto id = [w](int r, int c) { return int32_t(r) * w + c; };
  const int32_t start_id = id(s.row, s.col);

  // A target the inflation has swallowed (the usual case when the sub-goal
  // sits on the free-space border) can never be reached, and aiming the heap
  // search at it would sweep the entire reachable component in cost order.
  // A plain flood of the component costs ~50x less; the search then runs
  // toward the reachable pixel nearest the target instead.  A free target
  // skips the flood and keeps the search focused.
  RasterIndex t1 = t0;
  double offset = 0.0;
  if (safe.bits(t0.row, t0.col) != 0) {
    scr.begin(n);
    const uint32_t mark = scr.epoch;
    std::vector<int32_t>& fifo = scr.fifo;
    fifo.clear();
    fifo.push_back(start_id);
    scr.stamp[start_id] = mark;
    for (size_t head = 0; head < fifo.size(); ++head) {
      const int r = fifo[head] / w, c = fifo[head] % w;
      for (int k = 0; k < 8; ++k) {
        const int nr = r + detail::kDr[k], nc = c + detail::kDc[k];
        if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
        if (safe.bits(nr, nc) != 0) continue;
        const int32_t ni = id(nr, nc);
        if (scr.stamp[ni] >= mark) continue;
        scr.stamp[ni] = mark;
        fifo.push_back(ni);
      }
    }
    // same pick the exhaustive search used to make: smallest distance to the
    // target, then lowest row-major index
    int64_t best2 = std::numeric_limits<int64_t>::max();
    int32_t near_id = -1;
    for (const int32_t i : fifo) {
      const int r = i / w, c = i % w;
      const int64_t d2 = int64_t(r - t0.row) * (r - t0.row) +
                         int64_t(c - t0.col) * (c - t0.col);
      if (d2 < best2 || (d2 == best2 && i < near_id)) {
        best2 = d2;
        near_id = i;
      }
    }
    t1 = {near_id / w, near_id % w};
    offset = std::sqrt(double(best2));
  }

  // Costs live in Z + Z*sqrt2 (straight steps, diagonal steps).  sqrt2 is
  // irrational, so two paths cost the same exactly when the integer pairs
  // match; ties are then real ties and can be broken toward the straight
  // start-to-target chord.  Float accumulation would instead order equal-cost
  // paths by ulp noise and the traced prefix would flap between frames.
  scr.begin(n);
  const uint32_t seen = scr.epoch, done = scr.epoch + 1;
  std::vector<int32_t>&ds = scr.ds, &dd = scr.dd, &parent = scr.parent;
  std::vector<uint32_t>& stamp = scr.stamp;
  std::vector<detail::SearchNode>& open = scr.heap;
  const auto value = [](int32_t a, int32_t b) { return a + b * detail::kSqrt2; };

  const double chord_r = double(t1.row - s.row), chord_c = double(t1.col - s.col);
  const auto cross_track = [&](int r, int c) {
    return std::fabs((r - s.row) * chord_c - (c - s.col) * chord_r);
  };
  const auto push = [&open](detail::SearchNode nd) {
    open.push_back(nd);
    std::push_heap(open.begin(), open.end());
  };
  const auto f_of = [&](int32_t ga, int32_t gb, int r, int c) {
    const detail::StepPair o = detail::octile_steps(r, c, t1.row, t1.col);
    return value(ga + o.straight, gb + o.diagonal);
  };
  ds[start_id] = 0;
  dd[start_id] = 0;
  parent[start_id] = -1;
  stamp[start_id] = seen;
  push({f_of(0, 0, s.row, s.col), 0.0, 0.0, start_id});
  int minr = s.row, maxr = s.row, minc = s.col, maxc = s.col;

  int32_t end_id = id(t1.row, t1.col);
  bool reached = false;
  while (!open.empty()) {
    std::pop_heap(open.begin(), open.end());
    const detail::SearchNode top = open.back();
    open.pop_back();
    if (stamp[top.idx] == done) continue;
    stamp[top.idx] = done;
    if (top.idx == end_id) {
      reached = true;
      break;
    }
    const int r = top.idx / w, c = top.idx % w;
    const int32_t ga = ds[top.idx], gb = dd[top.idx];
    for (int k = 0; k < 8; ++k) {
      const int nr = r + detail::kDr[k], nc = c + detail::kDc[k];
      if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
      if (safe.bits(nr, nc) != 0) continue;
      const int32_t na = ga + (k < 4 ? 1 : 0), nb = gb + (k < 4 ? 0 : 1);
      const int32_t ni = id(nr, nc);
      const double g = value(na, nb);
      if (stamp[ni] >= seen && g >= value(ds[ni], dd[ni])) continue;
      ds[ni] = na;
      dd[ni] = nb;
      parent[ni] = top.idx;
      stamp[ni] = std::max(stamp[ni], seen);  // never reopens a closed cell
      minr = std::min(minr, nr);
      maxr = std::max(maxr, nr);
      minc = std::min(minc, nc);
      maxc = std::max(maxc, nc);
      push({f_of(na, nb, nr, nc), cross_track(nr, nc), g, ni});
    }
  }

  // a free target in a different component than the start still exhausts;
  // resolve to the nearest pixel the search relaxed, matching the flood pick
  if (!reached) {
    int64_t best2 = std::numeric_limits<int64_t>::max();
    end_id = -1;
    for (int r = minr; r <= maxr; ++r)
      for (int c = minc; c <= maxc; ++c) {
        const int32_t i = id(r, c);
        if (stamp[i] < seen) continue;
        const int64_t d2 = int64_t(r - t0.row) * (r - t0.row) +
                           int64_t(c - t0.col) * (c - t0.col);
        if (d2 < best2 || (d2 == best2 && i < end_id)) {
          best2 = d2;
          end_id = i;
        }
      }
    offset = std::sqrt(double(best2));
  }

  VisualPath path;
  path.target = target;
  path.cost = value(ds[end_id], dd[end_id]);
  path.target_offset = offset;
  path.start_snapped = snapped;

  for (int32_t i = end_id; i != -1; i = parent[i])
    path.waypoints.push_back(raster_to_frameb({i / w, i % w}, w, h));
  std::reverse(path.waypoints.begin(), path.waypoints.end());
  return path;
}

// lambda = min pixel distance from p^s to the horizon; fully blocked columns
// contribute the distance of their base pixel.
inline double proximity_feature(const NavigabilityImage& nav) {
  const int w = nav.w();
  const int cm = w / 2;
  double best = std::numeric_limits<double>::infinity();
  for (int c = 0; c < w; ++c) {
    const double y = c - cm;
    const double d = nav.base_navigable(c)
                         ? std::hypot(double(nav.horizon.psi[c]), y)
                         : std::fabs(y);
    best = std::min(best, d);
  }
  return best;
}

// phi = signed angle between straight-up and the chord from p^s to the
// waypoint at arc length `lookahead_px` (the last waypoint on short paths).
inline double alignment_feature(const VisualPath& path, double lookahead_px) {
  if (path.waypoints.size() < 2) return 0.0;
  size_t pick = path.waypoints.size() - 1;
  double acc = 0.0;
  for (size_t i = 1; i < path.waypoints.size(); ++i) {
    const auto& a = path.waypoints[i - 1];
    const auto& b = path.waypoints[i];
    acc += (a.x != b.x && a.y != b.y) ? detail::kSqrt2 : 1.0;
    if (acc >= lookahead_px) {
      pick = i;
      break;
    }
  }
  const auto& wp = path.waypoints[pick];
  if (wp.x == 0 && wp.y == 0) return 0.0;
  return std::clamp(std::atan2(double(wp.y), double(wp.x)), -kPi / 2, kPi / 2);
}

inline std::array<double, 2> compute_error(double lambda, double phi,
                                           double lambda0) {
  return {lambda - lambda0, phi};
}

inline NavFeatures compute_features(const NavigabilityImage& nav,
                                    const VisualPath& path, double lookahead_px,
                                    double lambda0) {
  NavFeatures f;
  f.lambda = proximity_feature(nav);
  f.phi = alignment_feature(path, lookahead_px);
  f.lambda0 = lambda0;
  f.error = compute_error(f.lambda, f.phi, lambda0);
  return f;
}

}  // namespace povnav
