#pragma once
// Goal bearing -> border pixel (POG), Pareto front over the visual horizon,
// and weighted-sum sub-goal selection (HOG).

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "povnav/geometry.hpp"
#include "povnav/navigability.hpp"

namespace povnav {

struct Pog {
  FrameBPoint point;
  double bearing = 0.0;  // the Theta that produced it
};

struct ObjectivePair {
  double f1 = 0.0;  // radians, minimize
  double f2 = 0.0;  // pixels, maximize
};

struct FrontEntry {
  FrameBPoint p;
  ObjectivePair obj;
};

// Angular deviation between p and the POG as seen from p^s, wrapped to [0, pi].
// p^s itself has no defined angle; it scores 0 by convention.
inline double f1(FrameBPoint p, FrameBPoint pog) {
  if (p.x == 0 && p.y == 0) return 0.0;
  const double ap = std::atan2(double(p.y), double(p.x));
  const double ag = std::atan2(double(pog.y), double(pog.x));
  double d = std::fabs(ap - ag);
  if (d > kPi) d = 2.0 * kPi - d;
  return d;
}

inline double f2(FrameBPoint p) {
  return std::hypot(double(p.x), double(p.y));
}

// Map the goal bearing onto the image border.  |Theta| <= pi/2 runs linearly
// along the U path bottom-left corner -> left border -> top border -> right
// border -> bottom-right corner (Theta = +pi/2, 0, -pi/2 at the marked
// stops).  Larger |Theta| saturates onto the bottom border, reaching the
// pixel adjacent to p^s at Theta = +-pi.
inline Pog map_pog(double theta, int w, int h) {
  detail::check_dims(w, h);
  const int cm = w / 2;
  FrameBPoint p;
  if (std::fabs(theta) <= kPi / 2) {
    const double L = 2.0 * (h - 1) + (w - 1);  // U-path arc length
    const double s = L * (kPi / 2 - theta) / kPi;
    const double s_left = h - 1;          // end of the left border
    const double s_top = s_left + w - 1;  // end of the top border
    if (s <= s_left) {
      p = {int(std::lround(s)), -cm};
    } else if (s <= s_top) {
      p = {h - 1, int(std::lround(s - s_left)) - cm};
    } else {
      p = {h - 1 - int(std::lround(s - s_top)), (w - 1) - cm};
    }
  } else {
    // bottom border, from the corner toward (but never reaching) p^s
    const double u = (kPi - std::fabs(theta)) / (kPi / 2);  // 1 at corner, 0 at pi
    if (theta > 0) {
      const int y = -1 - int(std::lround(u * (cm - 1)));
      p = {0, y};
    } else {
      const int y_right = (w - 1) - cm;
      const int y = 1 + int(std::lround(u * (y_right - 1)));
      p = {0, y};
    }
  }
  return {p, theta};
}

// Non-dominated subset of the horizon pixels under (min f1, max f2), ordered
// by ascending column.  Empty when no column has a navigable base.
inline std::vector<FrontEntry> pareto_front(const NavigabilityImage& nav,
                                            const Pog& pog) {
  const int w = nav.w();
  const int cm = w / 2;
  struct Cand {
    FrameBPoint p;
    ObjectivePair o;
    int col;
  };
  std::vector<Cand> cands;
  cands.reserve(w);
  for (int c = 0; c < w; ++c) {
    if (!nav.base_navigable(c)) continue;
    FrameBPoint p{nav.horizon.psi[c], c - cm};
    cands.push_back({p, {f1(p, pog.point), f2(p)}, c});
  }
  if (cands.empty()) return {};

  std::vector<int> order(cands.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (cands[a].o.f1 != cands[b].o.f1) return cands[a].o.f1 < cands[b].o.f1;
    if (cands[a].o.f2 != cands[b].o.f2) return cands[a].o.f2 > cands[b].o.f2;
    return cands[a].col < cands[b].col;
  });

  // Sweep by increasing f1: a candidate survives iff its f2 strictly exceeds
  // every f2 seen at strictly smaller f1.  Equal objective pairs all survive.
  std::vector<int> kept;
  double best_f2 = -1.0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    const double group_f1 = cands[order[i]].o.f1;
    const double group_max = cands[order[i]].o.f2;
    while (j < order.size() && cands[order[j]].o.f1 == group_f1) ++j;
    if (group_max > best_f2) {
      for (size_t k = i; k < j; ++k)
        if (cands[order[k]].o.f2 == group_max) kept.push_back(order[k]);
      best_f2 = group_max;
    }
    i = j;
  }
  std::sort(kept.begin(), kept.end(),
            [&](int a, int b) { return cands[a].col < cands[b].col; });

  std::vector<FrontEntry> out;
  out.reserve(kept.size());
  for (int k : kept) out.push_back({cands[k].p, cands[k].o});
  return out;
}

// Weighted-sum scalarization over the front.  f1 and the minimization form
// of f2 (distance to the POG) are min-max normalized per call unless
// `normalize` is off; ties break toward smaller f1, then smaller column.
inline FrameBPoint select_hog(const std::vector<FrontEntry>& front,
                              const Pog& pog, double w1, double w2,
                              bool normalize = true,
                              std::vector<double>* scores_out = nullptr) {
  if (front.empty())
    throw std::runtime_error("no feasible sub-goal: empty Pareto front");
  if (w1 < 0 || w2 < 0 || (w1 == 0 && w2 == 0))
    throw std::invalid_argument("weights must be non-negative and not both zero");

  const size_t n = front.size();
  std::vector<double> g1(n), g2(n);
  for (size_t i = 0; i < n; ++i) {
    g1[i] = front[i].obj.f1;
    g2[i] = std::hypot(double(pog.point.x - front[i].p.x),
                       double(pog.point.y - front[i].p.y));
  }
  if (normalize) {
    for (auto* g : {&g1, &g2}) {
      const auto [mn, mx] = std::minmax_element(g->begin(), g->end());
      const double lo = *mn, range = *mx - *mn;
      for (double& v : *g) v = range > 0 ? (v - lo) / range : 0.0;
    }
  }

  size_t best = 0;
  std::vector<double> scores(n);
  for (size_t i = 0; i < n; ++i) {
    scores[i] = w1 * g1[i] + w2 * g2[i];
    if (i == 0) continue;
    const auto key = [&](size_t k) {
      return std::make_tuple(scores[k], front[k].obj.f1, front[k].p.y);
    };
    if (key(i) < key(best)) best = i;
  }
  if (scores_out) *scores_out = std::move(scores);
  return front[best].p;
}

struct SubgoalResult {
  Pog pog;
  std::vector<FrontEntry> front;
  std::optional<FrameBPoint> hog;  // nullopt = no feasible sub-goal
  ObjectivePair hog_obj;
};

inline SubgoalResult select_subgoal(const NavigabilityImage& nav, double theta,
                                    double w1, double w2, bool normalize = true) {
  SubgoalResult out;
  out.pog = map_pog(theta, nav.w(), nav.h());
  out.front = pareto_front(nav, out.pog);
  if (!out.front.empty()) {
    const FrameBPoint hog = select_hog(out.front, out.pog, w1, w2, normalize);
    out.hog = hog;
    for (const auto& e : out.front)
      if (e.p == hog) out.hog_obj = e.obj;
  }
  return out;
}

// Reference-only dominance filter over every navigable pixel, not just the
// horizon.  Quadratic; refuses images larger than 64x64.
inline std::vector<FrameBPoint> brute_force_pareto(const NavigabilityImage& nav,
                                                   const Pog& pog) {
  const int w = nav.w(), h = nav.h();
  if (w > 64 || h > 64)
    throw std::invalid_argument("brute_force_pareto limited to 64x64 images");
  struct Cand {
    FrameBPoint p;
    double f1v, f2v;
  };
  std::vector<Cand> cs;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (nav.bin.bits(r, c) == 0) {
        const FrameBPoint p = raster_to_frameb({r, c}, w, h);
        cs.push_back({p, f1(p, pog.point), f2(p)});
      }
  std::vector<FrameBPoint> out;
  for (size_t i = 0; i < cs.size(); ++i) {
    bool dominated = false;
    for (size_t j = 0; j < cs.size() && !dominated; ++j) {
      if (j == i) continue;
      const bool not_worse = cs[j].f1v <= cs[i].f1v && cs[j].f2v >= cs[i].f2v;
      const bool better = cs[j].f1v < cs[i].f1v || cs[j].f2v > cs[i].f2v;
      dominated = not_worse && better;
    }
    if (!dominated) out.push_back(cs[i].p);
  }
  std::sort(out.begin(), out.end(), [](const FrameBPoint& a, const FrameBPoint& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  return out;
}

}  // namespace povnav
