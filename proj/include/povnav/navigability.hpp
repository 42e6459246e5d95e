#pragma once
// Segmentation labels -> binary navigability image + visual horizon.
//
// Bit convention everywhere: 0 = navigable, 1 = non-navigable.
// The horizon psi[col] is the height (frame-B x) of the last pixel of the
// contiguous navigable run growing up from the bottom row; everything above
// it is treated as out of reach regardless of its label.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "povnav/geometry.hpp"
#include "povnav/grid.hpp"

namespace povnav {

struct SegmentedImage {
  Grid<uint8_t> labels;
  int w() const { return labels.w; }
  int h() const { return labels.h; }
};

struct BinaryImage {
  Grid<uint8_t> bits;  // 0 navigable, 1 non-navigable
  int w() const { return bits.w; }
  int h() const { return bits.h; }
};

struct ClassEntry {
  int id = 0;
  bool navigable = false;
  std::string name;
};

// The navigability definition: which segmentation classes count as ground
// the robot may drive on.  Editing it flips terrain preferences at runtime.
struct ClassMap {
  std::vector<ClassEntry> entries;

  void validate() const {
    bool any_nav = false, any_non = false;
    std::vector<bool> seen(256, false);
    for (const auto& e : entries) {
      if (e.id < 0 || e.id > 255)
        throw std::invalid_argument("class id " + std::to_string(e.id) +
                                    " outside [0,255]");
      if (seen[e.id])
        throw std::invalid_argument("duplicate class id " + std::to_string(e.id));
      seen[e.id] = true;
      (e.navigable ? any_nav : any_non) = true;
    }
    if (!any_nav || !any_non)
      throw std::invalid_argument(
          "class map needs at least one navigable and one non-navigable class");
  }

  // -1 unknown, else 0/1 navigability.
  std::vector<int8_t> lut() const {
    std::vector<int8_t> t(256, -1);
    for (const auto& e : entries) t[e.id] = e.navigable ? 1 : 0;
    return t;
  }

  bool navigable(int id) const {
    for (const auto& e : entries)
      if (e.id == id) return e.navigable;
    throw std::invalid_argument("unknown class id " + std::to_string(id));
  }
};

struct VisualHorizon {
  std::vector<int> psi;  // per column, frame-B height of the horizon pixel
};

struct NavigabilityImage {
  BinaryImage bin;
  VisualHorizon horizon;
  int w() const { return bin.w(); }
  int h() const { return bin.h(); }
  // psi = 0 is ambiguous on its own; the base bit disambiguates a one-pixel
  // run from a blocked column.
  bool base_navigable(int col) const { return bin.bits(bin.h() - 1, col) == 0; }
};

inline BinaryImage binarize(const SegmentedImage& seg, const ClassMap& omega) {
  const auto lut = omega.lut();
  BinaryImage out{Grid<uint8_t>(seg.w(), seg.h(), 0)};
  for (int r = 0; r < seg.h(); ++r)
    for (int c = 0; c < seg.w(); ++c) {
      const int8_t v = lut[seg.labels(r, c)];
      if (v < 0)
        throw std::invalid_argument(
            "unknown class id " + std::to_string(int(seg.labels(r, c))) +
            " at pixel (" + std::to_string(r) + "," + std::to_string(c) + ")");
      out.bits(r, c) = v ? 0 : 1;
    }
  return out;
}

// Keep only the 4-connected navigable component containing p^s; enclosed
// navigable holes become non-navigable.  If p^s itself is blocked, seed from
// the bottom-row navigable pixel nearest the center (ties toward smaller
// column); a fully blocked bottom row yields all-ones.
inline BinaryImage retain_reachable(const BinaryImage& bin) {
  const int w = bin.w(), h = bin.h();
  BinaryImage out{Grid<uint8_t>(w, h, 1)};

  int seed_col = -1;
  const int center = w / 2;
  if (bin.bits(h - 1, center) == 0) {
    seed_col = center;
  } else {
    int best = -1;
    for (int c = 0; c < w; ++c) {
      if (bin.bits(h - 1, c) != 0) continue;
      if (best < 0 || std::abs(c - center) < std::abs(best - center) ||
          (std::abs(c - center) == std::abs(best - center) && c < best))
        best = c;
    }
    seed_col = best;
  }
  if (seed_col < 0) return out;

  // scanline flood: ground is mostly long free runs, so queueing maximal
  // spans instead of pixels cuts the queue traffic by the mean run length
  struct Span {
    int32_t r, c0, c1;
  };
  static thread_local std::vector<Span> q;
  q.clear();
  const auto fill_run = [&](int r, int c) {
    int c0 = c, c1 = c;
    while (c0 > 0 && bin.bits(r, c0 - 1) == 0 && out.bits(r, c0 - 1) != 0) --c0;
    while (c1 + 1 < w && bin.bits(r, c1 + 1) == 0 && out.bits(r, c1 + 1) != 0)
      ++c1;
    for (int i = c0; i <= c1; ++i) out.bits(r, i) = 0;
    q.push_back({r, c0, c1});
  };
  fill_run(h - 1, seed_col);
  for (size_t head = 0; head < q.size(); ++head) {
    const Span sp = q[head];
    for (const int nr : {sp.r - 1, sp.r + 1}) {
      if (nr < 0 || nr >= h) continue;
      for (int c = sp.c0; c <= sp.c1; ++c) {
        if (bin.bits(nr, c) != 0 || out.bits(nr, c) == 0) continue;
        fill_run(nr, c);
        c = q.back().c1;  // the new span covers at least up to here
      }
    }
  }
  return out;
}

inline VisualHorizon extract_horizon(const BinaryImage& bin) {
  const int w = bin.w(), h = bin.h();
  VisualHorizon hz;
  hz.psi.assign(w, 0);
  for (int c = 0; c < w; ++c) {
    if (bin.bits(h - 1, c) != 0) continue;  // blocked base: psi stays 0
    int run = 0;
    while (run < h && bin.bits(h - 1 - run, c) == 0) ++run;
    hz.psi[c] = run - 1;
  }
  return hz;
}

// Reachability filter + per-column horizon enforcement.  Output columns are
// monotone: navigable exactly on x in [0, psi] when the base is navigable,
// fully non-navigable otherwise.
inline NavigabilityImage build_navigability_image(const BinaryImage& bin) {
  const BinaryImage reach = retain_reachable(bin);
  VisualHorizon hz = extract_horizon(reach);
  const int w = bin.w(), h = bin.h();
  NavigabilityImage out{BinaryImage{Grid<uint8_t>(w, h, 1)}, std::move(hz)};
  for (int c = 0; c < w; ++c) {
    if (reach.bits(h - 1, c) != 0) continue;
    for (int x = 0; x <= out.horizon.psi[c]; ++x)
      out.bin.bits(h - 1 - x, c) = 0;
  }
  return out;
}

}  // namespace povnav
