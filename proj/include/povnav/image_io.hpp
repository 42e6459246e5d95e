#pragma once
// Lossless raster I/O (binary PGM/PPM, PFM for depth) and the diagnostic
// overlay painter.

#include <array>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "povnav/geometry.hpp"
#include "povnav/navigability.hpp"
#include "povnav/pathplan.hpp"
#include "povnav/sim.hpp"
#include "povnav/subgoal.hpp"

namespace povnav {

inline void write_pgm(const std::string& path, const Grid<uint8_t>& img) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "P5\n" << img.w << " " << img.h << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.data.data()),
          std::streamsize(img.data.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

namespace detail {
inline int pnm_token(std::istream& in) {
  // skips whitespace and '#' comments
  while (true) {
    const int ch = in.peek();
    if (ch == std::istream::traits_type::eof()) break;
    if (ch == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      in.get();
    } else {
      break;
    }
  }
  int v;
  if (!(in >> v)) throw std::runtime_error("malformed PNM header");
  return v;
}
}  // namespace detail

inline Grid<uint8_t> read_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::string magic;
  f >> magic;
  if (magic != "P5") throw std::runtime_error("not a binary PGM: " + path);
  const int w = detail::pnm_token(f);
  const int h = detail::pnm_token(f);
  const int maxval = detail::pnm_token(f);
  if (maxval <= 0 || maxval > 255)
    throw std::runtime_error("unsupported PGM maxval in " + path);
  f.get();  // single whitespace after header
  Grid<uint8_t> img(w, h);
  f.read(reinterpret_cast<char*>(img.data.data()),
         std::streamsize(img.data.size()));
  if (!f) throw std::runtime_error("truncated PGM: " + path);
  return img;
}

struct RgbImage {
  int w = 0, h = 0;
  std::vector<uint8_t> px;  // rgb triplets, row-major

  RgbImage() = default;
  RgbImage(int w_, int h_) : w(w_), h(h_), px(size_t(w_) * h_ * 3, 0) {}

  void set(int row, int col, uint8_t r, uint8_t g, uint8_t b) {
    if (row < 0 || row >= h || col < 0 || col >= w) return;
    const size_t i = (size_t(row) * w + col) * 3;
    px[i] = r;
    px[i + 1] = g;
    px[i + 2] = b;
  }

  void disc(int row, int col, int rad, uint8_t r, uint8_t g, uint8_t b) {
    for (int dr = -rad; dr <= rad; ++dr)
      for (int dc = -rad; dc <= rad; ++dc)
        if (dr * dr + dc * dc <= rad * rad) set(row + dr, col + dc, r, g, b);
  }
};

inline void write_ppm(const std::string& path, const RgbImage& img) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "P6\n" << img.w << " " << img.h << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.px.data()),
          std::streamsize(img.px.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

// Little-endian PFM, bottom-up rows per the format convention.
inline void write_pfm(const std::string& path, const Grid<float>& img) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "Pf\n" << img.w << " " << img.h << "\n-1.0\n";
  for (int r = img.h - 1; r >= 0; --r)
    f.write(reinterpret_cast<const char*>(&img.data[img.idx(r, 0)]),
            std::streamsize(sizeof(float) * img.w));
  if (!f) throw std::runtime_error("write failed: " + path);
}

// Fig.-3-style diagnostic frame: navigability shading, safe-region boundary,
// horizon polyline, planned path, POG/HOG markers, and the closest horizon
// point.
inline RgbImage draw_overlay(const NavigabilityImage& nav,
                             const SafeRegion* safe, const VisualPath* path,
                             const std::optional<Pog>& pog,
                             const std::optional<FrameBPoint>& hog) {
  const int w = nav.w(), h = nav.h();
  RgbImage img(w, h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (nav.bin.bits(r, c) == 0)
        img.set(r, c, 168, 208, 168);  // navigable: pale green
      else
        img.set(r, c, 64, 64, 64);  // non-navigable: dark gray
    }
  if (safe) {
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        if (safe->bits(r, c) != 0 || nav.bin.bits(r, c) != 0) continue;
        // traversable pixel adjacent to a forbidden one: boundary
        bool edge = false;
        for (int k = 0; k < 4 && !edge; ++k) {
          const int nr = r + (k == 0) - (k == 1);
          const int nc = c + (k == 2) - (k == 3);
          if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
          edge = safe->bits(nr, nc) != 0;
        }
        if (edge) img.set(r, c, 80, 120, 230);
      }
  }
  // horizon polyline + closest point
  int best_col = -1;
  double best_d = 0;
  for (int c = 0; c < w; ++c) {
    if (!nav.base_navigable(c)) continue;
    const int r = h - 1 - nav.horizon.psi[c];
    img.set(r, c, 250, 220, 60);
    const double d = std::hypot(double(nav.horizon.psi[c]), double(c - w / 2));
    if (best_col < 0 || d < best_d) {
      best_d = d;
      best_col = c;
    }
  }
  if (path) {
    for (const auto& p : path->waypoints) {
      const RasterIndex ri = frameb_to_raster(p, w, h);
      img.set(ri.row, ri.col, 30, 160, 30);
    }
  }
  if (best_col >= 0)
    img.disc(h - 1 - nav.horizon.psi[best_col], best_col, 2, 230, 60, 60);
  if (pog) {
    const RasterIndex ri = frameb_to_raster(pog->point, w, h);
    img.disc(ri.row, ri.col, 3, 60, 60, 230);
  }
  if (hog) {
    const RasterIndex ri = frameb_to_raster(*hog, w, h);
    img.disc(ri.row, ri.col, 3, 230, 120, 40);
  }
  return img;
}

}  // namespace povnav
