#pragma once
// Row-major 2-D buffer shared by label, bit, and range images.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace povnav {

template <typename T>
struct Grid {
  int w = 0;
  int h = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(int w_, int h_, T init = T{}) : w(w_), h(h_) {
    if (w_ <= 0 || h_ <= 0)
      throw std::invalid_argument("grid dims must be positive, got " +
                                  std::to_string(w_) + "x" + std::to_string(h_));
    data.assign(static_cast<size_t>(w_) * h_, init);
  }

  bool in_bounds(int row, int col) const {
    return row >= 0 && row < h && col >= 0 && col < w;
  }
  size_t idx(int row, int col) const {
    return static_cast<size_t>(row) * w + col;
  }

  // Unchecked hot-path access.
  T& operator()(int row, int col) { return data[idx(row, col)]; }
  const T& operator()(int row, int col) const { return data[idx(row, col)]; }

  T& at(int row, int col) {
    if (!in_bounds(row, col))
      throw std::out_of_range("grid index (" + std::to_string(row) + "," +
                              std::to_string(col) + ") outside " +
                              std::to_string(w) + "x" + std::to_string(h));
    return data[idx(row, col)];
  }
  const T& at(int row, int col) const {
    return const_cast<Grid*>(this)->at(row, col);
  }

  friend bool operator==(const Grid&, const Grid&) = default;
};

}  // namespace povnav
