#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace emberline {

/// Grid coordinate. Row 0 is the northern (top) row, column 0 the western edge.
struct Cell {
  int row = 0;
  int col = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Dense row-major raster.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T fill = T{}) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Grid: negative dimensions");
    values_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
  }

  [[nodiscard]] int rows() const noexcept { return rows_; }
  [[nodiscard]] int cols() const noexcept { return cols_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] bool empty() const noexcept { return values_.empty(); }

  [[nodiscard]] bool contains(Cell c) const noexcept {
    return c.row >= 0 && c.col >= 0 && c.row < rows_ && c.col < cols_;
  }
  [[nodiscard]] std::size_t index(int r, int c) const noexcept {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
  }
  [[nodiscard]] std::size_t index(Cell c) const noexcept { return index(c.row, c.col); }

  T& operator()(int r, int c) noexcept { return values_[index(r, c)]; }
  const T& operator()(int r, int c) const noexcept { return values_[index(r, c)]; }
  T& operator[](std::size_t i) noexcept { return values_[i]; }
  const T& operator[](std::size_t i) const noexcept { return values_[i]; }
  T& at(Cell c) {
    if (!contains(c)) throw std::out_of_range("Grid::at: cell out of bounds");
    return values_[index(c)];
  }
  const T& at(Cell c) const {
    if (!contains(c)) throw std::out_of_range("Grid::at: cell out of bounds");
    return values_[index(c)];
  }

  [[nodiscard]] std::span<T> values() noexcept { return values_; }
  [[nodiscard]] std::span<const T> values() const noexcept { return values_; }

  [[nodiscard]] bool same_shape(int rows, int cols) const noexcept { return rows_ == rows && cols_ == cols; }
  template <typename U>
  [[nodiscard]] bool same_shape(const Grid<U>& other) const noexcept {
    return rows_ == other.rows() && cols_ == other.cols();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> values_;
};

}  // namespace emberline
