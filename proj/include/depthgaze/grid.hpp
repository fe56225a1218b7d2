#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "depthgaze/errors.hpp"

namespace depthgaze {

struct ImageSize {
  int height = 0;
  int width = 0;

  std::size_t area() const { return static_cast<std::size_t>(height) * static_cast<std::size_t>(width); }
  bool contains(int row, int col) const { return row >= 0 && row < height && col >= 0 && col < width; }
  bool operator==(const ImageSize&) const = default;
};

struct PixelIndex {
  int row = 0;
  int col = 0;
  bool operator==(const PixelIndex&) const = default;
};

/// Dense row-major H x W grid.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(ImageSize size, T fill = T{}) : size_(size), data_(checked_area(size), fill) {}
  Grid(ImageSize size, std::vector<T> values) : size_(size), data_(std::move(values)) {
    if (data_.size() != checked_area(size)) {
      throw DimensionError("grid value count does not match height * width");
    }
  }

  ImageSize size() const { return size_; }
  int height() const { return size_.height; }
  int width() const { return size_.width; }
  std::size_t area() const { return data_.size(); }

  const T& operator()(int row, int col) const { return data_[index(row, col)]; }
  T& operator()(int row, int col) { return data_[index(row, col)]; }

  std::span<const T> values() const { return data_; }
  std::span<T> values() { return data_; }

  bool operator==(const Grid&) const = default;

 protected:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(size_.width) + static_cast<std::size_t>(col);
  }

 private:
  static std::size_t checked_area(ImageSize size) {
    if (size.height < 0 || size.width < 0) throw DimensionError("negative grid dimension");
    return size.area();
  }

  ImageSize size_{};
  std::vector<T> data_;
};

/// Boolean H x W mask. Stored as bytes holding exactly 0 or 1.
class BinaryMask : public Grid<std::uint8_t> {
 public:
  BinaryMask() = default;
  explicit BinaryMask(ImageSize size, bool fill = false) : Grid(size, fill ? 1 : 0) {}

  bool at(int row, int col) const { return (*this)(row, col) != 0; }
  void set(int row, int col, bool value = true) { (*this)(row, col) = value ? 1 : 0; }
  std::size_t count() const;
};

/// Real-valued H x W map (gaze heatmap, soft mask).
class Heatmap : public Grid<double> {
 public:
  Heatmap() = default;
  explicit Heatmap(ImageSize size, double fill = 0.0) : Grid(size, fill) {}
  /// Throws InvalidInputError on non-finite values.
  Heatmap(ImageSize size, std::vector<double> values);

  static Heatmap from_mask(const BinaryMask& mask);
};

}  // namespace depthgaze
