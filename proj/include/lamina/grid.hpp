#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace lamina {

// Dense 2D grid, x (column) fastest.
template <typename T>
class Grid2 {
 public:
  Grid2() = default;
  Grid2(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * height, fill) {
    assert(width >= 0 && height >= 0);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  T& at(int ix, int iy) {
    assert(ix >= 0 && ix < width_ && iy >= 0 && iy < height_);
    return data_[static_cast<std::size_t>(iy) * width_ + ix];
  }
  const T& at(int ix, int iy) const {
    assert(ix >= 0 && ix < width_ && iy >= 0 && iy < height_);
    return data_[static_cast<std::size_t>(iy) * width_ + ix];
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Grid2&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

// Dense 3D grid, x fastest, then y, then z.
template <typename T>
class Grid3 {
 public:
  Grid3() = default;
  Grid3(int nx, int ny, int nz, T fill = T{})
      : nx_(nx), ny_(ny), nz_(nz),
        data_(static_cast<std::size_t>(nx) * ny * nz, fill) {
    assert(nx >= 0 && ny >= 0 && nz >= 0);
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(int ix, int iy, int iz) const {
    assert(ix >= 0 && ix < nx_ && iy >= 0 && iy < ny_ && iz >= 0 && iz < nz_);
    return (static_cast<std::size_t>(iz) * ny_ + iy) * nx_ + ix;
  }

  T& at(int ix, int iy, int iz) { return data_[index(ix, iy, iz)]; }
  const T& at(int ix, int iy, int iz) const { return data_[index(ix, iy, iz)]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Grid3&) const = default;

 private:
  int nx_ = 0;
  int ny_ = 0;
  int nz_ = 0;
  std::vector<T> data_;
};

}  // namespace lamina
