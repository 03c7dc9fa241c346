#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace wbdg {

template <int Dim>
using Vec = std::array<double, Dim>;

template <int Dim>
using Point = std::array<double, Dim>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

/// Uniform Cartesian mesh. Interior cells are indexed 0..N-1 per axis; ghost
/// cells extend the index range by ghost_width on each side.
template <int Dim>
class Mesh {
  static_assert(Dim == 1 || Dim == 2, "only 1D and 2D meshes");

 public:
  using Index = std::array<int, Dim>;

  Mesh(std::array<Interval, Dim> bounds, std::array<int, Dim> counts, int ghost_width = 1)
      : bounds_(bounds), counts_(counts), ghost_width_(ghost_width) {
    for (int d = 0; d < Dim; ++d) {
      if (counts[d] < 1) throw std::invalid_argument("Mesh: cell count must be >= 1");
      if (!(bounds[d].hi > bounds[d].lo)) throw std::invalid_argument("Mesh: inverted or degenerate bounds");
      spacing_[d] = (bounds[d].hi - bounds[d].lo) / counts[d];
    }
    if (ghost_width < 1) throw std::invalid_argument("Mesh: ghost_width must be >= 1");
  }

  int count(int axis) const { return counts_[axis]; }
  const std::array<int, Dim>& counts() const { return counts_; }
  double spacing(int axis) const { return spacing_[axis]; }
  const Interval& bounds(int axis) const { return bounds_[axis]; }
  int ghost_width() const { return ghost_width_; }

  int interior_cells() const {
    int n = 1;
    for (int d = 0; d < Dim; ++d) n *= counts_[d];
    return n;
  }

  /// Linear interior index with x fastest.
  int linear(const Index& idx) const {
    if constexpr (Dim == 1) {
      return idx[0];
    } else {
      return idx[1] * counts_[0] + idx[0];
    }
  }

  Index unravel(int cell) const {
    if constexpr (Dim == 1) {
      return {cell};
    } else {
      return {cell % counts_[0], cell / counts_[0]};
    }
  }

  bool is_valid(const Index& idx) const {
    for (int d = 0; d < Dim; ++d) {
      if (idx[d] < -ghost_width_ || idx[d] >= counts_[d] + ghost_width_) return false;
    }
    return true;
  }

  bool is_interior(const Index& idx) const {
    for (int d = 0; d < Dim; ++d) {
      if (idx[d] < 0 || idx[d] >= counts_[d]) return false;
    }
    return true;
  }

  Point<Dim> center(const Index& idx) const {
    check(idx);
    Point<Dim> c{};
    for (int d = 0; d < Dim; ++d) c[d] = bounds_[d].lo + (idx[d] + 0.5) * spacing_[d];
    return c;
  }

  Point<Dim> center(int cell) const { return center(unravel(cell)); }

  /// Affine map from the reference element [-1,1]^Dim onto cell idx.
  Point<Dim> map_to_physical(const Index& idx, const Point<Dim>& ref) const {
    Point<Dim> c = center(idx);
    for (int d = 0; d < Dim; ++d) c[d] += 0.5 * spacing_[d] * ref[d];
    return c;
  }

  Point<Dim> map_to_reference(const Index& idx, const Point<Dim>& x) const {
    const Point<Dim> c = center(idx);
    Point<Dim> r{};
    for (int d = 0; d < Dim; ++d) r[d] = 2.0 * (x[d] - c[d]) / spacing_[d];
    return r;
  }

  /// dx/dxi determinant: prod(spacing / 2).
  double jacobian() const {
    double j = 1.0;
    for (int d = 0; d < Dim; ++d) j *= 0.5 * spacing_[d];
    return j;
  }

  double cell_volume() const {
    double v = 1.0;
    for (int d = 0; d < Dim; ++d) v *= spacing_[d];
    return v;
  }

 private:
  void check(const Index& idx) const {
    if (!is_valid(idx)) throw std::out_of_range("Mesh: cell index outside interior and ghost layers");
  }

  std::array<Interval, Dim> bounds_;
  std::array<int, Dim> counts_;
  int ghost_width_;
  std::array<double, Dim> spacing_{};
};

template <int Dim>
Mesh<Dim> build_mesh(std::array<Interval, Dim> bounds, std::array<int, Dim> counts, int ghost_width = 1) {
  return Mesh<Dim>(bounds, counts, ghost_width);
}

}  // namespace wbdg
