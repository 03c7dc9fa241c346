#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbdg/basis.hpp"
#include "wbdg/euler.hpp"
#include "wbdg/field.hpp"
#include "wbdg/mesh.hpp"

namespace wbdg {

/// Modal coefficients of one field plus enough metadata to rebuild the mesh.
/// For delta-formulation runs the payload is delta w and `is_delta` is set.
struct Snapshot {
  static constexpr char kMagic[8] = {'W', 'B', 'D', 'G', 'S', 'N', 'A', 'P'};
  static constexpr std::uint32_t kVersion = 1;

  std::string case_name;
  std::string scheme;
  int order = 0;
  int dims = 1;
  std::array<int, 2> n{1, 1};
  std::array<Interval, 2> domain{};
  int degree = 0;
  double time = 0.0;
  double gamma = 1.4;
  std::uint64_t config_hash = 0;
  bool is_delta = false;
  std::vector<double> coefficients;
};

template <int Dim>
Snapshot make_snapshot(const SolutionField<Dim>& field, std::string case_name, std::string scheme, int order,
                       double gamma, std::uint64_t config_hash, bool is_delta) {
  Snapshot s;
  s.case_name = std::move(case_name);
  s.scheme = std::move(scheme);
  s.order = order;
  s.dims = Dim;
  for (int d = 0; d < Dim; ++d) {
    s.n[d] = field.mesh().count(d);
    s.domain[d] = field.mesh().bounds(d);
  }
  s.degree = field.degree();
  s.time = field.time();
  s.gamma = gamma;
  s.config_hash = config_hash;
  s.is_delta = is_delta;
  s.coefficients = field.values();
  return s;
}

template <int Dim>
SolutionField<Dim> to_field(const Snapshot& s) {
  if (s.dims != Dim) throw std::invalid_argument("snapshot has " + std::to_string(s.dims) + " dimensions");
  std::array<Interval, Dim> bounds{};
  std::array<int, Dim> counts{};
  for (int d = 0; d < Dim; ++d) {
    bounds[d] = s.domain[d];
    counts[d] = s.n[d];
  }
  SolutionField<Dim> f(build_mesh<Dim>(bounds, counts), s.degree, s.time);
  if (f.values().size() != s.coefficients.size()) throw std::runtime_error("snapshot payload size mismatch");
  f.values() = s.coefficients;
  return f;
}

namespace detail {

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw std::runtime_error("snapshot: truncated file");
  return v;
}

inline void put_string(std::ostream& os, const std::string& s) {
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& is) {
  const auto len = get<std::uint32_t>(is);
  if (len > (1u << 16)) throw std::runtime_error("snapshot: corrupt string length");
  std::string s(len, '\0');
  is.read(s.data(), len);
  if (!is) throw std::runtime_error("snapshot: truncated file");
  return s;
}

}  // namespace detail

/// Binary layout (native little-endian doubles): magic, version, case, scheme,
/// order, dims, N per axis, domain bounds, degree, time, gamma, config hash,
/// delta flag, coefficient count, coefficients.
inline void write_snapshot(std::ostream& os, const Snapshot& s) {
  os.write(Snapshot::kMagic, sizeof Snapshot::kMagic);
  detail::put(os, Snapshot::kVersion);
  detail::put_string(os, s.case_name);
  detail::put_string(os, s.scheme);
  detail::put<std::int32_t>(os, s.order);
  detail::put<std::int32_t>(os, s.dims);
  for (int d = 0; d < s.dims; ++d) detail::put<std::int32_t>(os, s.n[d]);
  for (int d = 0; d < s.dims; ++d) {
    detail::put(os, s.domain[d].lo);
    detail::put(os, s.domain[d].hi);
  }
  detail::put<std::int32_t>(os, s.degree);
  detail::put(os, s.time);
  detail::put(os, s.gamma);
  detail::put(os, s.config_hash);
  detail::put<std::uint8_t>(os, s.is_delta ? 1 : 0);
  detail::put<std::uint64_t>(os, s.coefficients.size());
  os.write(reinterpret_cast<const char*>(s.coefficients.data()),
           static_cast<std::streamsize>(s.coefficients.size() * sizeof(double)));
  if (!os) throw std::runtime_error("snapshot: write failed");
}

inline Snapshot read_snapshot(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, Snapshot::kMagic, sizeof magic) != 0) throw std::runtime_error("not a snapshot file");
  if (detail::get<std::uint32_t>(is) != Snapshot::kVersion) throw std::runtime_error("unsupported snapshot version");
  Snapshot s;
  s.case_name = detail::get_string(is);
  s.scheme = detail::get_string(is);
  s.order = detail::get<std::int32_t>(is);
  s.dims = detail::get<std::int32_t>(is);
  if (s.dims != 1 && s.dims != 2) throw std::runtime_error("snapshot: bad dimension count");
  for (int d = 0; d < s.dims; ++d) s.n[d] = detail::get<std::int32_t>(is);
  for (int d = 0; d < s.dims; ++d) {
    s.domain[d].lo = detail::get<double>(is);
    s.domain[d].hi = detail::get<double>(is);
  }
  s.degree = detail::get<std::int32_t>(is);
  s.time = detail::get<double>(is);
  s.gamma = detail::get<double>(is);
  s.config_hash = detail::get<std::uint64_t>(is);
  s.is_delta = detail::get<std::uint8_t>(is) != 0;
  const auto count = detail::get<std::uint64_t>(is);
  const int modes = s.dims == 1 ? s.degree + 1 : (s.degree + 1) * (s.degree + 1);
  const std::uint64_t cells = s.dims == 1 ? s.n[0] : static_cast<std::uint64_t>(s.n[0]) * s.n[1];
  if (count != cells * (s.dims + 2) * modes) throw std::runtime_error("snapshot: payload size mismatch");
  s.coefficients.resize(count);
  is.read(reinterpret_cast<char*>(s.coefficients.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!is) throw std::runtime_error("snapshot: truncated payload");
  return s;
}

inline void save_snapshot(const std::string& path, const Snapshot& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_snapshot(os, s);
}

inline Snapshot load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_snapshot(is);
}

/// Cell containing x (points on an interior face go to the upper cell, the
/// upper domain edge to the last cell).
template <int Dim>
typename Mesh<Dim>::Index locate(const Mesh<Dim>& mesh, const Point<Dim>& x) {
  typename Mesh<Dim>::Index idx{};
  for (int d = 0; d < Dim; ++d) {
    const auto& b = mesh.bounds(d);
    if (x[d] < b.lo || x[d] > b.hi) throw std::out_of_range("point outside the mesh");
    const int k = static_cast<int>(std::floor((x[d] - b.lo) / mesh.spacing(d)));
    idx[d] = std::clamp(k, 0, mesh.count(d) - 1);
  }
  return idx;
}

/// The DG polynomial at a physical point.
template <int Dim>
Conserved<Dim> evaluate_at(const SolutionField<Dim>& field, const Point<Dim>& x) {
  const auto idx = locate<Dim>(field.mesh(), x);
  return evaluate<Dim>(field, field.mesh().linear(idx), field.mesh().map_to_reference(idx, x));
}

/// Point values on a uniform plotting grid: `per_cell` samples per axis in
/// every cell, at reference coordinates -1 + (2k+1)/per_cell. When
/// `background` is set the stored state is background(x) + field(x), and the
/// deviation columns are taken against `equilibrium` (defaults to background).
template <int Dim>
void write_sampled_csv(std::ostream& os, const SolutionField<Dim>& field, double gamma, int per_cell,
                       const std::function<Conserved<Dim>(const Point<Dim>&)>& background = {},
                       const std::function<Conserved<Dim>(const Point<Dim>&)>& equilibrium = {}) {
  if (per_cell < 1) throw std::invalid_argument("samples per cell must be >= 1");
  const auto& eq = equilibrium ? equilibrium : background;
  const Basis<Dim> basis(field.degree());
  const auto& mesh = field.mesh();
  const char* axes[] = {"x", "y"};
  for (int d = 0; d < Dim; ++d) os << axes[d] << ',';
  os << "rho,";
  for (int d = 0; d < Dim; ++d) os << 'm' << axes[d] << ',';
  os << "E,p";
  if (eq) os << ",drho,dp";
  os << '\n';

  std::vector<double> ref1(per_cell);
  for (int k = 0; k < per_cell; ++k) ref1[k] = -1.0 + (2.0 * k + 1.0) / per_cell;
  char buf[40];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };

  // Rows ordered by x, then y, over the whole domain.
  const int nx = mesh.count(0);
  const int ny = Dim == 1 ? 1 : mesh.count(1);
  const int sy = Dim == 1 ? 1 : per_cell;
  for (int i = 0; i < nx; ++i) {
    for (int a = 0; a < per_cell; ++a) {
      for (int j = 0; j < ny; ++j) {
        for (int b = 0; b < sy; ++b) {
          typename Mesh<Dim>::Index idx{};
          Point<Dim> ref{};
          idx[0] = i;
          ref[0] = ref1[a];
          if constexpr (Dim == 2) {
            idx[1] = j;
            ref[1] = ref1[b];
          }
          const auto x = mesh.map_to_physical(idx, ref);
          auto u = evaluate<Dim>(field, mesh.linear(idx), ref);
          if (background) {
            const auto bg = background(x);
            for (int v = 0; v < Dim + 2; ++v) u[v] += bg[v];
          }
          for (int d = 0; d < Dim; ++d) {
            num(x[d]);
            os << ',';
          }
          for (int v = 0; v < Dim + 2; ++v) {
            num(u[v]);
            os << ',';
          }
          const double p = pressure_of<Dim>(u, gamma);
          num(p);
          if (eq) {
            const auto e = eq(x);
            os << ',';
            num(u[0] - e[0]);
            os << ',';
            num(p - pressure_of<Dim>(e, gamma));
          }
          os << '\n';
        }
      }
    }
  }
}

}  // namespace wbdg
