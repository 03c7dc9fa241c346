#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbdg/basis.hpp"
#include "wbdg/euler.hpp"
#include "wbdg/field.hpp"
#include "wbdg/mesh.hpp"

namespace wbdg {

/// Reference state sampled at one volume point: the scheme subtracts these
/// from f(w_num) and s(w_num).
template <int Dim>
struct VolumeSample {
  Conserved<Dim> u{};
  std::array<Conserved<Dim>, Dim> flux{};
  Conserved<Dim> source{};
};

/// Reference state at one face point; flux is along the face normal.
template <int Dim>
struct FaceSample {
  Conserved<Dim> u{};
  Conserved<Dim> flux{};
};

/// Classical RKDG: nothing is subtracted.
struct ZeroReference {
  static constexpr bool kZero = true;
};

/// Cartesian face numbering. Face `id` normal to axis 0 separates cells
/// (ix-1, iy) and (ix, iy) with id = iy*(Nx+1) + ix; normal to axis 1 it
/// separates (ix, iy-1) and (ix, iy) with id = iy*Nx + ix.
template <int Dim>
class FaceTopology {
 public:
  explicit FaceTopology(const Mesh<Dim>& mesh) : mesh_(mesh) {}

  int count(int axis) const {
    int n = 1;
    for (int d = 0; d < Dim; ++d) n *= mesh_.count(d) + (d == axis ? 1 : 0);
    return n;
  }

  /// Index of the cell on the positive-normal side (may be a ghost index).
  typename Mesh<Dim>::Index plus_cell(int axis, int id) const {
    typename Mesh<Dim>::Index idx{};
    if constexpr (Dim == 1) {
      idx[0] = id;
    } else {
      const int nx = mesh_.count(0) + (axis == 0 ? 1 : 0);
      idx = {id % nx, id / nx};
    }
    return idx;
  }

  typename Mesh<Dim>::Index minus_cell(int axis, int id) const {
    auto idx = plus_cell(axis, id);
    idx[axis] -= 1;
    return idx;
  }

  int face_of(int axis, const typename Mesh<Dim>::Index& cell, int side) const {
    auto idx = cell;
    idx[axis] += side;  // side 1 is the face on the +axis side
    if constexpr (Dim == 1) {
      return idx[0];
    } else {
      const int nx = mesh_.count(0) + (axis == 0 ? 1 : 0);
      return idx[1] * nx + idx[0];
    }
  }

  bool on_boundary(int axis, int id) const {
    const auto p = plus_cell(axis, id);
    return p[axis] == 0 || p[axis] == mesh_.count(axis);
  }

 private:
  Mesh<Dim> mesh_;
};

/// Semidiscrete DG operator on a uniform Cartesian mesh with Dirichlet ghost
/// traces taken from an analytic boundary state.
template <int Dim>
class DgOperator {
 public:
  static constexpr int kVars = Dim + 2;
  using BoundaryState = std::function<Primitive<Dim>(const Point<Dim>&)>;

  DgOperator(Mesh<Dim> mesh, int degree, double gamma, GravityField<Dim> gravity, BoundaryState boundary)
      : mesh_(std::move(mesh)),
        basis_(degree),
        topo_(mesh_),
        gamma_(gamma),
        gravity_(std::move(gravity)),
        boundary_(std::move(boundary)) {
    if (degree > 4) throw std::invalid_argument("DgOperator: degree above 4 is not instantiated");
    const int nm = basis_.modes();
    const int nq = basis_.volume_points();
    const int nf = basis_.face_points();
    const auto& wq = basis_.volume_weights();
    for (int d = 0; d < Dim; ++d) {
      grad_w_[d].assign(nq * nm, 0.0);
      const double scale = 2.0 / mesh_.spacing(d);
      for (int k = 0; k < nq * nm; ++k) grad_w_[d][k] = basis_.grad(d)[k] * wq[k / nm] * scale;
    }
    phi_w_.assign(nq * nm, 0.0);
    for (int k = 0; k < nq * nm; ++k) phi_w_[k] = basis_.phi()[k] * wq[k / nm];
    for (int axis = 0; axis < Dim; ++axis)
      for (int side = 0; side < 2; ++side) {
        const double* fp = basis_.face_phi(axis, side);
        face_t_[axis][side].assign(nf * nm, 0.0);
        for (int p = 0; p < nf; ++p)
          for (int m = 0; m < nm; ++m) face_t_[axis][side][m * nf + p] = fp[p * nm + m];
      }
    phi_t_.assign(nq * nm, 0.0);
    for (int q = 0; q < nq; ++q)
      for (int m = 0; m < nm; ++m) phi_t_[m * nq + q] = basis_.phi()[q * nm + m];
    for (int axis = 0; axis < Dim; ++axis) {
      const double scale = 2.0 / mesh_.spacing(axis);
      for (int side = 0; side < 2; ++side) {
        face_w_[axis][side].assign(nf * nm, 0.0);
        for (int k = 0; k < nf * nm; ++k) {
          face_w_[axis][side][k] = basis_.face_phi(axis, side)[k] * basis_.face_weights()[k / nm] * scale;
        }
      }
    }
    // Volume point coordinates and the steady part of grad Phi.
    const int nc = mesh_.interior_cells();
    points_.resize(static_cast<std::size_t>(nc) * nq);
    steady_grad_.resize(static_cast<std::size_t>(nc) * nq);
    for (int c = 0; c < nc; ++c) {
      const auto idx = mesh_.unravel(c);
      for (int q = 0; q < nq; ++q) {
        const auto x = mesh_.map_to_physical(idx, basis_.volume_node(q));
        points_[c * nq + q] = x;
        steady_grad_[c * nq + q] = gravity_.steady ? gravity_.steady(x) : Vec<Dim>{};
      }
    }
    // Dirichlet data at boundary face points, evaluated from the analytic state.
    for (int axis = 0; axis < Dim; ++axis) {
      ghost_[axis].assign(static_cast<std::size_t>(topo_.count(axis)) * nf, Conserved<Dim>{});
      for (int id = 0; id < topo_.count(axis); ++id) {
        if (!topo_.on_boundary(axis, id)) continue;
        for (int p = 0; p < nf; ++p) {
          const auto x = face_point(axis, id, p);
          ghost_[axis][id * nf + p] = to_conserved<Dim>(boundary_(x), gamma_);
        }
      }
    }
  }

  const Mesh<Dim>& mesh() const { return mesh_; }
  const Basis<Dim>& basis() const { return basis_; }
  const FaceTopology<Dim>& topology() const { return topo_; }
  double gamma() const { return gamma_; }
  int degree() const { return basis_.degree(); }
  const GravityField<Dim>& gravity() const { return gravity_; }
  const BoundaryState& boundary() const { return boundary_; }

  Point<Dim> face_point(int axis, int id, int p) const {
    return mesh_.map_to_physical(topo_.plus_cell(axis, id), basis_.face_node(axis, 0, p));
  }
  const Point<Dim>& volume_point(int cell, int q) const { return points_[cell * basis_.volume_points() + q]; }

  /// Full grad Phi at volume point q of `cell` at time t.
  Vec<Dim> gravity_at(int cell, int q, double t) const {
    const std::size_t k = static_cast<std::size_t>(cell) * basis_.volume_points() + q;
    Vec<Dim> g = steady_grad_[k];
    if (gravity_.transient) {
      const auto extra = gravity_.transient(points_[k], t);
      for (int d = 0; d < Dim; ++d) g[d] += extra[d];
    }
    return g;
  }

  SolutionField<Dim> make_field(double t = 0.0) const { return SolutionField<Dim>(mesh_, basis_.degree(), t); }

  /// Classical DG residual d/dt coefficients.
  void residual(const SolutionField<Dim>& field, double t, Residual<Dim>& out) const {
    assemble(field, ZeroReference{}, t, out);
  }

  Residual<Dim> residual(const SolutionField<Dim>& field, double t) const {
    Residual<Dim> out = make_field(t);
    residual(field, t, out);
    return out;
  }

  /// Residual of the scheme that subtracts `ref` samples from every flux and
  /// source evaluation; w_num = ref.u + field at each point.
  template <class Ref>
  void assemble(const SolutionField<Dim>& field, const Ref& ref, double t, Residual<Dim>& out) const {
    if (!field.same_shape(out)) throw std::invalid_argument("residual: shape mismatch");
    switch (basis_.points_per_axis()) {
      case 1: assemble_impl<1>(field, ref, t, out); break;
      case 2: assemble_impl<2>(field, ref, t, out); break;
      case 3: assemble_impl<3>(field, ref, t, out); break;
      case 4: assemble_impl<4>(field, ref, t, out); break;
      case 5: assemble_impl<5>(field, ref, t, out); break;
      default: throw std::invalid_argument("residual: unsupported degree");
    }
    out.set_time(t);
  }

 private:
  template <int NP, class Ref>
  void assemble_impl(const SolutionField<Dim>& field, const Ref& ref, double t, Residual<Dim>& out) const {
    constexpr int NM = Dim == 1 ? NP : NP * NP;
    constexpr int NQ = NM;
    constexpr int NF = Dim == 1 ? 1 : NP;
    constexpr int NV = Dim + 2;
    constexpr bool kZero = std::is_same_v<Ref, ZeroReference>;

    std::fill(out.values().begin(), out.values().end(), 0.0);
    const double* in = field.values().data();
    double* res = out.values().data();
    const int block = NV * NM;

    int ctx_axis = -1, ctx_face = -1, ctx_cell = -1;
    try {
      // Surface terms, one numerical flux per face point shared by both cells.
      for (int axis = 0; axis < Dim; ++axis) {
        ctx_axis = axis;
        const double* w_lo = face_w_[axis][0].data();
        const double* w_hi = face_w_[axis][1].data();
        const int nfaces = topo_.count(axis);
        for (int id = 0; id < nfaces; ++id) {
          ctx_face = id;
          const auto pm = topo_.minus_cell(axis, id);
          const auto pp = topo_.plus_cell(axis, id);
          const bool has_minus = pm[axis] >= 0;
          const bool has_plus = pp[axis] < mesh_.count(axis);
          const int cm = has_minus ? mesh_.linear(pm) : -1;
          const int cp = has_plus ? mesh_.linear(pp) : -1;
          alignas(64) double UM[NV][NF], UP[NV][NF], H[NV][NF];
          if (has_minus) face_values<NM, NF>(in + cm * block, face_t_[axis][1].data(), UM);
          if (has_plus) face_values<NM, NF>(in + cp * block, face_t_[axis][0].data(), UP);
          for (int p = 0; p < NF; ++p) {
            FaceSample<Dim> eq;
            if constexpr (!kZero) ref.face(axis, id, p, eq);
            Conserved<Dim> um, up;
            if (has_minus) {
              for (int v = 0; v < NV; ++v) um[v] = UM[v][p];
              if constexpr (!kZero) add(um, eq.u);
            } else {
              um = ghost_[axis][id * NF + p];
            }
            if (has_plus) {
              for (int v = 0; v < NV; ++v) up[v] = UP[v][p];
              if constexpr (!kZero) add(up, eq.u);
            } else {
              up = ghost_[axis][id * NF + p];
            }
            Conserved<Dim> h = llf_flux<Dim>(um, up, axis, +1, gamma_);
            if constexpr (!kZero) {
              for (int v = 0; v < NV; ++v) h[v] -= eq.flux[v];
            }
            for (int v = 0; v < NV; ++v) H[v][p] = h[v];
          }
          // Each coefficient receives its face-point terms in order p = 0.. .
          if (has_minus) {
            double* r = res + cm * block;
            for (int v = 0; v < NV; ++v)
              for (int m = 0; m < NM; ++m) {
                double x = r[v * NM + m];
                for (int p = 0; p < NF; ++p) x -= H[v][p] * w_hi[p * NM + m];
                r[v * NM + m] = x;
              }
          }
          if (has_plus) {
            double* r = res + cp * block;
            for (int v = 0; v < NV; ++v)
              for (int m = 0; m < NM; ++m) {
                double x = r[v * NM + m];
                for (int p = 0; p < NF; ++p) x += H[v][p] * w_lo[p * NM + m];
                r[v * NM + m] = x;
              }
          }
        }
      }
      ctx_axis = -1;
      ctx_face = -1;

      // Volume flux and source terms. Point values are formed for all points
      // at once (vectorised over q), and the weak-form sums are accumulated
      // in a local block; each sum keeps the order m = 0.. and q = 0.. .
      const double* phi_t = phi_t_.data();
      const int nc = mesh_.interior_cells();
      alignas(64) double U[NV][NQ];
      alignas(64) double S[NV][NQ];
      alignas(64) double F[Dim][NV][NQ];
      alignas(64) double acc[NV * NM];
      for (int c = 0; c < nc; ++c) {
        ctx_cell = c;
        const double* coef = in + c * block;
        double* r = res + c * block;
        for (int v = 0; v < NV; ++v) {
          for (int q = 0; q < NQ; ++q) U[v][q] = 0.0;
          for (int m = 0; m < NM; ++m) {
            const double cv = coef[v * NM + m];
            const double* pt = phi_t + m * NQ;
            for (int q = 0; q < NQ; ++q) U[v][q] += cv * pt[q];
          }
        }
        for (int q = 0; q < NQ; ++q) {
          Conserved<Dim> u;
          for (int v = 0; v < NV; ++v) u[v] = U[v][q];
          VolumeSample<Dim> eq;
          if constexpr (!kZero) {
            ref.volume(c, q, eq);
            add(u, eq.u);
          }
          const auto w = to_primitive<Dim>(u, gamma_);
          const Vec<Dim> g = gravity_at(c, q, t);
          Conserved<Dim> src = gravity_source<Dim>(u, g);
          if constexpr (!kZero) {
            for (int v = 0; v < NV; ++v) src[v] -= eq.source[v];
          }
          for (int v = 0; v < NV; ++v) S[v][q] = src[v];
          for (int d = 0; d < Dim; ++d) {
            Conserved<Dim> f = physical_flux<Dim>(u, w, d);
            if constexpr (!kZero) {
              for (int v = 0; v < NV; ++v) f[v] -= eq.flux[d][v];
            }
            for (int v = 0; v < NV; ++v) F[d][v][q] = f[v];
          }
        }
        for (int k = 0; k < NV * NM; ++k) acc[k] = r[k];
        for (int v = 0; v < NV; ++v) {
          double* a = acc + v * NM;
          for (int q = 0; q < NQ; ++q) {
            const double sv = S[v][q];
            const double* pw = phi_w_.data() + q * NM;
            for (int m = 0; m < NM; ++m) a[m] += sv * pw[m];
            for (int d = 0; d < Dim; ++d) {
              const double fv = F[d][v][q];
              const double* gw = grad_w_[d].data() + q * NM;
              for (int m = 0; m < NM; ++m) a[m] += fv * gw[m];
            }
          }
        }
        for (int k = 0; k < NV * NM; ++k) r[k] = acc[k];
      }
    } catch (const AdmissibilityError& e) {
      std::string where;
      if (ctx_axis >= 0) {
        where = "face " + std::to_string(ctx_face) + " (normal axis " + std::to_string(ctx_axis) + ")";
      } else {
        where = "cell " + std::to_string(ctx_cell);
      }
      throw AdmissibilityError("residual at t=" + std::to_string(t) + ", " + where + ": " + e.what());
    }
  }

  /// Traces of every variable at the NF points of one face, summed over m in order.
  template <int NM, int NF>
  static void face_values(const double* coef, const double* table_t, double (&out)[Dim + 2][NF]) {
    for (int v = 0; v < Dim + 2; ++v) {
      for (int p = 0; p < NF; ++p) out[v][p] = 0.0;
      for (int m = 0; m < NM; ++m) {
        const double cv = coef[v * NM + m];
        for (int p = 0; p < NF; ++p) out[v][p] += cv * table_t[m * NF + p];
      }
    }
  }

  template <int NM>
  static Conserved<Dim> trace(const double* coef, const double* phi) {
    Conserved<Dim> u{};
    for (int v = 0; v < Dim + 2; ++v) {
      double s = 0.0;
      for (int m = 0; m < NM; ++m) s += coef[v * NM + m] * phi[m];
      u[v] = s;
    }
    return u;
  }

  static void add(Conserved<Dim>& a, const Conserved<Dim>& b) {
    for (int v = 0; v < Dim + 2; ++v) a[v] += b[v];
  }

  Mesh<Dim> mesh_;
  Basis<Dim> basis_;
  FaceTopology<Dim> topo_;
  double gamma_;
  GravityField<Dim> gravity_;
  BoundaryState boundary_;
  std::array<std::vector<double>, Dim> grad_w_;
  std::vector<double> phi_w_;
  std::vector<double> phi_t_;  // phi transposed, [m][q]
  std::array<std::array<std::vector<double>, 2>, Dim> face_t_;  // face traces transposed, [m][p]
  std::array<std::array<std::vector<double>, 2>, Dim> face_w_;
  std::vector<Point<Dim>> points_;
  std::vector<Vec<Dim>> steady_grad_;
  std::array<std::vector<Conserved<Dim>>, Dim> ghost_;
};

}  // namespace wbdg
