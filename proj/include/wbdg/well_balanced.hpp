#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbdg/dg_operator.hpp"
#include "wbdg/equilibria.hpp"
#include "wbdg/field.hpp"

namespace wbdg {

enum class CacheStrategy { Recompute, Stored };

inline std::string to_string(CacheStrategy s) { return s == CacheStrategy::Stored ? "Mem" : "Rec"; }

/// Equilibrium samples at every quadrature point the scheme touches.
///
/// Stored keeps w_eq, f(w_eq) and the equilibrium grad Phi for each volume
/// point, and w_eq, f(w_eq).n for each face point. Recompute evaluates the
/// analytic equilibrium on demand. Both go through sample_volume/sample_face,
/// so the two strategies produce bitwise-identical samples.
template <int Dim>
class EquilibriumCache {
 public:
  EquilibriumCache(EquilibriumSpec<Dim> eq, const DgOperator<Dim>& op, CacheStrategy strategy)
      : eq_(std::move(eq)), op_(&op), strategy_(strategy) {
    const auto& mesh = op.mesh();
    const int nc = mesh.interior_cells();
    const int nq = op.basis().volume_points();
    const int nf = op.basis().face_points();
    averages_.resize(nc);
    if (strategy_ == CacheStrategy::Stored) {
      vol_u_.resize(static_cast<std::size_t>(nc) * nq);
      vol_flux_.resize(static_cast<std::size_t>(nc) * nq);
      vol_grad_.resize(static_cast<std::size_t>(nc) * nq);
      for (int c = 0; c < nc; ++c) {
        for (int q = 0; q < nq; ++q) {
          const std::size_t k = static_cast<std::size_t>(c) * nq + q;
          sample_point(op.volume_point(c, q), vol_u_[k], vol_flux_[k], vol_grad_[k]);
        }
      }
      for (int axis = 0; axis < Dim; ++axis) {
        const int nfaces = op.topology().count(axis);
        face_u_[axis].resize(static_cast<std::size_t>(nfaces) * nf);
        face_flux_[axis].resize(static_cast<std::size_t>(nfaces) * nf);
        for (int id = 0; id < nfaces; ++id) {
          for (int p = 0; p < nf; ++p) {
            FaceSample<Dim> s;
            sample_face_point(axis, op.face_point(axis, id, p), s);
            face_u_[axis][id * nf + p] = s.u;
            face_flux_[axis][id * nf + p] = s.flux;
          }
        }
      }
    }
    const auto& wq = op.basis().volume_weights();
    const double ref_measure = std::pow(2.0, Dim);
    for (int c = 0; c < nc; ++c) {
      Conserved<Dim> avg{};
      for (int q = 0; q < nq; ++q) {
        VolumeSample<Dim> s;
        volume(c, q, s);
        for (int v = 0; v < Dim + 2; ++v) avg[v] += s.u[v] * wq[q];
      }
      for (int v = 0; v < Dim + 2; ++v) avg[v] /= ref_measure;
      averages_[c] = avg;
    }
  }

  CacheStrategy strategy() const { return strategy_; }
  const EquilibriumSpec<Dim>& equilibrium() const { return eq_; }

  void volume(int cell, int q, VolumeSample<Dim>& s) const {
    if (strategy_ == CacheStrategy::Stored) {
      const std::size_t k = static_cast<std::size_t>(cell) * op_->basis().volume_points() + q;
      s.u = vol_u_[k];
      s.flux = vol_flux_[k];
      s.source = gravity_source<Dim>(s.u, vol_grad_[k]);
    } else {
      Vec<Dim> g;
      sample_point(op_->volume_point(cell, q), s.u, s.flux, g);
      s.source = gravity_source<Dim>(s.u, g);
    }
  }

  void face(int axis, int id, int p, FaceSample<Dim>& s) const {
    if (strategy_ == CacheStrategy::Stored) {
      const std::size_t k = static_cast<std::size_t>(id) * op_->basis().face_points() + p;
      s.u = face_u_[axis][k];
      s.flux = face_flux_[axis][k];
    } else {
      sample_face_point(axis, op_->face_point(axis, id, p), s);
    }
  }

  /// Cell average of w_eq by the volume rule.
  const Conserved<Dim>& average(int cell) const { return averages_[cell]; }

  /// Number of doubles held by the Stored strategy.
  std::size_t stored_values() const {
    std::size_t n = vol_u_.size() * (Dim + 2) + vol_flux_.size() * Dim * (Dim + 2) + vol_grad_.size() * Dim;
    for (int axis = 0; axis < Dim; ++axis) n += (face_u_[axis].size() + face_flux_[axis].size()) * (Dim + 2);
    return n;
  }
  std::size_t stored_bytes() const { return stored_values() * sizeof(double); }

 private:
  void sample_point(const Point<Dim>& x, Conserved<Dim>& u, std::array<Conserved<Dim>, Dim>& flux,
                    Vec<Dim>& grad) const {
    u = equilibrium_conserved<Dim>(eq_.state(x), eq_.gamma);
    grad = eq_.gravity(x);
    if (u[0] == 0.0) {
      flux = {};
      return;
    }
    const auto w = to_primitive<Dim>(u, eq_.gamma);
    for (int d = 0; d < Dim; ++d) flux[d] = physical_flux<Dim>(u, w, d);
  }

  void sample_face_point(int axis, const Point<Dim>& x, FaceSample<Dim>& s) const {
    s.u = equilibrium_conserved<Dim>(eq_.state(x), eq_.gamma);
    s.flux = s.u[0] == 0.0 ? Conserved<Dim>{} : physical_flux<Dim>(s.u, to_primitive<Dim>(s.u, eq_.gamma), axis);
  }

  EquilibriumSpec<Dim> eq_;
  const DgOperator<Dim>* op_;
  CacheStrategy strategy_;
  std::vector<Conserved<Dim>> vol_u_;
  std::vector<std::array<Conserved<Dim>, Dim>> vol_flux_;
  std::vector<Vec<Dim>> vol_grad_;
  std::array<std::vector<Conserved<Dim>>, Dim> face_u_, face_flux_;
  std::vector<Conserved<Dim>> averages_;
};

namespace detail {

template <int Dim>
struct StoredView {
  const EquilibriumCache<Dim>* cache;
  void volume(int c, int q, VolumeSample<Dim>& s) const { cache->volume(c, q, s); }
  void face(int a, int id, int p, FaceSample<Dim>& s) const { cache->face(a, id, p, s); }
};

}  // namespace detail

/// Equilibrium cache built against an operator's mesh and quadrature.
template <int Dim>
EquilibriumCache<Dim> build_cache(const EquilibriumSpec<Dim>& eq, const DgOperator<Dim>& op,
                                  CacheStrategy strategy = CacheStrategy::Stored) {
  return EquilibriumCache<Dim>(eq, op, strategy);
}

/// delta_0 = P(w_0 - w_eq); differences are taken pointwise in conserved
/// variables before projection, so w_0 == w_eq gives exact zeros.
template <int Dim>
SolutionField<Dim> project_delta(const std::function<Primitive<Dim>(const Point<Dim>&)>& initial,
                                 const EquilibriumSpec<Dim>& eq, const Mesh<Dim>& mesh, const Basis<Dim>& basis) {
  return project_conserved<Dim>(
      [&](const Point<Dim>& x) {
        const auto u0 = to_conserved<Dim>(initial(x), eq.gamma);
        const auto ue = equilibrium_conserved<Dim>(eq.state(x), eq.gamma);
        Conserved<Dim> d{};
        for (int v = 0; v < Dim + 2; ++v) d[v] = u0[v] - ue[v];
        return d;
      },
      mesh, basis);
}

/// Delta-formulation residual: numerical flux of the w_num traces minus the
/// analytic equilibrium flux at each face point, and f(w_num) - f(w_eq),
/// s(w_num) - s(w_eq) at each volume point.
template <int Dim>
void residual_wb(const DgOperator<Dim>& op, const SolutionField<Dim>& delta, const EquilibriumCache<Dim>& cache,
                 double t, Residual<Dim>& out) {
  op.assemble(delta, detail::StoredView<Dim>{&cache}, t, out);
}

template <int Dim>
Residual<Dim> residual_wb(const DgOperator<Dim>& op, const SolutionField<Dim>& delta,
                          const EquilibriumCache<Dim>& cache, double t) {
  Residual<Dim> out = op.make_field(t);
  residual_wb(op, delta, cache, t, out);
  return out;
}

}  // namespace wbdg
