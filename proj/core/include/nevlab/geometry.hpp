#pragma once

#include <functional>
#include <optional>
#include <string>

#include "nevlab/complexmat.hpp"

namespace nevlab::geometry {

// Model manifolds: complete simply connected Kähler manifolds with a global
// holomorphic chart centered at the base point o = 0 and non-positive
// curvature. The Hermitian matrix g_ij = metric_at(z) is normalized so that
// the identity matrix is the standard Euclidean metric of R^{2m}; with that
// convention the Laplace-Beltrami operator on a Kähler manifold is
//   (Lu)(z) = 4 * sum_ij g^{ji} d2u/dz_i dzbar_j       (no first-order term)
// and the Riemannian volume element is det(g) times Lebesgue measure.
enum class ModelKind { Flat, PoincareDisk, ComplexHyperbolicBall };

struct ManifoldModel {
  ModelKind kind = ModelKind::Flat;
  int m = 1;                     // complex dimension (1..3)
  double curvature_scale = 1.0;  // multiplies distances; curvatures scale by 1/scale^2

  // Chart radius: |z| < chart_radius. Infinite for the flat model.
  double chart_radius() const;
  std::string id() const;
  bool is_flat() const { return kind == ModelKind::Flat; }
};

// Parses "flat:2", "poincare", "chball:2", optionally ":scale=<float>".
ManifoldModel parse_model(const std::string& text);

struct ChartPoint {
  CVec z;
  int dim() const { return z.size(); }
};

ChartPoint origin(const ManifoldModel& model);

// Hermitian positive definite metric matrix at z (includes curvature_scale^2).
CMat metric_at(const ManifoldModel& model, const CVec& z);
CMat inverse_metric_at(const ManifoldModel& model, const CVec& z);

// Complex Ricci matrix R_ij = -d2 log det g / dz_i dzbar_j (closed form).
CMat complex_ricci_at(const ManifoldModel& model, const CVec& z);

// Pointwise lower bound of the Riemannian Ricci quadratic form over unit
// vectors. Constant on each model: 0, -1/scale^2, -2(m+1)/scale^2.
double ricci_lower_bound(const ManifoldModel& model, const CVec& z);

// kappa(t) = min over the closed ball of radius t of ricci_lower_bound,
// divided by (2m-1). Constant in t for these homogeneous models.
double kappa_profile(const ManifoldModel& model, double t);

// Scalar curvature s(z) = -(1/2) L log det g = 2 tr(g^{-1} Ric). Satisfies
// s >= m * ricci_lower_bound, with equality on the Einstein models.
double scalar_curvature(const ManifoldModel& model, const CVec& z);

// Geodesic distance from the base point.
double distance_to_base(const ManifoldModel& model, const CVec& z);

// Chart radius |z| of the geodesic sphere of radius r (inverse of the above
// along a ray). Throws if r is not representable in the chart.
double chart_radius_of_sphere(const ManifoldModel& model, double r);

// Riemannian area of the geodesic sphere of radius t about the base point.
double sphere_area(const ManifoldModel& model, double t);

// Surface area of the unit sphere S^{2m-1} in R^{2m}.
double unit_sphere_area(int m);

// Complex factor C with C C^H = conj(g)^{-1}; Brownian increments in the
// chart are dz = C * (xi + i eta) sqrt(dt) with xi, eta standard normal.
CMat diffusion_factor(const ManifoldModel& model, const CVec& z);

// Scalar field on the chart with an optional analytic complex Hessian;
// absent one, laplace_beltrami falls back to central finite differences.
struct SmoothField {
  std::function<double(const CVec&)> value;
  std::function<CMat(const CVec&)> complex_hessian;  // may be empty
  std::string name;
};

// Central finite-difference complex Hessian of a scalar field,
// step h = 1e-4 * (1 + |z|).
CMat fd_complex_hessian(const std::function<double(const CVec&)>& value, const CVec& z);

// (Lu)(z) = 4 tr(g^{-1} H) with H the complex Hessian of u at z.
double laplace_beltrami(const ManifoldModel& model, const SmoothField& u, const CVec& z);

}  // namespace nevlab::geometry
