#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "nevlab/complexmat.hpp"
#include "nevlab/geometry.hpp"

namespace nevlab::target {

// The target space is P^n with homogeneous coordinates [w_0 : ... : w_n],
// n <= 3. The hyperplane bundle carries the Fubini-Study metric; a section of
// O(d) given by a homogeneous polynomial P has pointwise norm
//   ||s_P(w)|| = varsigma * |P(w)| / ||w||^d,
// where P is normalized so sup_{||w||=1} |P| = 1 and the scale varsigma < 1
// keeps the norm strictly below 1 (so proximity terms are nonnegative).

// Parses "inf", "2", "-1.5", "1+2i", "-i", "3e-2i", ...
cplx parse_complex(const std::string& text);

struct ProjectivePoint {
  CVec w;  // homogeneous, normalized to unit norm
  static ProjectivePoint of(const CVec& w);
  static ProjectivePoint affine(const cplx& z);  // [1 : z] on P^1
  static ProjectivePoint infinity();             // [0 : 1] on P^1
};

struct Monomial {
  cplx coeff;
  std::array<int, kMaxDim> exp{};  // exponents over n+1 variables
};

class HomogPoly {
public:
  HomogPoly() = default;
  HomogPoly(int n_vars, int degree, std::vector<Monomial> terms);

  // sum_a c_a w_a, scaled so the coefficient vector has unit norm
  static HomogPoly hyperplane(const CVec& coeffs);
  // section of O(1) on P^1 vanishing exactly at p
  static HomogPoly vanishing_at(const ProjectivePoint& p);
  // w_0^d + ... + w_n^d (sup over the unit sphere is exactly 1 for d >= 2)
  static HomogPoly fermat(int n_vars, int degree);

  int n_vars() const { return n_vars_; }
  int degree() const { return degree_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  cplx eval(const CVec& w) const;
  CVec grad(const CVec& w) const;  // dP/dw_a

private:
  int n_vars_ = 0;
  int degree_ = 0;
  std::vector<Monomial> terms_;
};

struct LineBundleFS {
  int degree = 1;
  double varsigma = 0.5;
};

// ||s_P(w)|| and its log; scale-invariant in w.
double section_norm(const LineBundleFS& bundle, const HomogPoly& poly, const CVec& w);
double log_section_norm(const LineBundleFS& bundle, const HomogPoly& poly, const CVec& w);

struct DivisorComponent {
  HomogPoly poly;
  std::string label;
};

// Effective divisor with simple normal crossings, all components of the same
// degree in the same bundle.
struct SncDivisor {
  int n = 1;        // target dimension
  int degree = 1;   // common degree of the components
  std::vector<DivisorComponent> components;
  int crossing_number = 1;  // max number of components through one point
  std::string id;
  int q() const { return static_cast<int>(components.size()); }
};

// Catalog: "p1:points=[0,inf,1]", "p2:coords", "p2:hyp:<q>" (hyperplanes with
// Vandermonde normals (1, t, t^2), general position certified),
// "pm:fermat:<d>" with m in {1,2,3}. Validates normal crossings.
SncDivisor parse_divisor(const std::string& text);

// Holomorphic map into P^n presented by a global lift that never vanishes.
struct HoloMap {
  int m_domain = 1;
  int n_target = 1;
  std::string id;
  std::function<CVec(const CVec&)> lift;      // n+1 components
  std::function<CMat(const CVec&)> lift_jac;  // (n+1) x m
};

// Catalog: "map:id" (z -> [1:z]), "map:exp", "map:sq", "map:poly:[c0,c1,...]"
// (the last three require m = 1).
HoloMap parse_map(const std::string& text, int m_domain);

// Pullback of the Fubini-Study Kaehler matrix: H_ij = d_i d_jbar log||lift||^2,
// Hermitian positive semidefinite m x m.
CMat fs_pullback_matrix(const HoloMap& map, const CVec& z);

// Density of the pulled-back Chern form of (O(d), FS): 2 d tr(g^{-1} H).
double chern_density(const geometry::ManifoldModel& model, const HoloMap& map, const CVec& z,
                     int degree);

// Density for the canonical bundle of P^n: -(n+1) times the O(1) density.
double canonical_density(const geometry::ManifoldModel& model, const HoloMap& map,
                         const CVec& z);

// Scalar composition P(lift(z)) and its z-derivative, for zero counting on
// one-dimensional domains.
std::function<cplx(cplx)> composed_scalar(const HomogPoly& poly, const HoloMap& map);
std::function<cplx(cplx)> composed_scalar_derivative(const HomogPoly& poly, const HoloMap& map);

// Affine chart of P^n holding w: index of the largest coordinate, the affine
// coordinates in that chart, and the chart Jacobian du/dz of a map given its
// lift Jacobian (quotient rule).
int argmax_chart(const CVec& w);
CVec affine_coords(const CVec& w, int chart);
CMat chart_jacobian(const CVec& w, const CMat& dw, int chart);

// Fubini-Study matrix on the target in an affine chart:
//   H_ij(u) = [delta_ij (1+|u|^2) - conj(u_i) u_j] / (1+|u|^2)^2,
// det H = (1+|u|^2)^{-(n+1)}.
CMat fs_affine_matrix(const CVec& u);

// Derivatives of rho_j = log ||s_j||^2 on the target in the chart-0 affine
// coordinates (w = (1,u)): the gradient row v_i = d_i rho. Off the zero set
// d_i d_jbar rho = -d * H_FS(u), which callers assemble directly.
CVec rho_gradient(const LineBundleFS& bundle, const HomogPoly& poly, const CVec& u);

}  // namespace nevlab::target
