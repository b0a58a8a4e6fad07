#pragma once

#include <functional>
#include <vector>

#include "nevlab/complexmat.hpp"

namespace nevlab::quadrature {

// Composite 16-point Gauss-Legendre over equal panels.
double integrate(const std::function<double(double)>& f, double a, double b, int panels);

// Composite Gauss-Legendre over geometrically graded panels accumulating at
// the left endpoint, for integrands with an endpoint singularity (log or an
// integrable power). The first panel has length (b-a)*ratio^{panels-1}.
double integrate_graded(const std::function<double(double)>& f, double a, double b, int panels,
                        double ratio = 0.5);

// Quadrature rule on the unit sphere S^{2m-1} in C^m, exact for the torus
// action: the pushforward of the sphere measure to the action simplex
// {|z_1|^2, ..., |z_m|^2} is uniform, so nodes are Gauss-Legendre in the
// action variables times uniform angles. Weights sum to the sphere area.
struct SphereRule {
  std::vector<CVec> points;
  std::vector<double> weights;
};
SphereRule sphere_rule(int m, int action_panels, int angle_points);

// Integral of F over the chart ball |z| < radius against Lebesgue measure,
// by spherical shells: graded radial panels (toward zero when graded) times
// a sphere rule.
double ball_integral(int m, double radius, const SphereRule& rule,
                     const std::function<double(const CVec&)>& F, int radial_panels,
                     bool graded = true);

// Integral of f over the disk |w - center| <= rho_max in one complex
// variable, polar coordinates: radial panels geometrically graded down to
// peak_scale (resolving a peak of that width at the center), uniform angles.
double polar_integral(const std::function<double(const cplx&)>& f, const cplx& center,
                      double peak_scale, double rho_max, int angle_points);

}  // namespace nevlab::quadrature
