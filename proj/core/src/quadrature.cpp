#include "nevlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nevlab::quadrature {

namespace {

constexpr double kNodes[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                              0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                              0.9445750230732326, 0.9894009349916499};
constexpr double kWeights[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                0.0622535239386479, 0.0271524594117541};

double gl_panel(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int k = 0; k < 8; ++k)
    s += kWeights[k] * (f(mid + half * kNodes[k]) + f(mid - half * kNodes[k]));
  return s * half;
}

// Gauss-Legendre nodes and weights on [a, b], appended to the output arrays.
void gl_points(double a, double b, std::vector<double>& xs, std::vector<double>& ws) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int k = 0; k < 8; ++k) {
    xs.push_back(mid - half * kNodes[k]);
    ws.push_back(kWeights[k] * half);
    xs.push_back(mid + half * kNodes[k]);
    ws.push_back(kWeights[k] * half);
  }
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels < 1) throw std::invalid_argument("integrate: need at least one panel");
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double x0 = a + (b - a) * p / panels;
    const double x1 = a + (b - a) * (p + 1) / panels;
    s += gl_panel(f, x0, x1);
  }
  return s;
}

double integrate_graded(const std::function<double(double)>& f, double a, double b, int panels,
                        double ratio) {
  if (panels < 1) throw std::invalid_argument("integrate_graded: need at least one panel");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("integrate_graded: bad ratio");
  double s = 0.0;
  double hi = b;
  for (int p = 0; p < panels; ++p) {
    const double lo = p + 1 == panels ? a : a + (hi - a) * ratio;
    s += gl_panel(f, lo, hi);
    hi = lo;
  }
  return s;
}

SphereRule sphere_rule(int m, int action_panels, int angle_points) {
  if (m < 1 || m > 3) throw std::invalid_argument("sphere_rule: m must be 1..3");
  if (action_panels < 1 || angle_points < 4)
    throw std::invalid_argument("sphere_rule: bad resolution");
  const double two_pi = 2.0 * std::numbers::pi;
  SphereRule rule;

  auto angles = [&](int k) { return two_pi * k / angle_points; };
  const double wphi = two_pi / angle_points;

  if (m == 1) {
    for (int k = 0; k < angle_points; ++k) {
      rule.points.push_back(CVec{std::polar(1.0, angles(k))});
      rule.weights.push_back(wphi);
    }
    return rule;
  }

  std::vector<double> xs, ws;
  for (int p = 0; p < action_panels; ++p)
    gl_points(static_cast<double>(p) / action_panels, static_cast<double>(p + 1) / action_panels,
              xs, ws);

  if (m == 2) {
    // measure: (1/2) dv dphi1 dphi2 with |z1|^2 = v
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double v = xs[i];
      for (int k1 = 0; k1 < angle_points; ++k1)
        for (int k2 = 0; k2 < angle_points; ++k2) {
          rule.points.push_back(CVec{std::polar(std::sqrt(v), angles(k1)),
                                     std::polar(std::sqrt(1.0 - v), angles(k2))});
          rule.weights.push_back(0.5 * ws[i] * wphi * wphi);
        }
    }
    return rule;
  }

  // m == 3, measure: (1/4) dv1 dv2 dphi^3 over the simplex v1 + v2 <= 1
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v1 = xs[i];
    std::vector<double> ys, wy;
    for (int p = 0; p < action_panels; ++p)
      gl_points((1.0 - v1) * p / action_panels, (1.0 - v1) * (p + 1) / action_panels, ys, wy);
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double v2 = ys[j];
      for (int k1 = 0; k1 < angle_points; ++k1)
        for (int k2 = 0; k2 < angle_points; ++k2)
          for (int k3 = 0; k3 < angle_points; ++k3) {
            rule.points.push_back(CVec{std::polar(std::sqrt(v1), angles(k1)),
                                       std::polar(std::sqrt(v2), angles(k2)),
                                       std::polar(std::sqrt(1.0 - v1 - v2), angles(k3))});
            rule.weights.push_back(0.25 * ws[i] * wy[j] * wphi * wphi * wphi);
          }
    }
  }
  return rule;
}

double ball_integral(int m, double radius, const SphereRule& rule,
                     const std::function<double(const CVec&)>& F, int radial_panels,
                     bool graded) {
  auto shell = [&](double s) {
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      CVec z(m);
      for (int i = 0; i < m; ++i) z[i] = s * rule.points[k][i];
      acc += rule.weights[k] * F(z);
    }
    return acc * std::pow(s, 2 * m - 1);
  };
  return graded ? integrate_graded(shell, 0.0, radius, radial_panels)
                : integrate(shell, 0.0, radius, radial_panels);
}

double polar_integral(const std::function<double(const cplx&)>& f, const cplx& center,
                      double peak_scale, double rho_max, int angle_points) {
  if (!(peak_scale > 0.0 && peak_scale < rho_max))
    throw std::invalid_argument("polar_integral: need 0 < peak_scale < rho_max");
  const double two_pi = 2.0 * std::numbers::pi;
  auto ring = [&](double rho) {
    double acc = 0.0;
    for (int k = 0; k < angle_points; ++k)
      acc += f(center + std::polar(rho, two_pi * k / angle_points));
    return acc * (two_pi / angle_points) * rho;
  };
  // Geometric panels from rho_max down to the peak scale, then one closing
  // panel through the origin: resolves a peak of width ~peak_scale at the
  // center without losing the mass inside it.
  int halvings = static_cast<int>(std::ceil(std::log2(rho_max / peak_scale)));
  halvings = std::min(std::max(halvings, 2), 64);
  double s = 0.0;
  double hi = rho_max;
  for (int p = 0; p < halvings; ++p) {
    const double lo = hi * 0.5;
    s += gl_panel(ring, lo, hi);
    hi = lo;
  }
  s += gl_panel(ring, 0.0, hi);
  return s;
}

}  // namespace nevlab::quadrature
