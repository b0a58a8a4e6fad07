#include "nevlab/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace nevlab::geometry {

namespace {

constexpr double kPi = std::numbers::pi;

void check_chart(const ManifoldModel& model, const CVec& z) {
  if (z.size() != model.m) throw std::invalid_argument("geometry: point dimension mismatch");
  if (!model.is_flat() && z.norm2() >= 1.0)
    throw std::domain_error("geometry: point outside the unit-ball chart");
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

double ManifoldModel::chart_radius() const {
  return kind == ModelKind::Flat ? std::numeric_limits<double>::infinity() : 1.0;
}

std::string ManifoldModel::id() const {
  std::ostringstream os;
  switch (kind) {
    case ModelKind::Flat: os << "flat:" << m; break;
    case ModelKind::PoincareDisk: os << "poincare"; break;
    case ModelKind::ComplexHyperbolicBall: os << "chball:" << m; break;
  }
  if (curvature_scale != 1.0) os << ":scale=" << curvature_scale;
  return os.str();
}

ManifoldModel parse_model(const std::string& text) {
  ManifoldModel model;
  std::string rest = text;
  auto take = [&rest]() -> std::string {
    auto pos = rest.find(':');
    std::string head = rest.substr(0, pos);
    rest = pos == std::string::npos ? std::string() : rest.substr(pos + 1);
    return head;
  };
  std::string kind = take();
  if (kind == "flat") {
    model.kind = ModelKind::Flat;
    std::string dim = take();
    if (dim.empty()) throw std::invalid_argument("model: flat needs a dimension, e.g. flat:2");
    model.m = std::stoi(dim);
  } else if (kind == "poincare") {
    model.kind = ModelKind::PoincareDisk;
    model.m = 1;
  } else if (kind == "chball") {
    model.kind = ModelKind::ComplexHyperbolicBall;
    std::string dim = take();
    if (dim.empty()) throw std::invalid_argument("model: chball needs a dimension, e.g. chball:2");
    model.m = std::stoi(dim);
  } else {
    throw std::invalid_argument("model: unknown kind '" + kind + "'");
  }
  if (model.m < 1 || model.m > 3) throw std::invalid_argument("model: dimension must be 1..3");
  while (!rest.empty()) {
    std::string opt = take();
    if (opt.rfind("scale=", 0) == 0) {
      model.curvature_scale = std::stod(opt.substr(6));
      if (!(model.curvature_scale > 0.0)) throw std::invalid_argument("model: scale must be positive");
    } else if (!opt.empty()) {
      throw std::invalid_argument("model: unknown option '" + opt + "'");
    }
  }
  return model;
}

ChartPoint origin(const ManifoldModel& model) { return ChartPoint{CVec(model.m)}; }

CMat metric_at(const ManifoldModel& model, const CVec& z) {
  check_chart(model, z);
  const int m = model.m;
  const double s2 = model.curvature_scale * model.curvature_scale;
  CMat g(m, m);
  switch (model.kind) {
    case ModelKind::Flat:
      for (int i = 0; i < m; ++i) g(i, i) = s2;
      break;
    case ModelKind::PoincareDisk: {
      const double w = 1.0 - z.norm2();
      g(0, 0) = s2 * 4.0 / (w * w);
      break;
    }
    case ModelKind::ComplexHyperbolicBall: {
      const double w = 1.0 - z.norm2();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          cplx v = std::conj(z[i]) * z[j];
          if (i == j) v += w;
          g(i, j) = s2 * v / (w * w);
        }
      break;
    }
  }
  return g;
}

CMat inverse_metric_at(const ManifoldModel& model, const CVec& z) {
  // Closed-form inverses: flat is diagonal and the ball metric inverts by the
  // rank-one structure, but the LU inverse at dimension <= 3 is just as exact.
  return metric_at(model, z).inverse();
}

CMat complex_ricci_at(const ManifoldModel& model, const CVec& z) {
  check_chart(model, z);
  const int m = model.m;
  CMat ric(m, m);
  switch (model.kind) {
    case ModelKind::Flat:
      break;
    case ModelKind::PoincareDisk: {
      const double w = 1.0 - z.norm2();
      ric(0, 0) = -2.0 / (w * w);
      break;
    }
    case ModelKind::ComplexHyperbolicBall: {
      // Einstein: Ric = -(m+1) * g_base, and log det g is scale-independent.
      const double w = 1.0 - z.norm2();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          cplx v = std::conj(z[i]) * z[j];
          if (i == j) v += w;
          ric(i, j) = -(m + 1.0) * v / (w * w);
        }
      break;
    }
  }
  return ric;
}

double ricci_lower_bound(const ManifoldModel& model, const CVec& z) {
  check_chart(model, z);
  const double s2 = model.curvature_scale * model.curvature_scale;
  switch (model.kind) {
    case ModelKind::Flat: return 0.0;
    case ModelKind::PoincareDisk: return -1.0 / s2;
    case ModelKind::ComplexHyperbolicBall: return -2.0 * (model.m + 1.0) / s2;
  }
  return 0.0;
}

double kappa_profile(const ManifoldModel& model, double t) {
  if (t < 0.0) throw std::invalid_argument("kappa_profile: negative radius");
  return ricci_lower_bound(model, CVec(model.m)) / (2.0 * model.m - 1.0);
}

double scalar_curvature(const ManifoldModel& model, const CVec& z) {
  check_chart(model, z);
  const double s2 = model.curvature_scale * model.curvature_scale;
  switch (model.kind) {
    case ModelKind::Flat: return 0.0;
    case ModelKind::PoincareDisk: return -1.0 / s2;
    case ModelKind::ComplexHyperbolicBall: return -2.0 * model.m * (model.m + 1.0) / s2;
  }
  return 0.0;
}

double distance_to_base(const ManifoldModel& model, const CVec& z) {
  check_chart(model, z);
  const double rho = z.norm();
  const double s = model.curvature_scale;
  switch (model.kind) {
    case ModelKind::Flat: return s * rho;
    case ModelKind::PoincareDisk: return s * 2.0 * std::atanh(rho);
    case ModelKind::ComplexHyperbolicBall: return s * std::atanh(rho);
  }
  return 0.0;
}

double chart_radius_of_sphere(const ManifoldModel& model, double r) {
  if (r < 0.0) throw std::invalid_argument("chart_radius_of_sphere: negative radius");
  const double s = model.curvature_scale;
  switch (model.kind) {
    case ModelKind::Flat: return r / s;
    case ModelKind::PoincareDisk: return std::tanh(r / (2.0 * s));
    case ModelKind::ComplexHyperbolicBall: return std::tanh(r / s);
  }
  return 0.0;
}

double unit_sphere_area(int m) {
  // S^{2m-1} in R^{2m}: 2 pi^m / (m-1)!
  return 2.0 * std::pow(kPi, m) / factorial(m - 1);
}

double sphere_area(const ManifoldModel& model, double t) {
  if (t < 0.0) throw std::invalid_argument("sphere_area: negative radius");
  const double s = model.curvature_scale;
  const int m = model.m;
  switch (model.kind) {
    case ModelKind::Flat:
      return unit_sphere_area(m) * std::pow(t, 2 * m - 1);
    case ModelKind::PoincareDisk:
      return 2.0 * kPi * s * std::sinh(t / s);
    case ModelKind::ComplexHyperbolicBall: {
      // 2m-2 directions of curvature -1/s^2 and one of curvature -4/s^2.
      const double u = t / s;
      return unit_sphere_area(m) * std::pow(s, 2 * m - 1) *
             std::pow(std::sinh(u), 2 * m - 2) * 0.5 * std::sinh(2.0 * u);
    }
  }
  return 0.0;
}

CMat diffusion_factor(const ManifoldModel& model, const CVec& z) {
  CMat ginv = inverse_metric_at(model, z);
  // conj of the Cholesky factor of g^{-1} factors conj(g)^{-1}.
  CMat c = ginv.cholesky();
  CMat cc(c.rows(), c.cols());
  for (int i = 0; i < c.rows(); ++i)
    for (int j = 0; j < c.cols(); ++j) cc(i, j) = std::conj(c(i, j));
  return cc;
}

CMat fd_complex_hessian(const std::function<double(const CVec&)>& value, const CVec& z) {
  const int m = z.size();
  const double h = 1e-4 * (1.0 + z.norm());
  // Real second partials by central differences; d2/dx2 uses the 3-point
  // stencil, mixed terms the 4-point cross.
  auto second = [&](int var_a, int var_b) {
    // var index encoding: 2k = x_k, 2k+1 = y_k
    auto bump = [&](int var, double step, CVec& p) {
      if (var % 2 == 0) p[var / 2] += step;
      else p[var / 2] += cplx(0.0, step);
    };
    if (var_a == var_b) {
      CVec pp = z, pm = z;
      bump(var_a, h, pp);
      bump(var_a, -h, pm);
      return (value(pp) - 2.0 * value(z) + value(pm)) / (h * h);
    }
    CVec a = z, b = z, c = z, d = z;
    bump(var_a, h, a); bump(var_b, h, a);
    bump(var_a, h, b); bump(var_b, -h, b);
    bump(var_a, -h, c); bump(var_b, h, c);
    bump(var_a, -h, d); bump(var_b, -h, d);
    return (value(a) - value(b) - value(c) + value(d)) / (4.0 * h * h);
  };
  CMat hess(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const double uxx = second(2 * i, 2 * j);
      const double uyy = second(2 * i + 1, 2 * j + 1);
      const double uxy = second(2 * i, 2 * j + 1);
      const double uyx = second(2 * i + 1, 2 * j);
      // d2u/dz_i dzbar_j = (1/4)[(u_xx + u_yy) + i (u_xy - u_yx)]
      hess(i, j) = 0.25 * cplx(uxx + uyy, uxy - uyx);
      if (j != i) hess(j, i) = std::conj(hess(i, j));
    }
  return hess;
}

double laplace_beltrami(const ManifoldModel& model, const SmoothField& u, const CVec& z) {
  check_chart(model, z);
  CMat hess = u.complex_hessian ? u.complex_hessian(z) : fd_complex_hessian(u.value, z);
  const cplx t = trace_against(metric_at(model, z), hess);
  return 4.0 * t.real();
}

}  // namespace nevlab::geometry
