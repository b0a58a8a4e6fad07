#include "nevlab/zeros.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace nevlab::zeros {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool usable(const cplx& v) {
  return v != cplx(0.0, 0.0) && std::isfinite(v.real()) && std::isfinite(v.imag());
}

// Accumulates the phase increment of f along a polyline, bisecting segments
// until each increment is below one radian. Reports failure (instead of a
// wrong winding) when that requires stepping within ~2^-48 of a segment.
class PhaseWalk {
public:
  explicit PhaseWalk(const std::function<cplx(cplx)>& f) : f_(f) {}

  bool segment(const cplx& a, const cplx& b) {
    const cplx fa = f_(a), fb = f_(b);
    if (!usable(fa) || !usable(fb)) return false;
    return refine(a, b, fa, fb, 0);
  }

  // winding number if every segment succeeded and the total is integral
  std::optional<int> result() const {
    if (failed_) return std::nullopt;
    const double w = total_ / kTwoPi;
    const double rounded = std::round(w);
    if (std::abs(w - rounded) > 1e-6) return std::nullopt;
    return static_cast<int>(rounded);
  }

private:
  bool refine(const cplx& a, const cplx& b, const cplx& fa, const cplx& fb, int depth) {
    const double dphi = std::arg(fb / fa);
    if (std::abs(dphi) <= 1.0 && depth >= 1) {
      total_ += dphi;
      return true;
    }
    if (depth > 48) {
      failed_ = true;
      return false;
    }
    const cplx mid = 0.5 * (a + b);
    const cplx fm = f_(mid);
    if (!usable(fm)) {
      failed_ = true;
      return false;
    }
    return refine(a, mid, fa, fm, depth + 1) && refine(mid, b, fm, fb, depth + 1);
  }

  const std::function<cplx(cplx)>& f_;
  double total_ = 0.0;
  bool failed_ = false;
};

std::optional<int> circle_winding(const std::function<cplx(cplx)>& f, const cplx& center,
                                  double radius) {
  constexpr int kBase = 64;
  PhaseWalk walk(f);
  for (int k = 0; k < kBase; ++k) {
    const double t0 = kTwoPi * k / kBase;
    const double t1 = kTwoPi * (k + 1) / kBase;
    const cplx a = center + radius * cplx(std::cos(t0), std::sin(t0));
    const cplx b = center + radius * cplx(std::cos(t1), std::sin(t1));
    if (!walk.segment(a, b)) return std::nullopt;
  }
  return walk.result();
}

std::optional<int> square_winding(const std::function<cplx(cplx)>& f, const cplx& center,
                                  double half) {
  const cplx c[4] = {center + cplx(-half, -half), center + cplx(half, -half),
                     center + cplx(half, half), center + cplx(-half, half)};
  constexpr int kPerSide = 8;
  PhaseWalk walk(f);
  for (int s = 0; s < 4; ++s) {
    const cplx a = c[s], b = c[(s + 1) % 4];
    for (int k = 0; k < kPerSide; ++k) {
      const cplx p = a + (b - a) * (static_cast<double>(k) / kPerSide);
      const cplx q = a + (b - a) * (static_cast<double>(k + 1) / kPerSide);
      if (!walk.segment(p, q)) return std::nullopt;
    }
  }
  return walk.result();
}

// Winding of a box, retried with slightly grown and shifted boxes when the
// contour lands on a zero. Growth keeps every retry containing the original.
std::optional<int> box_winding_nudged(const std::function<cplx(cplx)>& f, cplx& center,
                                      double& half) {
  for (int attempt = 0; attempt < 24; ++attempt) {
    auto w = square_winding(f, center, half);
    if (w) return w;
    half *= 1.0 + 3e-7;
    center += half * 1e-7 * cplx(0.6180339887, 0.7861513777);
  }
  return std::nullopt;
}

cplx newton_polish(const std::function<cplx(cplx)>& f, const std::function<cplx(cplx)>& df,
                   cplx z, int iterations) {
  for (int it = 0; it < iterations; ++it) {
    const cplx fz = f(z);
    if (fz == cplx(0.0, 0.0)) return z;
    const cplx dz = df(z);
    if (!usable(dz)) {
      z += 1e-7 * (1.0 + std::abs(z)) * cplx(0.7357, 0.6773);
      continue;
    }
    const cplx step = fz / dz;
    z -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
  }
  return z;
}

}  // namespace

ZeroSet find_zeros(const std::function<cplx(cplx)>& f, const std::function<cplx(cplx)>& df,
                   double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("find_zeros: radius must be positive");
  ZeroSet out;

  // Total count over the closed disk, nudging the circle outward off any
  // boundary zero. The counting weight vanishes at the rim, so the nudge does
  // not move any downstream integral.
  double r_eff = radius;
  std::optional<int> total;
  for (int attempt = 0; attempt < 24 && !total; ++attempt) {
    total = circle_winding(f, cplx(0.0, 0.0), r_eff);
    if (!total) {
      r_eff *= 1.0 + 1e-9 * std::pow(2.0, attempt);
      out.boundary_adjusted = true;
    }
  }
  if (!total) throw std::runtime_error("find_zeros: could not stabilize the boundary contour");
  if (*total < 0) throw std::runtime_error("find_zeros: negative winding (function not holomorphic?)");
  if (*total == 0) return out;

  // Quadtree localization inside the bounding square of the (nudged) disk.
  struct Box {
    cplx center;
    double half;
  };
  std::vector<Box> work{{cplx(0.0, 0.0), r_eff}};
  std::vector<cplx> raw;
  const double resolve = std::max(1e-9, 1e-8 * radius);
  while (!work.empty()) {
    Box box = work.back();
    work.pop_back();
    auto w = box_winding_nudged(f, box.center, box.half);
    if (!w) throw std::runtime_error("find_zeros: subdivision contour would not stabilize");
    if (*w < 0) throw std::runtime_error("find_zeros: negative winding in subdivision");
    if (*w == 0) continue;
    if (box.half < resolve) {
      raw.push_back(newton_polish(f, df, box.center, 120));
      continue;
    }
    const double h = 0.5 * box.half;
    work.push_back({box.center + cplx(-h, -h), h});
    work.push_back({box.center + cplx(h, -h), h});
    work.push_back({box.center + cplx(h, h), h});
    work.push_back({box.center + cplx(-h, h), h});
  }

  // Merge duplicates found from adjacent boxes, keep the disk, classify the
  // origin, and read multiplicities from small circles around each zero.
  std::vector<cplx> locations;
  for (const cplx& z : raw) {
    if (std::abs(z) > r_eff * (1.0 + 1e-7)) continue;
    bool dup = false;
    for (const cplx& seen : locations)
      if (std::abs(z - seen) < 1e-6 * (1.0 + std::abs(z))) { dup = true; break; }
    if (!dup) locations.push_back(z);
  }

  int accounted = 0;
  const double origin_tol = 1e-9 * (1.0 + radius);
  for (const cplx& z : locations) {
    const double rho = 1e-5 * (1.0 + std::abs(z));
    auto mult = circle_winding(f, z, rho);
    if (!mult || *mult < 1) throw std::runtime_error("find_zeros: multiplicity probe failed");
    accounted += *mult;
    if (std::abs(z) <= origin_tol)
      out.order_at_origin += *mult;
    else
      out.zeros.push_back({z, *mult});
  }
  if (accounted != *total)
    throw std::runtime_error("find_zeros: localized multiplicities disagree with the boundary winding");
  return out;
}

}  // namespace nevlab::zeros
