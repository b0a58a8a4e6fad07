#pragma once

#include <functional>
#include <vector>

#include "nevlab/complexmat.hpp"

namespace nevlab::zeros {

// Zero finding for holomorphic functions on a chart disk, by the argument
// principle: total count from the winding number of the boundary circle,
// localization by quadtree subdivision with rectangle windings, positions by
// Newton polish, multiplicities by small-circle windings. Functions are
// sampled adaptively so phase increments stay below one radian; a contour
// passing too close to a zero is nudged outward (boundary zeros are counted,
// consistent with counting on the closed disk).

struct Zero {
  cplx location;
  int multiplicity = 1;
};

struct ZeroSet {
  std::vector<Zero> zeros;    // zeros away from the origin, |z| > origin_tol
  int order_at_origin = 0;    // multiplicity at z = 0, listed separately
  bool boundary_adjusted = false;  // a contour had to be nudged off a zero
  int total() const {
    int t = order_at_origin;
    for (const auto& z : zeros) t += z.multiplicity;
    return t;
  }
};

// Zeros of f in the closed disk |z| <= radius. df is the derivative (used by
// the Newton polish). Throws if localized multiplicities disagree with the
// boundary winding.
ZeroSet find_zeros(const std::function<cplx(cplx)>& f, const std::function<cplx(cplx)>& df,
                   double radius);

}  // namespace nevlab::zeros
