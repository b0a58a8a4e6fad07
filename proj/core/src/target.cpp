#include "nevlab/target.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace nevlab::target {

namespace {

std::string strip(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad numeric literal: " + s);
  return v;
}

cplx w_pow(const cplx& w, int e) {
  cplx p(1.0, 0.0);
  for (int i = 0; i < e; ++i) p *= w;
  return p;
}

// Rank of a list of row vectors, by elimination with column pivoting.
int numeric_rank(std::vector<CVec> rows, int n_cols) {
  int rank = 0;
  double scale = 0.0;
  for (const auto& r : rows) scale = std::max(scale, r.norm());
  if (scale == 0.0) return 0;
  for (int col = 0; col < n_cols && rank < static_cast<int>(rows.size()); ++col) {
    int pivot = -1;
    double best = 1e-9 * scale;
    for (int i = rank; i < static_cast<int>(rows.size()); ++i)
      if (std::abs(rows[i][col]) > best) { best = std::abs(rows[i][col]); pivot = i; }
    if (pivot < 0) continue;
    std::swap(rows[pivot], rows[rank]);
    for (int i = rank + 1; i < static_cast<int>(rows.size()); ++i) {
      cplx f = rows[i][col] / rows[rank][col];
      for (int j = 0; j < n_cols; ++j) rows[i][j] -= f * rows[rank][j];
    }
    ++rank;
  }
  return rank;
}

}  // namespace

cplx parse_complex(const std::string& text) {
  std::string s = strip(text);
  if (s.empty()) throw std::invalid_argument("empty complex literal");
  if (s.back() != 'i' && s.back() != 'I') return cplx(to_double(s), 0.0);
  s.pop_back();
  // Split off the real part: the last +/- that is not a leading sign and not
  // part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t p = s.size(); p-- > 1;) {
    if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E') {
      split = p;
      break;
    }
  }
  auto imag_of = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return to_double(t);
  };
  if (split == std::string::npos) return cplx(0.0, imag_of(s));
  return cplx(to_double(s.substr(0, split)), imag_of(s.substr(split)));
}

ProjectivePoint ProjectivePoint::of(const CVec& w) {
  const double n = w.norm();
  if (!(n > 0.0)) throw std::invalid_argument("projective point needs a nonzero lift");
  ProjectivePoint p;
  p.w = CVec(w.size());
  for (int i = 0; i < w.size(); ++i) p.w[i] = w[i] / n;
  return p;
}

ProjectivePoint ProjectivePoint::affine(const cplx& z) {
  return of(CVec{cplx(1.0, 0.0), z});
}

ProjectivePoint ProjectivePoint::infinity() {
  return of(CVec{cplx(0.0, 0.0), cplx(1.0, 0.0)});
}

HomogPoly::HomogPoly(int n_vars, int degree, std::vector<Monomial> terms)
    : n_vars_(n_vars), degree_(degree), terms_(std::move(terms)) {
  if (n_vars < 1 || n_vars > kMaxDim) throw std::invalid_argument("HomogPoly: bad n_vars");
  for (const auto& t : terms_) {
    int total = 0;
    for (int a = 0; a < n_vars; ++a) total += t.exp[a];
    if (total != degree) throw std::invalid_argument("HomogPoly: non-homogeneous term");
  }
}

HomogPoly HomogPoly::hyperplane(const CVec& coeffs) {
  const double n = coeffs.norm();
  if (!(n > 0.0)) throw std::invalid_argument("hyperplane: zero coefficient vector");
  std::vector<Monomial> terms;
  for (int a = 0; a < coeffs.size(); ++a) {
    if (coeffs[a] == cplx(0.0, 0.0)) continue;
    Monomial mono;
    mono.coeff = coeffs[a] / n;
    mono.exp[a] = 1;
    terms.push_back(mono);
  }
  return HomogPoly(coeffs.size(), 1, std::move(terms));
}

HomogPoly HomogPoly::vanishing_at(const ProjectivePoint& p) {
  if (p.w.size() != 2) throw std::invalid_argument("vanishing_at: P^1 points only");
  return hyperplane(CVec{p.w[1], -p.w[0]});
}

HomogPoly HomogPoly::fermat(int n_vars, int degree) {
  if (degree < 1) throw std::invalid_argument("fermat: degree must be positive");
  // For degree 1 the sup over the unit sphere is sqrt(n_vars); for degree >= 2
  // it is exactly 1, attained at the coordinate points.
  const double c = degree == 1 ? 1.0 / std::sqrt(static_cast<double>(n_vars)) : 1.0;
  std::vector<Monomial> terms;
  for (int a = 0; a < n_vars; ++a) {
    Monomial mono;
    mono.coeff = c;
    mono.exp[a] = degree;
    terms.push_back(mono);
  }
  return HomogPoly(n_vars, degree, std::move(terms));
}

cplx HomogPoly::eval(const CVec& w) const {
  cplx s(0.0, 0.0);
  for (const auto& t : terms_) {
    cplx p = t.coeff;
    for (int a = 0; a < n_vars_; ++a) p *= w_pow(w[a], t.exp[a]);
    s += p;
  }
  return s;
}

CVec HomogPoly::grad(const CVec& w) const {
  CVec g(n_vars_);
  for (const auto& t : terms_) {
    for (int a = 0; a < n_vars_; ++a) {
      if (t.exp[a] == 0) continue;
      cplx p = t.coeff * static_cast<double>(t.exp[a]) * w_pow(w[a], t.exp[a] - 1);
      for (int b = 0; b < n_vars_; ++b)
        if (b != a) p *= w_pow(w[b], t.exp[b]);
      g[a] += p;
    }
  }
  return g;
}

double section_norm(const LineBundleFS& bundle, const HomogPoly& poly, const CVec& w) {
  return bundle.varsigma * std::abs(poly.eval(w)) / std::pow(w.norm(), poly.degree());
}

double log_section_norm(const LineBundleFS& bundle, const HomogPoly& poly, const CVec& w) {
  return std::log(bundle.varsigma) + std::log(std::abs(poly.eval(w))) -
         poly.degree() * std::log(w.norm());
}

SncDivisor parse_divisor(const std::string& text) {
  const std::string s = strip(text);
  SncDivisor div;
  div.id = s;

  if (s.rfind("p1:points=[", 0) == 0 && s.back() == ']') {
    const std::string inner = s.substr(11, s.size() - 12);
    div.n = 1;
    div.degree = 1;
    std::vector<ProjectivePoint> pts;
    std::size_t pos = 0;
    while (pos <= inner.size()) {
      std::size_t comma = inner.find(',', pos);
      if (comma == std::string::npos) comma = inner.size();
      const std::string item = inner.substr(pos, comma - pos);
      if (item.empty()) throw std::invalid_argument("divisor: empty point entry");
      ProjectivePoint p =
          item == "inf" ? ProjectivePoint::infinity() : ProjectivePoint::affine(parse_complex(item));
      pts.push_back(p);
      div.components.push_back({HomogPoly::vanishing_at(p), item});
      pos = comma + 1;
    }
    if (pts.empty()) throw std::invalid_argument("divisor: no points given");
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const cplx det = pts[i].w[0] * pts[j].w[1] - pts[i].w[1] * pts[j].w[0];
        if (std::abs(det) < 1e-12)
          throw std::invalid_argument("divisor: repeated point " + div.components[i].label);
      }
    div.crossing_number = 1;
    return div;
  }

  if (s == "p2:coords") {
    div.n = 2;
    div.degree = 1;
    for (int a = 0; a < 3; ++a) {
      CVec c(3);
      c[a] = 1.0;
      div.components.push_back({HomogPoly::hyperplane(c), "w" + std::to_string(a)});
    }
    div.crossing_number = 2;
    return div;
  }

  if (s.rfind("p2:hyp:", 0) == 0) {
    const int q = std::atoi(s.c_str() + 7);
    if (q < 1 || q > 16) throw std::invalid_argument("divisor: bad hyperplane count");
    div.n = 2;
    div.degree = 1;
    std::vector<CVec> normals;
    for (int j = 0; j < q; ++j) {
      // Vandermonde rows with nodes on the unit circle: any three distinct
      // nodes stay uniformly independent, so the arrangement never drifts
      // toward a degenerate position as q grows (real nodes 1..q do).
      const cplx t = std::polar(1.0, 2.0 * std::numbers::pi * j / q);
      CVec c{cplx(1.0, 0.0), t, t * t};
      normals.push_back(c);
      div.components.push_back({HomogPoly::hyperplane(c), "t" + std::to_string(j)});
    }
    // Normal crossings for a hyperplane arrangement: any <= n+1 of the
    // normals are linearly independent; the numeric certificate guards it.
    for (std::size_t i = 0; i < normals.size(); ++i)
      for (std::size_t j = i + 1; j < normals.size(); ++j)
        for (std::size_t k = j + 1; k <= normals.size(); ++k) {
          std::vector<CVec> rows{normals[i], normals[j]};
          if (k < normals.size()) rows.push_back(normals[k]);
          if (numeric_rank(rows, 3) != static_cast<int>(rows.size()))
            throw std::invalid_argument("divisor: hyperplanes not in general position");
        }
    div.crossing_number = std::min(q, 2);
    return div;
  }

  for (int n = 1; n <= 3; ++n) {
    const std::string prefix = "p" + std::to_string(n) + ":fermat:";
    if (s.rfind(prefix, 0) == 0) {
      const int d = std::atoi(s.c_str() + prefix.size());
      if (d < 1 || d > 12) throw std::invalid_argument("divisor: bad fermat degree");
      div.n = n;
      div.degree = d;
      div.components.push_back({HomogPoly::fermat(n + 1, d), "fermat"});
      div.crossing_number = 1;  // smooth hypersurface
      return div;
    }
  }

  throw std::invalid_argument("unknown divisor id: " + text);
}

HoloMap parse_map(const std::string& text, int m_domain) {
  const std::string s = strip(text);
  HoloMap map;
  map.m_domain = m_domain;
  map.id = s;

  if (s == "map:id") {
    const int m = m_domain;
    map.n_target = m;
    map.lift = [m](const CVec& z) {
      CVec w(m + 1);
      w[0] = 1.0;
      for (int i = 0; i < m; ++i) w[i + 1] = z[i];
      return w;
    };
    map.lift_jac = [m](const CVec&) {
      CMat dw(m + 1, m);
      for (int i = 0; i < m; ++i) dw(i + 1, i) = 1.0;
      return dw;
    };
    return map;
  }

  if (m_domain != 1)
    throw std::invalid_argument("map " + s + " is defined on one-dimensional domains");
  map.n_target = 1;

  if (s == "map:exp") {
    map.lift = [](const CVec& z) { return CVec{cplx(1.0, 0.0), std::exp(z[0])}; };
    map.lift_jac = [](const CVec& z) {
      CMat dw(2, 1);
      dw(1, 0) = std::exp(z[0]);
      return dw;
    };
    return map;
  }

  std::vector<cplx> coeffs;
  if (s == "map:sq") {
    coeffs = {cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(1.0, 0.0)};
  } else if (s.rfind("map:poly:[", 0) == 0 && s.back() == ']') {
    const std::string inner = s.substr(10, s.size() - 11);
    std::size_t pos = 0;
    while (pos <= inner.size()) {
      std::size_t comma = inner.find(',', pos);
      if (comma == std::string::npos) comma = inner.size();
      coeffs.push_back(parse_complex(inner.substr(pos, comma - pos)));
      pos = comma + 1;
    }
    while (coeffs.size() > 1 && coeffs.back() == cplx(0.0, 0.0)) coeffs.pop_back();
    if (coeffs.size() < 2) throw std::invalid_argument("map: polynomial must be nonconstant");
  } else {
    throw std::invalid_argument("unknown map id: " + text);
  }

  map.lift = [coeffs](const CVec& z) {
    cplx p(0.0, 0.0);
    for (std::size_t k = coeffs.size(); k-- > 0;) p = p * z[0] + coeffs[k];
    return CVec{cplx(1.0, 0.0), p};
  };
  map.lift_jac = [coeffs](const CVec& z) {
    cplx dp(0.0, 0.0);
    for (std::size_t k = coeffs.size(); k-- > 1;) dp = dp * z[0] + static_cast<double>(k) * coeffs[k];
    CMat dw(2, 1);
    dw(1, 0) = dp;
    return dw;
  };
  return map;
}

CMat fs_pullback_matrix(const HoloMap& map, const CVec& z) {
  const CVec w = map.lift(z);
  const CMat dw = map.lift_jac(z);
  const int m = map.m_domain;
  const int n1 = w.size();
  const double w2 = w.norm2();

  CMat H(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      cplx di_dj(0.0, 0.0), di_w(0.0, 0.0), w_dj(0.0, 0.0);
      for (int a = 0; a < n1; ++a) {
        di_dj += dw(a, i) * std::conj(dw(a, j));
        di_w += dw(a, i) * std::conj(w[a]);
        w_dj += w[a] * std::conj(dw(a, j));
      }
      H(i, j) = (di_dj * w2 - di_w * w_dj) / (w2 * w2);
    }
  }
  return H;
}

double chern_density(const geometry::ManifoldModel& model, const HoloMap& map, const CVec& z,
                     int degree) {
  const CMat Ginv = geometry::inverse_metric_at(model, z);
  const CMat H = fs_pullback_matrix(map, z);
  return 2.0 * degree * (Ginv * H).trace().real();
}

double canonical_density(const geometry::ManifoldModel& model, const HoloMap& map,
                         const CVec& z) {
  return -(map.n_target + 1) * chern_density(model, map, z, 1);
}

std::function<cplx(cplx)> composed_scalar(const HomogPoly& poly, const HoloMap& map) {
  return [poly, map](cplx z) { return poly.eval(map.lift(CVec{z})); };
}

std::function<cplx(cplx)> composed_scalar_derivative(const HomogPoly& poly, const HoloMap& map) {
  return [poly, map](cplx z) {
    const CVec w = map.lift(CVec{z});
    const CMat dw = map.lift_jac(CVec{z});
    const CVec g = poly.grad(w);
    cplx s(0.0, 0.0);
    for (int a = 0; a < w.size(); ++a) s += g[a] * dw(a, 0);
    return s;
  };
}

int argmax_chart(const CVec& w) {
  int best = 0;
  for (int a = 1; a < w.size(); ++a)
    if (std::abs(w[a]) > std::abs(w[best])) best = a;
  return best;
}

CVec affine_coords(const CVec& w, int chart) {
  CVec u(w.size() - 1);
  int k = 0;
  for (int a = 0; a < w.size(); ++a) {
    if (a == chart) continue;
    u[k++] = w[a] / w[chart];
  }
  return u;
}

CMat chart_jacobian(const CVec& w, const CMat& dw, int chart) {
  const int m = dw.cols();
  CMat J(w.size() - 1, m);
  const cplx wc = w[chart];
  int k = 0;
  for (int a = 0; a < w.size(); ++a) {
    if (a == chart) continue;
    for (int j = 0; j < m; ++j) J(k, j) = (dw(a, j) * wc - w[a] * dw(chart, j)) / (wc * wc);
    ++k;
  }
  return J;
}

CMat fs_affine_matrix(const CVec& u) {
  const int n = u.size();
  const double t = 1.0 + u.norm2();
  CMat H(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx v = -std::conj(u[i]) * u[j];
      if (i == j) v += t;
      H(i, j) = v / (t * t);
    }
  return H;
}

CVec rho_gradient(const LineBundleFS& bundle, const HomogPoly& poly, const CVec& u) {
  (void)bundle;
  const int n = u.size();
  CVec w(n + 1);
  w[0] = 1.0;
  for (int i = 0; i < n; ++i) w[i + 1] = u[i];
  const cplx p = poly.eval(w);
  const CVec g = poly.grad(w);
  const double t = 1.0 + u.norm2();
  CVec v(n);
  for (int i = 0; i < n; ++i)
    v[i] = g[i + 1] / p - static_cast<double>(poly.degree()) * std::conj(u[i]) / t;
  return v;
}

}  // namespace nevlab::target
