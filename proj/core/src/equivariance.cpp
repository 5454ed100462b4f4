#include "bohm/equivariance.hpp"

#include "bohm/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace bohm {

namespace {

const GaussRule& rule8() {
  static const GaussRule r = gauss_legendre(8);
  return r;
}

}  // namespace

MarginalCdf::MarginalCdf(const CurrentProvider& provider, const GridSpec& grid, double t)
    : provider_(provider), grid_(grid), t_(t) {
  require(grid.dim == provider.dim(), Errc::dimension_mismatch, "grid dimension");
  const int n = grid.points[0];
  const double h = grid.spacing(0);
  cumulative_.assign(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    const double a = grid.coordinate(0, i);
    cumulative_[i + 1] = cumulative_[i] + integrate_interval([this](double x) { return density(x); }, a, a + h, 1, rule8());
  }
}

double MarginalCdf::density(double x) const {
  if (grid_.dim == 1) return provider_.current(t_, make_vec({x})).j0;
  GridSpec rest = grid_;
  rest.dim = grid_.dim - 1;
  rest.extent.erase(rest.extent.begin());
  rest.points.erase(rest.points.begin());
  rest.periodic.erase(rest.periodic.begin());
  std::vector<double> vals(rest.size());
  Vec q(grid_.dim);
  q(0) = x;
  for (std::size_t p = 0; p < rest.size(); ++p) {
    q.tail(rest.dim) = rest.node(p);
    vals[p] = provider_.current(t_, q).j0;
  }
  return pairwise_sum(vals) * rest.cell_volume();
}

double MarginalCdf::operator()(double x) const {
  const double lo = grid_.coordinate(0, 0);
  const double h = grid_.spacing(0);
  if (x <= lo) return 0.0;
  const int n = grid_.points[0];
  const double u = (x - lo) / h;
  if (u >= n) return cumulative_.back();
  const int i = static_cast<int>(u);
  const double a = lo + i * h;
  return cumulative_[i] + integrate_interval([this](double y) { return density(y); }, a, x, 1, rule8());
}

double MarginalCdf::quantile(double p) const {
  const double target = p * total();
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.begin()) return grid_.coordinate(0, 0);
  if (it == cumulative_.end()) return grid_.coordinate(0, 0) + 2.0 * grid_.extent[0];
  const int i = static_cast<int>(it - cumulative_.begin()) - 1;
  double lo = grid_.coordinate(0, i), hi = lo + grid_.spacing(0);
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    ((*this)(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ComparisonResult equivariance_test(const Ensemble& ens_T, const CurrentProvider& provider, double T, int bins,
                                   const GridSpec& grid) {
  require(ens_T.pushed(), Errc::invalid_argument, "ensemble has not been pushed forward");
  require(bins >= 1, Errc::invalid_argument, "need at least one bin");
  ComparisonResult r;
  r.n_total = ens_T.size();
  r.n_effective = ens_T.survivors();
  r.cemetery_fraction = ens_T.cemetery_fraction();
  require(r.n_effective >= 100, Errc::too_few_survivors,
          std::to_string(r.n_effective) + " survivors, at least 100 required");

  const MarginalCdf F(provider, grid, T);
  std::vector<double> edges{-std::numeric_limits<double>::infinity()};
  for (int b = 1; b < bins; ++b) edges.push_back(F.quantile(static_cast<double>(b) / bins));
  edges.push_back(std::numeric_limits<double>::infinity());
  std::vector<double> F_edges;
  for (double e : edges) F_edges.push_back(std::isinf(e) ? (e < 0 ? 0.0 : F.total()) : F(e));

  std::vector<double> xs;
  for (std::size_t i = 0; i < ens_T.size(); ++i)
    if (ens_T.survived(i)) xs.push_back(ens_T.terminal[i](0));
  std::sort(xs.begin(), xs.end());

  const double n = static_cast<double>(r.n_total);
  std::size_t k = 0;
  std::vector<double> abs_diff;
  for (int b = 0; b < bins; ++b) {
    HistogramBin bin{edges[b], edges[b + 1], F_edges[b + 1] - F_edges[b], 0.0};
    std::size_t count = 0;
    while (k < xs.size() && (b == bins - 1 || xs[k] < bin.hi)) {
      ++count;
      ++k;
    }
    bin.observed = static_cast<double>(count) / n;
    abs_diff.push_back(std::abs(bin.observed - bin.expected));
    const double p = std::clamp(bin.expected, 0.0, 1.0);
    if (bin.observed > bin.expected + 3.0 * std::sqrt(p * (1.0 - p) / n)) ++r.dominance_violations;
    r.noise_floor += std::sqrt(2.0 * p * (1.0 - p) / (std::numbers::pi * n));
    r.bins.push_back(bin);
  }
  r.l1_distance = pairwise_sum(abs_diff);

  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = F(xs[i]);
    r.ks_distance = std::max({r.ks_distance, std::abs(static_cast<double>(i + 1) / n - f),
                              std::abs(static_cast<double>(i) / n - f)});
  }
  r.ks_distance = std::min(r.ks_distance, 1.0);
  return r;
}

namespace {

using P2 = std::array<double, 2>;

double cross(const P2& o, const P2& a, const P2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

bool segments_cross(const P2& a, const P2& b, const P2& c, const P2& d) {
  const double d1 = cross(c, d, a), d2 = cross(c, d, b), d3 = cross(a, b, c), d4 = cross(a, b, d);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

bool is_simple(const std::vector<P2>& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  return true;
}

std::vector<P2> convex_hull(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<P2> h(2 * pts.size());
  std::size_t k = 0;
  for (const P2& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

// Radon's seven-point degree-5 rule on a triangle.
double triangle_integral(const std::function<double(const P2&)>& f, const P2& A, const P2& B, const P2& C) {
  static const double r15 = std::sqrt(15.0);
  static const double a1 = (6.0 - r15) / 21.0, a2 = (6.0 + r15) / 21.0;
  static const double w1 = (155.0 - r15) / 1200.0, w2 = (155.0 + r15) / 1200.0;
  auto at = [&](double u, double v) {
    const double w = 1.0 - u - v;
    return f(P2{w * A[0] + u * B[0] + v * C[0], w * A[1] + u * B[1] + v * C[1]});
  };
  const double area = 0.5 * std::abs(cross(A, B, C));
  const double s1 = at(a1, a1) + at(1.0 - 2.0 * a1, a1) + at(a1, 1.0 - 2.0 * a1);
  const double s2 = at(a2, a2) + at(1.0 - 2.0 * a2, a2) + at(a2, 1.0 - 2.0 * a2);
  return area * (0.225 * at(1.0 / 3.0, 1.0 / 3.0) + w1 * s1 + w2 * s2);
}

// Uniform K x K subdivision of a triangle.
double refined_triangle_integral(const std::function<double(const P2&)>& f, const P2& A, const P2& B, const P2& C,
                                 int K) {
  auto P = [&](int i, int j) {
    const double u = static_cast<double>(i) / K, v = static_cast<double>(j) / K;
    return P2{A[0] + u * (B[0] - A[0]) + v * (C[0] - A[0]), A[1] + u * (B[1] - A[1]) + v * (C[1] - A[1])};
  };
  std::vector<double> parts;
  for (int i = 0; i < K; ++i)
    for (int j = 0; i + j < K; ++j) {
      parts.push_back(triangle_integral(f, P(i, j), P(i + 1, j), P(i, j + 1)));
      if (i + j < K - 1) parts.push_back(triangle_integral(f, P(i + 1, j), P(i + 1, j + 1), P(i, j + 1)));
    }
  return pairwise_sum(parts);
}

double box_mass(const CurrentProvider& provider, double t, const Box& box, int panels) {
  const GaussRule& r = rule8();
  if (box.lo.size() == 1)
    return integrate_interval([&](double x) { return provider.current(t, make_vec({x})).j0; }, box.lo(0),
                              box.hi(0), panels, r);
  return integrate_interval(
      [&](double x) {
        return integrate_interval([&](double y) { return provider.current(t, make_vec({x, y})).j0; }, box.lo(1),
                                  box.hi(1), panels, r);
      },
      box.lo(0), box.hi(0), panels, r);
}

}  // namespace

std::vector<TransportResult> transport_check(const CurrentProvider& provider, const ConfigSpace& space,
                                             const std::vector<Box>& boxes, double t, const IntegratorConfig& cfg,
                                             int mesh) {
  const int d = provider.dim();
  require(d == 1 || d == 2, Errc::invalid_argument, "transport_check supports d = 1 or 2");
  require(mesh >= 1, Errc::invalid_argument, "mesh must be positive");
  const int K = std::max(1, mesh / 4);
  std::vector<TransportResult> out;
  auto flow = [&](const Vec& q) {
    const Trajectory tr = integrate(provider, space, q, t, cfg);
    require(tr.status == TrajectoryStatus::completed, Errc::node_encountered,
            "boundary point ended with " + std::string(to_string(tr.status)));
    return tr.final_point();
  };
  for (const Box& box : boxes) {
    require(box.lo.size() == d && box.hi.size() == d && (box.hi - box.lo).minCoeff() > 0.0, Errc::invalid_argument,
            "box corners must be ordered and match the dimension");
    TransportResult res;
    res.mesh = mesh;
    res.mu0 = box_mass(provider, 0.0, box, K);
    if (d == 1) {
      const Box image{flow(box.lo), flow(box.hi)};
      require(image.hi(0) > image.lo(0), Errc::box_too_large, "transported interval folded");
      res.mut = box_mass(provider, t, image, K);
    } else {
      // Counter-clockwise boundary, mesh segments per edge.
      std::vector<P2> boundary;
      const double x0 = box.lo(0), x1 = box.hi(0), y0 = box.lo(1), y1 = box.hi(1);
      for (int i = 0; i < mesh; ++i) boundary.push_back({x0 + (x1 - x0) * i / mesh, y0});
      for (int i = 0; i < mesh; ++i) boundary.push_back({x1, y0 + (y1 - y0) * i / mesh});
      for (int i = 0; i < mesh; ++i) boundary.push_back({x1 - (x1 - x0) * i / mesh, y1});
      for (int i = 0; i < mesh; ++i) boundary.push_back({x0, y1 - (y1 - y0) * i / mesh});
      std::vector<P2> image;
      for (const P2& p : boundary) {
        const Vec q = flow(make_vec({p[0], p[1]}));
        image.push_back({q(0), q(1)});
      }
      require(is_simple(image), Errc::box_too_large, "transported boundary self-intersects at mesh resolution");
      const std::vector<P2> hull = convex_hull(image);
      require(hull.size() >= 3, Errc::box_too_large, "transported box degenerated");
      P2 c{0.0, 0.0};
      for (const P2& p : hull) {
        c[0] += p[0] / static_cast<double>(hull.size());
        c[1] += p[1] / static_cast<double>(hull.size());
      }
      const std::function<double(const P2&)> rho = [&](const P2& p) {
        return provider.current(t, make_vec({p[0], p[1]})).j0;
      };
      std::vector<double> fans;
      for (std::size_t i = 0; i < hull.size(); ++i)
        fans.push_back(refined_triangle_integral(rho, c, hull[i], hull[(i + 1) % hull.size()], K));
      res.mut = pairwise_sum(fans);
    }
    res.discrepancy = std::abs(res.mu0 - res.mut);
    out.push_back(res);
  }
  return out;
}

}  // namespace bohm
