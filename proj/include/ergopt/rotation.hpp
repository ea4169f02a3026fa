#pragma once

// Vector-valued ergodic optimization: rotation sets as inner hulls of periodic
// averages and outer envelopes of support functions, the fish of the doubling
// map, and the homoclinic-sum certificate.

#include <complex>

#include "birkhoff.hpp"

namespace ergopt {

using Point = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// R^d-valued observable: d real components on one base. Components are all
/// locally constant or all circle observables.
class VectorObservable {
 public:
  VectorObservable() = default;

  /// joint_lipschitz, when positive, bounds |f(s) - f(t)| (Euclidean) per unit
  /// of circle distance and sharpens the directional error terms.
  explicit VectorObservable(std::vector<Observable> components, double joint_lipschitz = 0)
      : comps_(std::move(components)), joint_lipschitz_(joint_lipschitz) {
    require(!comps_.empty(), "vector observable needs at least one component");
    const bool circle = comps_[0].is_circle();
    for (const auto& c : comps_) {
      require(c.is_circle() == circle, "components must all be circle or all locally constant observables");
      require(c.base() == comps_[0].base(), "components must share the base system");
    }
  }

  /// Circle inclusion z = e^{2 pi i t} under doubling.
  static VectorObservable fish() {
    return VectorObservable({Observable::cos_angle(), Observable::sin_angle()}, 2 * std::numbers::pi);
  }

  static VectorObservable constant(const Point& v, const SymbolicSystem& base = SymbolicSystem::full_shift(2)) {
    std::vector<Observable> cs;
    for (double x : v) cs.push_back(Observable::constant(x, base));
    return VectorObservable(std::move(cs));
  }

  int dim() const { return static_cast<int>(comps_.size()); }
  const Observable& component(int i) const { return comps_[static_cast<std::size_t>(i)]; }
  bool is_circle() const { return comps_[0].is_circle(); }
  const SymbolicSystem& base() const { return comps_[0].base(); }
  double joint_lipschitz() const { return joint_lipschitz_; }

  /// Lipschitz bound of <c, f> along the circle.
  double directional_lipschitz(std::span<const double> c) const {
    double by_comp = 0, norm = 0;
    for (int i = 0; i < dim(); ++i) {
      by_comp += std::abs(c[static_cast<std::size_t>(i)]) * comps_[static_cast<std::size_t>(i)].lipschitz();
      norm += c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i)];
    }
    if (joint_lipschitz_ > 0) return std::min(by_comp, std::sqrt(norm) * joint_lipschitz_);
    return by_comp;
  }

  /// Componentwise a_i * f_i + b_i.
  VectorObservable affine(double a, const Point& b) const {
    require(static_cast<int>(b.size()) == dim(), "offset dimension mismatch");
    std::vector<Observable> cs;
    for (int i = 0; i < dim(); ++i) cs.push_back(component(i).affine(a, b[static_cast<std::size_t>(i)]));
    return VectorObservable(std::move(cs), std::abs(a) * joint_lipschitz_);
  }

  Point periodic_average(const Necklace& w) const {
    Point p;
    for (const auto& c : comps_) p.push_back(ergopt::periodic_average(c, w));
    return p;
  }

 private:
  std::vector<Observable> comps_;
  double joint_lipschitz_ = 0;
};

// ---------------------------------------------------------------------------
// directions

/// n unit vectors: uniform angles for d = 2, a Fibonacci lattice for d = 3,
/// +-e_1 (n ignored) for d = 1.
inline std::vector<Point> sample_directions(int d, int n) {
  std::vector<Point> out;
  if (d == 1) return {{1.0}, {-1.0}};
  require(n >= 4, "need at least 4 directions");
  if (d == 2) {
    for (int j = 0; j < n; ++j) {
      const double a = 2 * std::numbers::pi * j / n;
      out.push_back({std::cos(a), std::sin(a)});
    }
    return out;
  }
  require(d == 3, "built-in direction sampling covers d <= 3; supply directions explicitly");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int j = 0; j < n; ++j) {
    const double z = 1.0 - 2.0 * (j + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.push_back({r * std::cos(golden * j), r * std::sin(golden * j), z});
  }
  return out;
}

// ---------------------------------------------------------------------------
// inner hull

struct InnerVertex {
  Point point;
  Necklace witness;
  bool sturmian = false;
};

namespace detail {
inline double cross(const Point& o, const Point& a, const Point& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}
}  // namespace detail

/// Extreme points of a finite planar set, counter-clockwise from the
/// lexicographically smallest point. Among coincident points the earliest one
/// in input order is kept; collinear boundary points are dropped.
inline std::vector<InnerVertex> hull2d(std::vector<InnerVertex> pts, double tol = 1e-12) {
  std::vector<std::size_t> idx(pts.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return pts[a].point < pts[b].point;
  });
  std::vector<std::size_t> uniq;
  for (auto i : idx) {
    if (!uniq.empty()) {
      const auto& p = pts[uniq.back()].point;
      if (std::abs(p[0] - pts[i].point[0]) <= tol && std::abs(p[1] - pts[i].point[1]) <= tol) {
        if (i < uniq.back()) uniq.back() = i;
        continue;
      }
    }
    uniq.push_back(i);
  }
  if (uniq.size() <= 2) {
    std::vector<InnerVertex> out;
    for (auto i : uniq) out.push_back(pts[i]);
    return out;
  }
  std::vector<std::size_t> h(2 * uniq.size());
  std::size_t m = 0;
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    while (m >= 2 && detail::cross(pts[h[m - 2]].point, pts[h[m - 1]].point, pts[uniq[i]].point) <= tol) --m;
    h[m++] = uniq[i];
  }
  for (std::size_t i = uniq.size() - 1, lower = m + 1; i-- > 0;) {
    while (m >= lower && detail::cross(pts[h[m - 2]].point, pts[h[m - 1]].point, pts[uniq[i]].point) <= tol) --m;
    h[m++] = uniq[i];
  }
  std::vector<InnerVertex> out;
  for (std::size_t i = 0; i + 1 < m; ++i) out.push_back(pts[h[i]]);
  return out;
}

/// Periodic averages over all necklaces of period <= max_period, in
/// (period, lexicographic) order.
inline std::vector<InnerVertex> periodic_averages(const VectorObservable& f, int max_period) {
  const auto necklaces = enumerate_necklaces(f.base(), max_period);
  std::vector<InnerVertex> out(necklaces.size());
  parallel_for(necklaces.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = {f.periodic_average(necklaces[i]), necklaces[i], false};
  });
  for (auto& v : out) v.sturmian = f.base().alphabet_size() == 2 && is_sturmian(v.witness);
  return out;
}

/// Extreme points of the hull of periodic averages. Exact for d <= 2; for
/// d >= 3 a point is kept when it is the first maximizer in some direction.
inline std::vector<InnerVertex> rotation_inner(const VectorObservable& f, int max_period,
                                               const std::vector<Point>& directions = {}) {
  require(max_period >= 1, "max_period must be >= 1");
  auto all = periodic_averages(f, max_period);
  if (f.dim() == 2) return hull2d(std::move(all));
  std::vector<Point> dirs = directions.empty() ? sample_directions(f.dim(), 256) : directions;
  std::vector<char> keep(all.size(), 0);
  for (const auto& c : dirs) {
    std::size_t best = 0;
    double bv = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < all.size(); ++i) {
      const double v = dot(c, all[i].point);
      if (v > bv + 1e-12) {
        bv = v;
        best = i;
      }
    }
    keep[best] = 1;
  }
  std::vector<InnerVertex> out;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (keep[i]) out.push_back(all[i]);
  return out;
}

inline double support(const std::vector<InnerVertex>& pts, std::span<const double> c) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : pts) best = std::max(best, dot(c, p.point));
  return best;
}

// ---------------------------------------------------------------------------
// outer envelope

/// For each direction c, an upper bound on the support function of the
/// rotation set: (1/depth) sup_x <c, f^{(depth)}(x)>. Exact max-plus dynamic
/// programming for locally constant components; a dyadic grid with guard bits
/// and a Lipschitz correction for circle components.
inline std::vector<double> rotation_outer(const VectorObservable& f, int depth, const std::vector<Point>& directions,
                                          int guard = 4) {
  require(depth >= 1, "depth must be >= 1");
  for (const auto& c : directions) require(static_cast<int>(c.size()) == f.dim(), "direction dimension mismatch");
  const std::size_t nd = directions.size();
  std::vector<double> out(nd);
  const int d = f.dim();
  if (!f.is_circle()) {
    int window = 1;
    for (int i = 0; i < d; ++i) window = std::max(window, f.component(i).window());
    std::vector<Observable> wide;
    for (int i = 0; i < d; ++i) wide.push_back(f.component(i).widened(window));
    parallel_for(nd, [&](std::size_t b, std::size_t e) {
      for (std::size_t j = b; j < e; ++j) {
        const auto& c = directions[j];
        out[j] = detail::max_window_path(
                     f.base(), window,
                     [&](std::uint64_t code) {
                       double s = 0;
                       for (int i = 0; i < d; ++i) s += c[static_cast<std::size_t>(i)] * wide[static_cast<std::size_t>(i)].on_code(code);
                       return s;
                     },
                     depth) /
                 depth;
      }
    });
    return out;
  }
  const int bits = depth + guard;
  require(bits <= 40, "circle grid too fine");
  check_budget(std::ldexp(1.0, bits) * depth, enumeration_budget(), "circle evaluation grid");
  const std::uint64_t cells = std::uint64_t{1} << bits;
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(worker_count() * 4, cells / 1024 + 1));
  std::vector<std::vector<double>> partial(chunks, std::vector<double>(nd, -std::numeric_limits<double>::infinity()));
  parallel_for(chunks, [&](std::size_t b, std::size_t e) {
    Point sum(static_cast<std::size_t>(d));
    for (std::size_t ch = b; ch < e; ++ch) {
      auto& best = partial[ch];
      const std::uint64_t lo = cells * ch / chunks, hi = cells * (ch + 1) / chunks;
      for (std::uint64_t j = lo; j < hi; ++j) {
        double t = std::ldexp(static_cast<double>(2 * j + 1), -(bits + 1));
        std::fill(sum.begin(), sum.end(), 0.0);
        for (int s = 0; s < depth; ++s) {
          for (int i = 0; i < d; ++i) sum[static_cast<std::size_t>(i)] += f.component(i).on_angle(t);
          t *= 2;
          if (t >= 1) t -= 1;
        }
        for (std::size_t q = 0; q < nd; ++q) best[q] = std::max(best[q], dot(directions[q], sum));
      }
    }
  });
  const double per_unit = std::ldexp(1.0, -(bits + 1)) * (std::ldexp(1.0, depth) - 1.0);
  for (std::size_t q = 0; q < nd; ++q) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& p : partial) m = std::max(m, p[q]);
    out[q] = (m + f.directional_lipschitz(directions[q]) * per_unit) / depth;
  }
  return out;
}

// ---------------------------------------------------------------------------
// inner/outer pair

struct ConvexApprox {
  std::vector<InnerVertex> inner;
  std::vector<Point> directions;
  std::vector<double> inner_support;
  std::vector<double> outer_support;
  int max_period = 0;
  int depth = 0;
  double hausdorff_gap = 0;  ///< max over directions of outer - inner support
  double min_slack = 0;      ///< min over directions of outer - inner support
};

inline ConvexApprox convex_approx(const VectorObservable& f, int max_period, int depth, int directions = 64,
                                  int guard = 4) {
  ConvexApprox a;
  a.max_period = max_period;
  a.depth = depth;
  a.directions = sample_directions(f.dim(), directions);
  a.inner = rotation_inner(f, max_period, f.dim() >= 3 ? a.directions : std::vector<Point>{});
  a.outer_support = rotation_outer(f, depth, a.directions, guard);
  a.hausdorff_gap = -std::numeric_limits<double>::infinity();
  a.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < a.directions.size(); ++q) {
    a.inner_support.push_back(support(a.inner, a.directions[q]));
    const double diff = a.outer_support[q] - a.inner_support[q];
    a.hausdorff_gap = std::max(a.hausdorff_gap, diff);
    a.min_slack = std::min(a.min_slack, diff);
  }
  return a;
}

/// Inner/outer approximation of the fish: the rotation set of z under z -> z^2.
inline ConvexApprox fish_approx(int max_period, int depth, int directions = 64, int guard = 4) {
  require(max_period >= 1 && depth >= 1, "max_period and depth must be >= 1");
  return convex_approx(VectorObservable::fish(), max_period, depth, directions, guard);
}

/// Binary digit complement, which maps the orbit of angle t to that of 1 - t
/// and so conjugates the circle inclusion.
inline Necklace complement(const Necklace& n) {
  Word w = n.word();
  for (auto& s : w) s = static_cast<Symbol>(1 - s);
  return Necklace::canonical(w);
}

// ---------------------------------------------------------------------------
// homoclinic sum

struct HomoclinicSum {
  std::complex<double> sum;
  double tail = 0;  ///< bound on the modulus of the omitted terms
  bool certified = false;
};

/// S = sum_{n=1}^{n_max} (e^{2 pi i / 2^n} - 1) with tail bound 2 pi 2^{-n_max}.
/// Nonzero is certified when Im S exceeds the tail bound.
inline HomoclinicSum homoclinic_sum(int n_max) {
  require(n_max >= 1, "n_max must be >= 1");
  // Half-angle recursion from the exact values at pi and pi/2; the real part
  // cos a - 1 = -2 sin^2(a/2) avoids cancellation for small angles.
  std::vector<double> c(static_cast<std::size_t>(n_max) + 2), s(static_cast<std::size_t>(n_max) + 2);
  c[1] = -1;
  s[1] = 0;
  c[2] = 0;
  s[2] = 1;
  for (int n = 3; n <= n_max + 1; ++n) {
    c[static_cast<std::size_t>(n)] = std::sqrt((1 + c[static_cast<std::size_t>(n - 1)]) / 2);
    s[static_cast<std::size_t>(n)] = s[static_cast<std::size_t>(n - 1)] / (2 * c[static_cast<std::size_t>(n)]);
  }
  HomoclinicSum h;
  double re = 0, im = 0;
  for (int n = 1; n <= n_max; ++n) {
    const double half = s[static_cast<std::size_t>(n + 1)];
    re += n <= 2 ? c[static_cast<std::size_t>(n)] - 1 : -2 * half * half;
    im += s[static_cast<std::size_t>(n)];
  }
  h.sum = {re, im};
  h.tail = 2 * std::numbers::pi * std::ldexp(1.0, -n_max);
  h.certified = im > h.tail;
  return h;
}

}  // namespace ergopt
