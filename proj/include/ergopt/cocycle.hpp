#pragma once

// Linear cocycles over symbolic bases: overflow-safe products, the sets
// Sigma_n of Cartan projections, Lyapunov vectors of periodic orbits, joint
// spectral radius and subradius brackets, domination detection, inner/outer
// spectrum approximations, conjugation and the extremal-norm defect.

#include <numbers>

#include "matgeo.hpp"
#include "symdyn.hpp"

namespace ergopt {

// ---------------------------------------------------------------------------
// cocycles

/// Cocycle whose matrix at x depends on the first `window` symbols of x.
/// Window 1 is the one-step case A_{x_0}.
class Cocycle {
 public:
  using WindowFn = std::function<Matrix(std::span<const Symbol>)>;

  Cocycle() = default;

  static Cocycle one_step(const std::vector<Matrix>& matrices) {
    return one_step(matrices, SymbolicSystem::full_shift(static_cast<int>(matrices.size())));
  }

  static Cocycle one_step(const std::vector<Matrix>& matrices, const SymbolicSystem& base) {
    require(!matrices.empty(), "cocycle needs at least one matrix");
    require(static_cast<int>(matrices.size()) == base.alphabet_size(), "one matrix per symbol expected");
    const auto d = matrices[0].rows();
    for (const auto& a : matrices) {
      require(a.rows() == d && a.cols() == d, "matrices must be square of equal size");
      const double det = a.rows() == 2 ? a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) : a.partialPivLu().determinant();
      require(std::abs(det) > 1e-12, "cocycle matrices must be invertible (|det| > 1e-12)");
    }
    return windowed(base, static_cast<int>(d), 1, [&](std::span<const Symbol> w) { return matrices[w[0]]; });
  }

  static Cocycle windowed(const SymbolicSystem& base, int dim, int window, const WindowFn& fn) {
    Cocycle c = windowed_scaled(base, dim, window, [&](std::span<const Symbol> w) { return ScaledMatrix::from(fn(w)); });
    for_each_word(base, window, [&](const Word& w) { c.raw_.set(w, fn(w)); });
    return c;
  }

  /// Windowed cocycle from scaled matrices, keeping their determinant data.
  static Cocycle windowed_scaled(const SymbolicSystem& base, int dim, int window,
                                 const std::function<ScaledMatrix(std::span<const Symbol>)>& fn) {
    require(dim >= 1 && window >= 1, "dimension and window must be >= 1");
    Cocycle c;
    c.base_ = base;
    c.dim_ = dim;
    c.window_ = window;
    c.table_ = WordTable<ScaledMatrix>(base, window);
    c.raw_ = WordTable<Matrix>(base, window);
    for_each_word(base, window, [&](const Word& w) {
      ScaledMatrix m = fn(w);
      require(m.dim() == dim, "window matrix has the wrong shape");
      c.raw_.set(w, m.value());
      c.table_.set(w, std::move(m));
    });
    return c;
  }

  /// Identity cocycle on the full shift with k symbols.
  static Cocycle identity(int dim, int k = 2) {
    return one_step(std::vector<Matrix>(static_cast<std::size_t>(k), Matrix::Identity(dim, dim)));
  }

  const SymbolicSystem& base() const { return base_; }
  int dim() const { return dim_; }
  int window() const { return window_; }
  int alphabet_size() const { return base_.alphabet_size(); }
  bool is_one_step() const { return window_ == 1; }

  /// Matrix at a point with leading symbols w.
  const ScaledMatrix& at(std::span<const Symbol> w) const { return table_.at(w); }
  const Matrix& matrix(std::span<const Symbol> w) const { return raw_.at(w); }
  const WordTable<ScaledMatrix>& table() const { return table_; }

  /// Letter matrices of a one-step cocycle.
  std::vector<Matrix> letters() const {
    require(is_one_step(), "letters() needs a one-step cocycle");
    std::vector<Matrix> out;
    for (int a = 0; a < alphabet_size(); ++a) {
      const Word w{static_cast<Symbol>(a)};
      out.push_back(matrix(w));
    }
    return out;
  }

 private:
  SymbolicSystem base_;
  int dim_ = 1;
  int window_ = 1;
  WordTable<ScaledMatrix> table_;
  WordTable<Matrix> raw_;
};

/// Number of matrix steps carried by a word of the given length.
inline int product_steps(const Cocycle& F, std::size_t word_length) {
  return static_cast<int>(word_length) - F.window() + 1;
}

/// F^{(n)} at the point with leading symbols w, n = |w| - window + 1:
/// G(T^{n-1}x) ... G(Tx) G(x). For one-step cocycles this is A_{w_{n-1}} ... A_{w_0}.
inline ScaledMatrix product(const Cocycle& F, std::span<const Symbol> w) {
  if (!F.base().admissible(w)) throw InvalidArgument("word is not admissible");
  const int n = product_steps(F, w.size());
  if (n < 0) throw ContextError("word is shorter than the cocycle window minus one");
  ScaledMatrix p = ScaledMatrix::identity(F.dim());
  for (int i = 0; i < n; ++i) p = F.at(w.subspan(static_cast<std::size_t>(i))) * p;
  return p;
}

/// Product over one period of a necklace, read from its unrolled word.
inline ScaledMatrix period_product(const Cocycle& F, const Necklace& w) {
  require(F.base().cyclically_admissible(w.word()), "necklace is not admissible for the cocycle's base");
  return product(F, w.unroll(w.period() + F.window() - 1));
}

// ---------------------------------------------------------------------------
// product tree

namespace detail {
template <class Fn>
void walk_from(const Cocycle& F, Word& w, std::vector<ScaledMatrix>& stack, int n, int max_n, Fn& fn) {
  fn(static_cast<const Word&>(w), n, stack[static_cast<std::size_t>(n)]);
  if (n == max_n) return;
  const std::size_t tail = static_cast<std::size_t>(F.window() - 1);
  for (int a = 0; a < F.alphabet_size(); ++a) {
    const Symbol s = static_cast<Symbol>(a);
    if (!w.empty() && !F.base().allowed(w.back(), s)) continue;
    w.push_back(s);
    stack[static_cast<std::size_t>(n + 1)] = F.at(std::span<const Symbol>(w).subspan(w.size() - tail - 1)) *
                                             stack[static_cast<std::size_t>(n)];
    walk_from(F, w, stack, n + 1, max_n, fn);
    w.pop_back();
  }
}
}  // namespace detail

/// Number of admissible words of length n + window - 1 summed over 1 <= n <= max_n.
inline double product_tree_size(const Cocycle& F, int max_n) {
  double total = 0;
  for (int n = 1; n <= max_n; ++n) total += F.base().count_words(n + F.window() - 1);
  return total;
}

/// Map-reduce over all products of 1..max_n steps. visit(acc, word, n, P) sees
/// every admissible word of length n + window - 1 with its product P; words of
/// one length arrive in lexicographic order. Subtrees rooted at the words of
/// length `window` run in parallel; their accumulators are merged in root
/// order, so the result does not depend on the worker count.
template <class Acc, class Visit, class Merge>
Acc reduce_products(const Cocycle& F, int max_n, Acc init, Visit visit, Merge merge) {
  require(max_n >= 1, "product length must be >= 1");
  check_budget(product_tree_size(F, max_n), enumeration_budget(), "product tree");
  const auto roots = words_of_length(F.base(), F.window());
  std::vector<Acc> accs(roots.size(), init);
  parallel_for(roots.size(), [&](std::size_t b, std::size_t e) {
    std::vector<ScaledMatrix> stack(static_cast<std::size_t>(max_n) + 1);
    for (std::size_t r = b; r < e; ++r) {
      Word w = roots[r];
      stack[1] = F.at(w);
      auto fn = [&](const Word& word, int n, const ScaledMatrix& p) { visit(accs[r], word, n, p); };
      detail::walk_from(F, w, stack, 1, max_n, fn);
    }
  });
  Acc out = std::move(init);
  for (auto& a : accs) merge(out, a);
  return out;
}

/// Calls fn(word, P) for every admissible word of length n + window - 1, in
/// lexicographic order, sequentially.
template <class Fn>
void for_each_product(const Cocycle& F, int n, Fn&& fn) {
  require(n >= 1, "product length must be >= 1");
  check_budget(product_tree_size(F, n), enumeration_budget(), "product tree");
  std::vector<ScaledMatrix> stack(static_cast<std::size_t>(n) + 1);
  auto visit = [&](const Word& w, int m, const ScaledMatrix& p) {
    if (m == n) fn(w, p);
  };
  for (Word w : words_of_length(F.base(), F.window())) {
    stack[1] = F.at(w);
    detail::walk_from(F, w, stack, 1, n, visit);
  }
}

// ---------------------------------------------------------------------------
// Cartan sets and Lyapunov vectors

/// Sigma_n(F): Cartan projections of all n-step products, in word order.
inline std::vector<ChamberVector> sigma_n(const Cocycle& F, int n) {
  std::vector<ChamberVector> out;
  for_each_product(F, n, [&](const Word&, const ScaledMatrix& p) { out.push_back(p.cartan()); });
  return out;
}

/// Lyapunov vector of the periodic orbit w: (1/q) times the Jordan projection
/// of the period product.
inline ChamberVector lyap_vector_periodic(const Cocycle& F, const Necklace& w) {
  return period_product(F, w).jordan().scaled(1.0 / w.period());
}

// ---------------------------------------------------------------------------
// joint spectral radius and subradius

struct JsrBracket {
  double lower = 0;       ///< best rho(P)^{1/q} over necklaces
  double upper = 0;       ///< best max ||P||^{1/m} over product lengths m
  Necklace witness;       ///< first necklace attaining `lower`
  int upper_length = 0;   ///< m attaining `upper`
  int depth = 0;
};

struct SubradiusBracket {
  double lower = 0;       ///< supermultiplicative lower bound
  double upper = 0;       ///< smallest rho(P)^{1/q} over necklaces
  Necklace witness;       ///< first necklace attaining `upper`
  int lower_length = 0;
  int depth = 0;
  /// Only the upper side is attained by a witness; the subradius can be
  /// unattained and discontinuous, so no rate is promised for the lower side.
  bool one_sided = true;
};

namespace detail {
inline bool improves(double candidate, double best, bool maximize) {
  if (!std::isfinite(best)) return maximize ? candidate > best : candidate < best;
  const double tol = 1e-12 * std::max(1.0, std::abs(best));
  return maximize ? candidate > best + tol : candidate < best - tol;
}

/// (Lyapunov vector, necklace) for every necklace of period <= depth.
inline std::vector<std::pair<ChamberVector, Necklace>> necklace_growth(const Cocycle& F, int depth) {
  const auto necklaces = enumerate_necklaces(F.base(), depth);
  std::vector<std::pair<ChamberVector, Necklace>> out(necklaces.size());
  parallel_for(necklaces.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = {lyap_vector_periodic(F, necklaces[i]), necklaces[i]};
  });
  return out;
}
}  // namespace detail

inline JsrBracket jsr_bracket(const Cocycle& F, int depth) {
  require(depth >= 1, "depth must be >= 1");
  JsrBracket b;
  b.depth = depth;
  double best = -std::numeric_limits<double>::infinity();
  for (auto& [v, n] : detail::necklace_growth(F, depth)) {
    if (detail::improves(v[0], best, true)) {
      best = v[0];
      b.witness = n;
    }
  }
  // per length m: max log ||P||
  using Acc = std::vector<double>;
  Acc per_len = reduce_products(
      F, depth, Acc(static_cast<std::size_t>(depth) + 1, -std::numeric_limits<double>::infinity()),
      [](Acc& a, const Word&, int n, const ScaledMatrix& p) {
        a[static_cast<std::size_t>(n)] = std::max(a[static_cast<std::size_t>(n)], p.log_norm());
      },
      [](Acc& a, const Acc& o) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::max(a[i], o[i]);
      });
  double up = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= depth; ++m) {
    const double v = per_len[static_cast<std::size_t>(m)] / m;
    if (v < up) {
      up = v;
      b.upper_length = m;
    }
  }
  b.lower = std::exp(best);
  b.upper = std::exp(up);
  return b;
}

/// Upper side: smallest rho(P)^{1/q} over necklaces. Lower side: the sum of
/// the i smallest log singular values is superadditive along products and
/// bounds the sum of the i smallest log |eigenvalues|, hence i log rho, from
/// below; so (1/(i m)) min_w sum_{j > d-i} log s_j(P_w) over m-words is a
/// lower bound for each m and 1 <= i <= d.
inline SubradiusBracket subradius_bracket(const Cocycle& F, int depth) {
  require(depth >= 1, "depth must be >= 1");
  SubradiusBracket b;
  b.depth = depth;
  double best = std::numeric_limits<double>::infinity();
  for (auto& [v, n] : detail::necklace_growth(F, depth)) {
    const double low = v[0];
    if (detail::improves(low, best, false)) {
      best = low;
      b.witness = n;
    }
  }
  const int d = F.dim();
  using Acc = std::vector<double>;  // [(m, i)] -> min over words of tail sum
  const std::size_t stride = static_cast<std::size_t>(d) + 1;
  Acc acc = reduce_products(
      F, depth, Acc((static_cast<std::size_t>(depth) + 1) * stride, std::numeric_limits<double>::infinity()),
      [&](Acc& a, const Word&, int n, const ScaledMatrix& p) {
        const ChamberVector s = p.cartan();
        double tail = 0;
        for (int i = 1; i <= d; ++i) {
          tail += s[d - i];
          auto& slot = a[static_cast<std::size_t>(n) * stride + static_cast<std::size_t>(i)];
          slot = std::min(slot, tail);
        }
      },
      [](Acc& a, const Acc& o) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::min(a[i], o[i]);
      });
  double low = -std::numeric_limits<double>::infinity();
  for (int m = 1; m <= depth; ++m)
    for (int i = 1; i <= d; ++i) {
      const double v = acc[static_cast<std::size_t>(m) * stride + static_cast<std::size_t>(i)] / (i * m);
      if (v > low) {
        low = v;
        b.lower_length = m;
      }
    }
  b.upper = std::exp(best);
  b.lower = std::min(std::exp(low), b.upper);
  // a single matrix: every product is a power, and rho(A^n)^{1/n} = rho(A)
  if (F.alphabet_size() == 1 && F.is_one_step()) b.lower = b.upper;
  return b;
}

// ---------------------------------------------------------------------------
// domination

enum class Verdict { dominated, undominated, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::dominated: return "dominated";
    case Verdict::undominated: return "undominated";
    default: return "inconclusive";
  }
}

struct DominationReport {
  std::vector<int> depths;
  double kappa = 1.05;
  /// rates[i-1][j] = min over words of (1/n)(log s_i - log s_{i+1}) at n = depths[j].
  std::vector<std::vector<double>> rates;
  /// growth[i-1] = (n r(n) - n' r(n')) / (n - n') over the two largest depths
  /// n' < n: the marginal rate of the total gap.
  std::vector<double> growth;
  /// Periodic orbit whose Lyapunov gap at index i vanishes (period = 0 if
  /// none was found). Domination forces a positive gap on every orbit, so
  /// such an orbit proves the index undominated.
  std::vector<Necklace> zero_gap_orbit;
  std::vector<Verdict> verdicts;  ///< per index i = 1..d-1
  ThetaSet theta;                 ///< indices not verdicted dominated

  bool dominated(int index) const { return verdicts.at(static_cast<std::size_t>(index - 1)) == Verdict::dominated; }
};

/// Finite-depth domination test: index i is reported dominated when the gap
/// rate is at least log(kappa) at the two largest depths and the total gap
/// keeps growing at that rate between them, undominated when the rate at the
/// largest depth vanishes (<= 1e-9) or some periodic orbit of period <=
/// orbit_period has a vanishing Lyapunov gap, inconclusive otherwise. The
/// growth test rejects bounded gaps, whose rates decay like 1/n and can clear
/// the threshold at small depths.
inline DominationReport domination_report(const Cocycle& F, std::vector<int> depths, double kappa = 1.05,
                                          int orbit_period = 8) {
  require(!depths.empty(), "need at least one depth");
  require(kappa > 1, "kappa must exceed 1");
  for (std::size_t j = 0; j < depths.size(); ++j) {
    require(depths[j] >= 1, "depths must be >= 1");
    require(j == 0 || depths[j] > depths[j - 1], "depths must be strictly ascending");
  }
  const int d = F.dim();
  DominationReport r;
  r.depths = depths;
  r.kappa = kappa;
  r.rates.assign(static_cast<std::size_t>(std::max(0, d - 1)), std::vector<double>(depths.size()));
  const int max_n = depths.back();
  using Acc = std::vector<double>;  // [n][i]
  const std::size_t stride = static_cast<std::size_t>(std::max(1, d - 1));
  Acc acc(d > 1 ? (static_cast<std::size_t>(max_n) + 1) * stride : 0, std::numeric_limits<double>::infinity());
  if (d > 1) {
    std::vector<char> wanted(static_cast<std::size_t>(max_n) + 1, 0);
    for (int n : depths) wanted[static_cast<std::size_t>(n)] = 1;
    acc = reduce_products(
        F, max_n, acc,
        [&](Acc& a, const Word&, int n, const ScaledMatrix& p) {
          if (!wanted[static_cast<std::size_t>(n)]) return;
          const ChamberVector s = p.cartan();
          for (int i = 1; i < d; ++i) {
            auto& slot = a[static_cast<std::size_t>(n) * stride + static_cast<std::size_t>(i - 1)];
            slot = std::min(slot, s[i - 1] - s[i]);
          }
        },
        [](Acc& a, const Acc& o) {
          for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::min(a[i], o[i]);
        });
  }
  r.zero_gap_orbit.assign(static_cast<std::size_t>(std::max(0, d - 1)), Necklace());
  if (d > 1 && orbit_period >= 1) {
    for (const auto& n : enumerate_necklaces(F.base(), orbit_period)) {
      const ChamberVector chi = lyap_vector_periodic(F, n);
      for (int i = 1; i < d; ++i) {
        auto& w = r.zero_gap_orbit[static_cast<std::size_t>(i - 1)];
        if (w.period() == 0 && chi[i - 1] - chi[i] <= 1e-9) w = n;
      }
    }
  }
  std::set<int> theta;
  const double threshold = std::log(kappa);
  for (int i = 1; i < d; ++i) {
    auto& row = r.rates[static_cast<std::size_t>(i - 1)];
    for (std::size_t j = 0; j < depths.size(); ++j)
      row[j] = acc[static_cast<std::size_t>(depths[j]) * stride + static_cast<std::size_t>(i - 1)] / depths[j];
    const std::size_t last = depths.size() - 1;
    const std::size_t prev = depths.size() >= 2 ? last - 1 : last;
    const double growth = last == prev ? row[last]
                                       : (depths[last] * row[last] - depths[prev] * row[prev]) /
                                             (depths[last] - depths[prev]);
    r.growth.push_back(growth);
    Verdict v = Verdict::inconclusive;
    if (r.zero_gap_orbit[static_cast<std::size_t>(i - 1)].period() > 0 || row[last] <= 1e-9)
      v = Verdict::undominated;
    else if (row[last] >= threshold && row[prev] >= threshold && growth >= threshold)
      v = Verdict::dominated;
    r.verdicts.push_back(v);
    if (v != Verdict::dominated) theta.insert(i);
  }
  r.theta = ThetaSet(d, theta);
  return r;
}

// ---------------------------------------------------------------------------
// spectra

struct SpectrumApprox {
  std::vector<std::pair<ChamberVector, Necklace>> lplus;  ///< Lyapunov vectors of periodic orbits
  ThetaSet theta;
  std::vector<Vector> directions;
  std::vector<double> inner;    ///< Theta-hull support of the Lyapunov samples
  std::vector<double> outer;    ///< Theta-hull support of Sigma_depth / depth
  std::vector<double> inner_convex;     ///< plain convex hull of the samples
  std::vector<double> inner_symmetric;  ///< Weyl-symmetrized hull of the samples
  std::vector<double> outer_symmetric;  ///< Weyl-symmetrized hull of Sigma_depth / depth
  std::vector<ChamberVector> inner_vertices_2d;  ///< extreme Lyapunov samples, d = 2 only
  int max_period = 0;
  int depth = 0;
  double gap = 0;        ///< max over directions of outer - inner
  double min_slack = 0;  ///< min over directions of outer - inner
};

/// Unit directions for chamber data: uniform circle for d = 2, Fibonacci
/// sphere for d = 3, and +-1 for d = 1.
inline std::vector<Vector> chamber_directions(int d, int n) {
  std::vector<Vector> out;
  if (d == 1) {
    out.push_back(Vector::Constant(1, 1.0));
    out.push_back(Vector::Constant(1, -1.0));
    return out;
  }
  require(n >= 4, "need at least 4 directions");
  require(d <= 3, "built-in direction sampling covers d <= 3; supply directions explicitly");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int j = 0; j < n; ++j) {
    Vector c(d);
    if (d == 2) {
      const double a = 2 * std::numbers::pi * j / n;
      c << std::cos(a), std::sin(a);
    } else {
      const double z = 1.0 - 2.0 * (j + 0.5) / n;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      c << r * std::cos(golden * j), r * std::sin(golden * j), z;
    }
    out.push_back(c);
  }
  return out;
}

inline SpectrumApprox spectrum_approx(const Cocycle& F, int max_period, int depth, const ThetaSet& theta,
                                      std::vector<Vector> directions) {
  require(max_period >= 1 && depth >= 1, "max_period and depth must be >= 1");
  require(theta.dim() == F.dim(), "Theta does not match the cocycle dimension");
  for (const auto& c : directions) require(c.size() == F.dim(), "direction dimension mismatch");
  SpectrumApprox s;
  s.theta = theta;
  s.max_period = max_period;
  s.depth = depth;
  s.directions = std::move(directions);
  const auto necklaces = enumerate_necklaces(F.base(), max_period);
  s.lplus.resize(necklaces.size());
  parallel_for(necklaces.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) s.lplus[i] = {lyap_vector_periodic(F, necklaces[i]), necklaces[i]};
  });
  std::vector<ChamberVector> samples;
  for (auto& p : s.lplus) samples.push_back(p.first);
  std::vector<ChamberVector> sig = sigma_n(F, depth);
  for (auto& v : sig) v = v.scaled(1.0 / depth);
  const ThetaSet none = ThetaSet::empty(F.dim()), full = ThetaSet::full(F.dim());
  s.gap = -std::numeric_limits<double>::infinity();
  s.min_slack = std::numeric_limits<double>::infinity();
  for (const auto& c : s.directions) {
    s.inner.push_back(theta_hull_support(samples, theta, c));
    s.outer.push_back(theta_hull_support(sig, theta, c));
    s.inner_convex.push_back(theta_hull_support(samples, none, c));
    s.inner_symmetric.push_back(theta_hull_support(samples, full, c));
    s.outer_symmetric.push_back(theta_hull_support(sig, full, c));
    const double diff = s.outer.back() - s.inner.back();
    s.gap = std::max(s.gap, diff);
    s.min_slack = std::min(s.min_slack, diff);
  }
  if (F.dim() == 2) {
    // extreme points of a set of chamber vectors in the plane: the two ends of
    // its projection on the trace-zero line, and likewise on the trace line
    std::vector<std::pair<double, std::size_t>> by_u, by_v;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      by_u.push_back({samples[i][0] - samples[i][1], i});
      by_v.push_back({samples[i][0] + samples[i][1], i});
    }
    std::set<std::size_t> picked;
    auto ends = [&](std::vector<std::pair<double, std::size_t>>& v) {
      auto lt = [](auto& a, auto& b) { return a.first < b.first - 1e-12; };
      picked.insert(std::min_element(v.begin(), v.end(), lt)->second);
      picked.insert(std::max_element(v.begin(), v.end(), lt)->second);
    };
    ends(by_u);
    ends(by_v);
    for (auto i : picked) s.inner_vertices_2d.push_back(samples[i]);
  }
  return s;
}

inline SpectrumApprox spectrum_approx(const Cocycle& F, int max_period, int depth, const ThetaSet& theta,
                                      int directions = 64) {
  return spectrum_approx(F, max_period, depth, theta, chamber_directions(F.dim(), directions));
}

// ---------------------------------------------------------------------------
// conjugation and extremal norms

/// G(w) = H(shift w)^{-1} F(w) H(w), with H given on windows of length
/// H.length(). G depends on max(F.window(), H.length() + 1) symbols.
inline Cocycle conjugate(const Cocycle& F, const WordTable<Matrix>& H) {
  require(H.system() == F.base(), "conjugating map lives on a different base");
  const int window = std::max(F.window(), H.length() + 1);
  return Cocycle::windowed(F.base(), F.dim(), window, [&](std::span<const Symbol> w) {
    const Matrix& h0 = H.at(w);
    const Matrix& h1 = H.at(w.subspan(1));
    require(h0.rows() == F.dim() && h1.rows() == F.dim(), "conjugating matrix has the wrong shape");
    return Matrix(h1.partialPivLu().solve(F.matrix(w) * h0));
  });
}

/// Constant conjugating map H = P on the given base.
inline WordTable<Matrix> constant_map(const SymbolicSystem& base, const Matrix& P) {
  WordTable<Matrix> H(base, 0);
  H.set(Word{}, P);
  return H;
}

/// max over words u of log ||F(u)||, measured from the norm of phi(u) to the
/// norm of phi(shift u), minus beta_est. The norm of an SPD point p is
/// |v|_p = |p^{-1/2} v|. A nonpositive defect certifies that the metric is
/// extremal for the estimate.
inline double extremal_defect(const Cocycle& F, const WordTable<SpdPoint>& metric, double beta_est) {
  require(metric.system() == F.base(), "metric lives on a different base");
  require(std::isfinite(beta_est), "beta_est must be finite");
  const int len = std::max(F.window(), metric.length() + 1);
  double worst = -std::numeric_limits<double>::infinity();
  // cache square roots per metric entry
  WordTable<std::pair<Matrix, Matrix>> roots(F.base(), metric.length());
  for (auto c : metric.codes()) {
    const SpdPoint& p = metric.at_code(c);
    roots.set_code(c, {p.sqrt(), p.inv_sqrt()});
  }
  for_each_word(F.base(), len, [&](const Word& u) {
    const Matrix g = roots.at(std::span<const Symbol>(u).subspan(1)).second * F.matrix(u) * roots.at(u).first;
    Eigen::JacobiSVD<Matrix> svd(g);
    worst = std::max(worst, std::log(svd.singularValues()[0]));
  });
  return worst - beta_est;
}

/// Constant metric p on windows of length 0.
inline WordTable<SpdPoint> constant_metric(const SymbolicSystem& base, const SpdPoint& p) {
  WordTable<SpdPoint> t(base, 0);
  t.set(Word{}, p);
  return t;
}

}  // namespace ergopt
