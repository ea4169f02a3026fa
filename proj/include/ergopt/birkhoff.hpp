#pragma once

// Scalar ergodic optimization: Birkhoff sums, two-sided bracketing of the
// maximal ergodic average, cohomologous smoothing, subaction iteration and
// maximizing sets.

#include <map>
#include <numbers>
#include <memory>
#include <optional>

#include "symdyn.hpp"

namespace ergopt {

/// Real observable on a symbolic base. Two kinds:
///  - locally constant: a table over admissible windows of fixed length;
///  - circle: a Lipschitz function of the angle t in [0,1), living on the
///    doubling map (binary full shift, t = 0.x0 x1 x2 ... in base 2).
class Observable {
 public:
  using WindowFn = std::function<double(std::span<const Symbol>)>;
  using CircleFn = std::function<double(double)>;

  Observable() = default;

  static Observable locally_constant(const SymbolicSystem& base, int window, const WindowFn& fn,
                                     std::string name = "table") {
    require(window >= 1, "window must be >= 1");
    Observable f;
    f.circle_ = false;
    f.base_ = base;
    f.window_ = window;
    f.name_ = std::move(name);
    check_budget(base.code_space(window), table_budget(), "observable window table");
    auto table = std::make_shared<std::vector<double>>(static_cast<std::size_t>(base.code_space(window)),
                                                       std::numeric_limits<double>::quiet_NaN());
    for_each_word(base, window, [&](const Word& w) { (*table)[word_code(w, base.alphabet_size())] = fn(w); });
    f.table_ = std::move(table);
    return f;
  }

  /// Locally constant observable from an explicit map word -> value. Missing
  /// admissible windows are an error.
  static Observable from_table(const SymbolicSystem& base, const std::map<Word, double>& values) {
    require(!values.empty(), "empty observable table");
    const int window = static_cast<int>(values.begin()->first.size());
    for (auto& [w, v] : values) {
      require(static_cast<int>(w.size()) == window, "table words must share one length");
      require(std::isfinite(v), "non-finite table value");
    }
    return locally_constant(base, window, [&](std::span<const Symbol> w) {
      auto it = values.find(Word(w.begin(), w.end()));
      if (it == values.end())
        throw InvalidArgument("observable table has no value for window " + word_to_string(w, base.alphabet_size()));
      return it->second;
    });
  }

  /// Lipschitz function of the angle; `lipschitz` bounds |f(s)-f(t)| / |s-t|
  /// in circle distance.
  static Observable circle(CircleFn fn, double lipschitz, std::string name = "circle") {
    require(lipschitz >= 0, "lipschitz bound must be nonnegative");
    Observable f;
    f.circle_ = true;
    f.base_ = SymbolicSystem::full_shift(2);
    f.window_ = 0;
    f.lipschitz_ = lipschitz;
    f.fn_ = std::move(fn);
    f.name_ = std::move(name);
    return f;
  }

  static Observable constant(double c, const SymbolicSystem& base = SymbolicSystem::full_shift(2)) {
    return locally_constant(base, 1, [c](std::span<const Symbol>) { return c; }, "constant");
  }

  /// t -> cos(2 pi t) on the doubling map.
  static Observable cos_angle() {
    return circle([](double t) { return std::cos(2 * std::numbers::pi * t); }, 2 * std::numbers::pi, "cos_angle");
  }
  /// t -> sin(2 pi t) on the doubling map.
  static Observable sin_angle() {
    return circle([](double t) { return std::sin(2 * std::numbers::pi * t); }, 2 * std::numbers::pi, "sin_angle");
  }
  /// x -> x_0.
  static Observable digit(const SymbolicSystem& base = SymbolicSystem::full_shift(2)) {
    return locally_constant(base, 1, [](std::span<const Symbol> w) { return double(w[0]); }, "digit");
  }
  /// x -> x_0 * x_1.
  static Observable digit_product(const SymbolicSystem& base = SymbolicSystem::full_shift(2)) {
    return locally_constant(base, 2, [](std::span<const Symbol> w) { return double(w[0]) * w[1]; },
                            "digit_product");
  }

  bool is_locally_constant() const { return !circle_; }
  bool is_circle() const { return circle_; }
  /// Number of leading symbols the value depends on (0 for circle observables).
  int window() const { return window_; }
  double lipschitz() const { return lipschitz_; }
  const SymbolicSystem& base() const { return base_; }
  const std::string& name() const { return name_; }

  /// Value on a locally constant observable's window (first window() symbols).
  double on_window(std::span<const Symbol> w) const {
    require(!circle_, "on_window needs a locally constant observable");
    if (w.size() < static_cast<std::size_t>(window_))
      throw ContextError("word shorter than observable window");
    return (*table_)[word_code(w.first(static_cast<std::size_t>(window_)), base_.alphabet_size())];
  }
  double on_code(std::uint64_t code) const { return (*table_)[code]; }

  /// Value of a circle observable at angle t.
  double on_angle(double t) const {
    require(circle_, "on_angle needs a circle observable");
    return fn_(t);
  }

  /// Value at a doubling-map point (either kind; locally constant observables
  /// read the binary digits of the point).
  double at(const CirclePoint& p) const {
    if (circle_) return fn_(p.angle());
    require(base_.alphabet_size() == 2, "circle points need a binary base");
    Word digits(static_cast<std::size_t>(window_));
    CirclePoint q = p;
    for (auto& d : digits) {
      d = q.digit();
      q = q.doubled();
    }
    return on_window(digits);
  }

  /// a * f + b.
  Observable affine(double a, double b) const {
    Observable g = *this;
    if (circle_) {
      auto fn = fn_;
      g.fn_ = [fn, a, b](double t) { return a * fn(t) + b; };
      g.lipschitz_ = std::abs(a) * lipschitz_;
    } else {
      auto t = std::make_shared<std::vector<double>>(*table_);
      for (double& v : *t) v = a * v + b;
      g.table_ = std::move(t);
    }
    return g;
  }

  /// Same values as a table over a longer window (locally constant only).
  Observable widened(int window) const {
    require(!circle_ && window >= window_, "can only widen locally constant observables");
    if (window == window_) return *this;
    Observable self = *this;
    return locally_constant(base_, window, [self](std::span<const Symbol> w) { return self.on_window(w); }, name_);
  }

 private:
  bool circle_ = false;
  SymbolicSystem base_;
  int window_ = 1;
  double lipschitz_ = 0;
  std::shared_ptr<const std::vector<double>> table_;
  CircleFn fn_;
  std::string name_;
};

/// Locally constant approximation of a circle observable: the value on each
/// binary window is f at the left endpoint 0.w of its cylinder.
inline Observable discretize(const Observable& f, int window) {
  require(f.is_circle(), "discretize needs a circle observable");
  return Observable::locally_constant(
      SymbolicSystem::full_shift(2), window,
      [&](std::span<const Symbol> w) { return f.on_angle(CirclePoint::from_binary(w).angle()); },
      f.name() + "_discretized");
}

// ---------------------------------------------------------------------------
// Birkhoff sums

/// Birkhoff sum along the doubling-map orbit of x.
inline double birkhoff_sum(const Observable& f, const CirclePoint& x, int n) {
  require(n >= 0, "n must be nonnegative");
  double s = 0;
  CirclePoint p = x;
  for (int i = 0; i < n; ++i) {
    s += f.at(p);
    p = p.doubled();
  }
  return s;
}

/// f + f o T + ... + f o T^{n-1} at the point whose leading symbols are x.
/// Locally constant observables need n + window - 1 admissible symbols;
/// circle observables read x as the dyadic point 0.x.
inline double birkhoff_sum(const Observable& f, std::span<const Symbol> x, int n) {
  require(n >= 0, "n must be nonnegative");
  if (f.is_circle()) return birkhoff_sum(f, CirclePoint::from_binary(x), n);
  const std::size_t need = static_cast<std::size_t>(n + f.window() - 1);
  if (n > 0 && x.size() < need)
    throw ContextError("Birkhoff sum of length " + std::to_string(n) + " needs " + std::to_string(need) +
                       " symbols, got " + std::to_string(x.size()));
  if (!f.base().admissible(x)) throw InvalidArgument("word is not admissible");
  double s = 0;
  for (int i = 0; i < n; ++i) s += f.on_window(x.subspan(static_cast<std::size_t>(i)));
  return s;
}


/// Average of f over the periodic orbit encoded by w: the integral of f
/// against the orbit's empirical measure.
inline double periodic_average(const Observable& f, const Necklace& w) {
  if (f.is_circle()) {
    double s = 0;
    for (const auto& p : orbit_angles(w)) s += f.at(p);
    return s / w.period();
  }
  require(f.base().cyclically_admissible(w.word()), "necklace is not admissible for the observable's base");
  Word ext = w.unroll(w.period() + f.window() - 1);
  double s = 0;
  for (int i = 0; i < w.period(); ++i) s += f.on_window(std::span<const Symbol>(ext).subspan(static_cast<std::size_t>(i)));
  return s / w.period();
}

// ---------------------------------------------------------------------------
// enveloping upper bounds

namespace detail {

/// max over admissible words u of length depth + W - 1 of sum_{i<depth} v(u[i..i+W)),
/// with v given by code over W-windows (max-plus dynamic programming).
inline double max_window_path(const SymbolicSystem& sys, int window, const std::function<double(std::uint64_t)>& value,
                              int depth) {
  const int k = sys.alphabet_size();
  const auto codes = admissible_codes(sys, window);
  const std::uint64_t span = static_cast<std::uint64_t>(sys.code_space(window));
  const std::uint64_t suffix_mod = static_cast<std::uint64_t>(sys.code_space(window - 1));
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> cur(span, ninf), next(span, ninf);
  std::vector<double> val(span, 0.0);
  for (auto c : codes) {
    val[c] = value(c);
    cur[c] = val[c];
  }
  for (int step = 1; step < depth; ++step) {
    std::fill(next.begin(), next.end(), ninf);
    for (auto c : codes) {
      if (cur[c] == ninf) continue;
      const Symbol last = static_cast<Symbol>(c % static_cast<std::uint64_t>(k));
      const std::uint64_t stem = (c % suffix_mod) * static_cast<std::uint64_t>(k);
      for (int a = 0; a < k; ++a) {
        if (!sys.allowed(last, static_cast<Symbol>(a))) continue;
        const std::uint64_t d = stem + static_cast<std::uint64_t>(a);
        next[d] = std::max(next[d], cur[c] + val[d]);
      }
    }
    cur.swap(next);
  }
  double best = ninf;
  for (auto c : codes) best = std::max(best, cur[c]);
  return best;
}

/// Rigorous bound on sup over x of f^{(depth)}(x) for a circle observable:
/// evaluate at the centres of the binary cylinders of length depth + guard and
/// add the Lipschitz error of each iterate (the i-th iterate lies in a
/// cylinder of length depth + guard - i).
template <class SumFn>
double circle_grid_max(int depth, int guard, double lipschitz, SumFn&& sum_at) {
  const int bits = depth + guard;
  require(bits <= 40, "circle grid too fine");
  check_budget(std::ldexp(1.0, bits) * depth, enumeration_budget(), "circle evaluation grid");
  const std::uint64_t cells = std::uint64_t{1} << bits;
  const unsigned workers = worker_count();
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(workers * 4, cells / 1024 + 1));
  std::vector<double> partial(chunks, -std::numeric_limits<double>::infinity());
  parallel_for(chunks, [&](std::size_t b, std::size_t e) {
    for (std::size_t ch = b; ch < e; ++ch) {
      const std::uint64_t lo = cells * ch / chunks, hi = cells * (ch + 1) / chunks;
      double best = -std::numeric_limits<double>::infinity();
      for (std::uint64_t j = lo; j < hi; ++j) {
        const double centre = std::ldexp(static_cast<double>(2 * j + 1), -(bits + 1));
        best = std::max(best, sum_at(centre));
      }
      partial[ch] = best;
    }
  });
  const double grid_max = *std::max_element(partial.begin(), partial.end());
  const double err = lipschitz * std::ldexp(1.0, -(bits + 1)) * (std::ldexp(1.0, depth) - 1.0);
  return grid_max + err;
}

inline double doubling_sum(const Observable& f, double t, int depth) {
  double s = 0;
  for (int i = 0; i < depth; ++i) {
    s += f.on_angle(t);
    t *= 2;
    if (t >= 1) t -= 1;
  }
  return s;
}

}  // namespace detail

/// Upper bound (1/depth) sup_x f^{(depth)}(x): exact for locally constant f,
/// Lipschitz-corrected over a dyadic grid with the given guard otherwise.
inline double envelope_upper(const Observable& f, int depth, int guard = 4) {
  require(depth >= 1, "depth must be >= 1");
  if (f.is_locally_constant()) {
    return detail::max_window_path(f.base(), f.window(), [&](std::uint64_t c) { return f.on_code(c); }, depth) /
           depth;
  }
  return detail::circle_grid_max(depth, guard, f.lipschitz(),
                                 [&](double t) { return detail::doubling_sum(f, t, depth); }) /
         depth;
}

struct BetaBracket {
  double lower = 0;        ///< best periodic average found
  Necklace lower_witness;  ///< smallest period, then lexicographic, among maximizers
  double upper = 0;        ///< enveloping bound at upper_depth
  int upper_depth = 0;
};

/// Two-sided bracket of the maximal ergodic average beta(f).
inline BetaBracket beta_bracket(const Observable& f, int max_period, int depth, int guard = 4) {
  require(max_period >= 1 && depth >= 1, "max_period and depth must be >= 1");
  BetaBracket b;
  b.lower = -std::numeric_limits<double>::infinity();
  for (const auto& n : enumerate_necklaces(f.base(), max_period)) {
    double v = periodic_average(f, n);
    if (v > b.lower) {
      b.lower = v;
      b.lower_witness = n;
    }
  }
  b.upper = envelope_upper(f, depth, guard);
  b.upper_depth = depth;
  return b;
}

struct AlphaBracket {
  double lower = 0;        ///< enveloping bound at lower_depth
  int lower_depth = 0;
  double upper = 0;        ///< smallest periodic average found
  Necklace upper_witness;
};

/// Bracket of the minimal ergodic average, via alpha(f) = -beta(-f).
inline AlphaBracket alpha_bracket(const Observable& f, int max_period, int depth, int guard = 4) {
  BetaBracket neg = beta_bracket(f.affine(-1.0, 0.0), max_period, depth, guard);
  AlphaBracket a;
  a.lower = -neg.upper;
  a.lower_depth = neg.upper_depth;
  a.upper = -neg.lower;
  a.upper_witness = neg.lower_witness;
  return a;
}

/// g = (1/n) f^{(n)}, cohomologous to f. For locally constant f the window
/// grows by n - 1.
inline Observable smooth(const Observable& f, int n) {
  require(n >= 1, "n must be >= 1");
  if (n == 1) return f;
  if (f.is_circle()) {
    Observable self = f;
    const double lip = f.lipschitz() * (std::ldexp(1.0, n) - 1.0) / n;
    return Observable::circle([self, n](double t) { return detail::doubling_sum(self, t, n) / n; }, lip,
                              f.name() + "_smoothed");
  }
  Observable self = f;
  return Observable::locally_constant(
      f.base(), f.window() + n - 1,
      [self, n](std::span<const Symbol> w) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += self.on_window(w.subspan(static_cast<std::size_t>(i)));
        return s / n;
      },
      f.name() + "_smoothed");
}

// ---------------------------------------------------------------------------
// subactions

/// h over windows of fixed length with the defect max(f + h o T - h) - beta_est.
struct SubactionTable {
  WordTable<double> values;
  int window = 0;
  double beta_est = 0;
  double defect = 0;
  int sweeps = 0;
  double last_shift = 0;  ///< growth of the raw iterate in the final sweep

  double at(std::span<const Symbol> w) const { return values.at(w); }
};

struct SubactionOptions {
  double divergence_tol = 1e-9;
  bool throw_on_divergence = true;
};

/// Max-plus (Lax-Oleinik type) iteration for a subaction of a locally
/// constant f. The raw iterate u_{n+1}(x) = max_{Ty=x} [f(y) + u_n(y)] - beta_est
/// is normalized to min u = 0 each sweep; the reported table is h = max(u) - u,
/// which satisfies f + h o T - h <= beta_est + defect.
/// When the maximizing orbits have period > 1 the iterates cycle instead of
/// converging. L commutes with pointwise max, so the max of the last c raw
/// iterates of a c-periodic tail is a fixed point; u is taken as the max over
/// the last min(iters / 2, 32) raw iterates.
inline SubactionTable subaction_iterate(const Observable& f, double beta_est, int window, int iters,
                                        const SubactionOptions& opt = {}) {
  require(f.is_locally_constant(), "subaction iteration needs a locally constant observable");
  require(window >= f.window(), "window must be at least the observable's window");
  require(iters >= 1, "iters must be >= 1");
  const SymbolicSystem& sys = f.base();
  const int k = sys.alphabet_size();
  const auto codes = admissible_codes(sys, window);
  const std::uint64_t high = static_cast<std::uint64_t>(sys.code_space(window - 1));
  const std::uint64_t drop = static_cast<std::uint64_t>(sys.code_space(window - f.window()));
  const std::size_t span = static_cast<std::size_t>(sys.code_space(window));

  std::vector<double> u(span, 0.0), next(span, 0.0);
  const int tail = std::min(iters / 2, 32);
  std::vector<double> top(span, -std::numeric_limits<double>::infinity());
  double offset = 0;  // raw iterate = u + offset, measured from the tail start
  bool converged = false;
  double shift = 0;
  int sweep = 0;
  for (; sweep < iters; ++sweep) {
    double lo = std::numeric_limits<double>::infinity();
    for (auto x : codes) {
      const std::uint64_t stem = x / static_cast<std::uint64_t>(k);  // x[0..W-1)
      const Symbol x0 = static_cast<Symbol>(x / high);
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < k; ++a) {
        if (!sys.allowed(static_cast<Symbol>(a), x0)) continue;
        const std::uint64_t y = static_cast<std::uint64_t>(a) * high + stem;
        best = std::max(best, f.on_code(y / drop) + u[y]);
      }
      next[x] = best - beta_est;
      lo = std::min(lo, next[x]);
    }
    double change = 0;
    for (auto x : codes) {
      next[x] -= lo;
      change = std::max(change, std::abs(next[x] - u[x]));
    }
    u.swap(next);
    shift = lo;
    if (change == 0.0) {
      ++sweep;
      converged = true;
      break;
    }
    if (sweep >= iters - tail) {
      offset += lo;
      for (auto x : codes) top[x] = std::max(top[x], u[x] + offset);
    }
  }
  if (!converged && tail > 0) {
    double lo = std::numeric_limits<double>::infinity();
    for (auto x : codes) lo = std::min(lo, top[x]);
    for (auto x : codes) u[x] = top[x] - lo;
  }

  SubactionTable t;
  t.window = window;
  t.beta_est = beta_est;
  t.sweeps = sweep;
  t.last_shift = shift;
  t.values = WordTable<double>(sys, window);
  double umax = -std::numeric_limits<double>::infinity();
  for (auto x : codes) umax = std::max(umax, u[x]);
  for (auto x : codes) t.values.set_code(x, umax - u[x]);

  double defect = -std::numeric_limits<double>::infinity();
  for_each_word(sys, window + 1, [&](const Word& z) {
    const std::span<const Symbol> zs(z);
    const double v = f.on_window(zs) + t.values.at(zs.subspan(1)) - t.values.at(zs);
    defect = std::max(defect, v - beta_est);
  });
  t.defect = defect;
  if (opt.throw_on_divergence && shift > opt.divergence_tol && defect > opt.divergence_tol) {
    throw DivergenceError("subaction iteration drifts by " + std::to_string(shift) +
                          " per sweep: beta_est is below beta(f)");
  }
  return t;
}

/// Bisection on the drift sign of the max-plus iteration, starting from a
/// bracket [lo, hi] for beta(f). Returns the table at the final upper end.
inline SubactionTable refine_subaction(const Observable& f, double lo, double hi, int window, int iters,
                                       int steps = 40) {
  require(lo <= hi, "empty bracket");
  SubactionOptions quiet;
  quiet.throw_on_divergence = false;
  for (int s = 0; s < steps && hi - lo > 1e-13; ++s) {
    const double mid = 0.5 * (lo + hi);
    auto t = subaction_iterate(f, mid, window, iters, quiet);
    if (t.last_shift > quiet.divergence_tol)
      lo = mid;
    else
      hi = mid;
  }
  return subaction_iterate(f, hi, window, iters, quiet);
}

/// Windows of length window+1 on which f + h o T - h >= beta_est - tol. Every
/// maximizing periodic orbit has all of its windows in this set.
inline std::vector<Word> maximizing_set(const Observable& f, const SubactionTable& h, double tol) {
  require(f.is_locally_constant(), "maximizing_set needs a locally constant observable");
  require(h.defect <= tol, "subaction defect " + std::to_string(h.defect) + " exceeds tolerance");
  std::vector<Word> out;
  for_each_word(f.base(), h.window + 1, [&](const Word& z) {
    const std::span<const Symbol> zs(z);
    const double v = f.on_window(zs) + h.at(zs.subspan(1)) - h.at(zs);
    if (v >= h.beta_est - tol) out.push_back(z);
  });
  return out;
}

}  // namespace ergopt
