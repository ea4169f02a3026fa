#pragma once

// Symbolic base dynamics: full shifts and subshifts of finite type, admissible
// word enumeration, necklaces (periodic orbits), Sturmian words, and the
// doubling-map coordinates of binary sequences.

#include <compare>
#include <numeric>
#include <random>
#include <utility>

#include "common.hpp"

namespace ergopt {

class SymbolicSystem {
 public:
  SymbolicSystem() : SymbolicSystem(2) {}

  /// Full shift on k symbols.
  explicit SymbolicSystem(int k, double metric_theta = 0.5)
      : k_(k), theta_(metric_theta), allowed_(static_cast<std::size_t>(k) * k, true) {
    require(k >= 1 && k <= 255, "alphabet size must be in [1, 255]");
    require(metric_theta > 0 && metric_theta < 1, "metric theta must lie in (0,1)");
  }

  static SymbolicSystem full_shift(int k) { return SymbolicSystem(k); }

  /// Subshift of finite type given by forbidden two-letter transitions.
  static SymbolicSystem with_forbidden(int k, const std::vector<std::pair<int, int>>& forbidden,
                                       double metric_theta = 0.5) {
    SymbolicSystem s(k, metric_theta);
    for (auto [a, b] : forbidden) {
      require(a >= 0 && a < k && b >= 0 && b < k, "forbidden transition out of range");
      s.allowed_[static_cast<std::size_t>(a) * k + b] = false;
    }
    for (int a = 0; a < k; ++a) {
      bool out = false, in = false;
      for (int b = 0; b < k; ++b) {
        out = out || s.allowed(static_cast<Symbol>(a), static_cast<Symbol>(b));
        in = in || s.allowed(static_cast<Symbol>(b), static_cast<Symbol>(a));
      }
      require(out && in, "symbol " + std::to_string(a) + " is a dead state");
    }
    return s;
  }

  int alphabet_size() const { return k_; }
  double metric_theta() const { return theta_; }

  bool allowed(Symbol a, Symbol b) const { return allowed_[static_cast<std::size_t>(a) * k_ + b]; }

  bool is_full_shift() const {
    return std::all_of(allowed_.begin(), allowed_.end(), [](bool b) { return b; });
  }

  std::vector<std::pair<int, int>> forbidden() const {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < k_; ++a)
      for (int b = 0; b < k_; ++b)
        if (!allowed(static_cast<Symbol>(a), static_cast<Symbol>(b))) out.emplace_back(a, b);
    return out;
  }

  bool valid_symbols(std::span<const Symbol> w) const {
    return std::all_of(w.begin(), w.end(), [&](Symbol s) { return s < k_; });
  }

  bool admissible(std::span<const Symbol> w) const {
    if (!valid_symbols(w)) return false;
    for (std::size_t i = 1; i < w.size(); ++i)
      if (!allowed(w[i - 1], w[i])) return false;
    return true;
  }

  /// Admissible as a periodic word: also the wrap-around transition.
  bool cyclically_admissible(std::span<const Symbol> w) const {
    return !w.empty() && admissible(w) && allowed(w.back(), w.front());
  }

  /// Number of admissible words of length n (as a double; may be huge).
  double count_words(int n) const {
    if (n <= 0) return 1;
    std::vector<double> c(static_cast<std::size_t>(k_), 1.0), next(c.size());
    for (int step = 1; step < n; ++step) {
      std::fill(next.begin(), next.end(), 0.0);
      for (int a = 0; a < k_; ++a)
        for (int b = 0; b < k_; ++b)
          if (allowed(static_cast<Symbol>(a), static_cast<Symbol>(b))) next[b] += c[a];
      c.swap(next);
    }
    return std::accumulate(c.begin(), c.end(), 0.0);
  }

  /// Size of the dense code space k^n used by word-indexed tables.
  double code_space(int n) const { return ipow(k_, n); }

  friend bool operator==(const SymbolicSystem&, const SymbolicSystem&) = default;

 private:
  int k_;
  double theta_;
  std::vector<bool> allowed_;
};

/// Calls fn(word) for every admissible word of length n, in lexicographic order.
template <class Fn>
void for_each_word(const SymbolicSystem& sys, int n, Fn&& fn) {
  require(n >= 0, "word length must be nonnegative");
  check_budget(sys.count_words(n), enumeration_budget(), "admissible words of length " + std::to_string(n));
  Word w;
  if (n == 0) {
    fn(static_cast<const Word&>(w));
    return;
  }
  const int k = sys.alphabet_size();
  w.assign(static_cast<std::size_t>(n), 0);
  // odometer with backtracking over allowed transitions
  std::vector<int> next_sym(static_cast<std::size_t>(n), 0);
  int depth = 0;
  while (depth >= 0) {
    auto& cand = next_sym[static_cast<std::size_t>(depth)];
    bool placed = false;
    while (cand < k) {
      Symbol s = static_cast<Symbol>(cand++);
      if (depth == 0 || sys.allowed(w[static_cast<std::size_t>(depth - 1)], s)) {
        w[static_cast<std::size_t>(depth)] = s;
        placed = true;
        break;
      }
    }
    if (!placed) {
      cand = 0;
      --depth;
      continue;
    }
    if (depth == n - 1) {
      fn(static_cast<const Word&>(w));
    } else {
      ++depth;
    }
  }
}

inline std::vector<Word> words_of_length(const SymbolicSystem& sys, int n) {
  std::vector<Word> out;
  for_each_word(sys, n, [&](const Word& w) { out.push_back(w); });
  return out;
}

/// Uniform-ish random admissible word (random walk on the transition graph).
template <class Rng>
Word random_admissible_word(const SymbolicSystem& sys, int n, Rng& rng) {
  Word w;
  w.reserve(static_cast<std::size_t>(n));
  std::vector<Symbol> opts;
  for (int i = 0; i < n; ++i) {
    opts.clear();
    for (int s = 0; s < sys.alphabet_size(); ++s)
      if (i == 0 || sys.allowed(w.back(), static_cast<Symbol>(s))) opts.push_back(static_cast<Symbol>(s));
    std::uniform_int_distribution<std::size_t> pick(0, opts.size() - 1);
    w.push_back(opts[pick(rng)]);
  }
  return w;
}

// ---------------------------------------------------------------------------
// necklaces

/// True iff w is strictly smaller than each of its proper rotations
/// (i.e. primitive and lexicographically minimal: a Lyndon word).
inline bool is_lyndon(std::span<const Symbol> w) {
  const std::size_t n = w.size();
  if (n == 0) return false;
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      Symbol a = w[i], b = w[(i + r) % n];
      if (a < b) break;
      if (a > b) return false;
      if (i == n - 1) return false;  // equal rotation: not primitive
    }
  }
  return true;
}

/// Primitive periodic word in canonical (minimal rotation) form; encodes a
/// periodic orbit and its uniform empirical measure.
class Necklace {
 public:
  Necklace() = default;

  /// Accepts only words already in canonical form.
  static Necklace from_word(Word w) {
    require(is_lyndon(w), "word '" + word_to_string(w, 256) + "' is not a primitive minimal rotation");
    Necklace n;
    n.word_ = std::move(w);
    return n;
  }

  /// Rotates w to its minimal rotation; w must be primitive.
  static Necklace canonical(const Word& w) {
    require(!w.empty(), "empty necklace");
    Word best = w;
    for (std::size_t r = 1; r < w.size(); ++r) {
      Word rot(w.begin() + static_cast<std::ptrdiff_t>(r), w.end());
      rot.insert(rot.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(r));
      if (rot < best) best = rot;
    }
    return from_word(std::move(best));
  }

  static Necklace parse(std::string_view s) { return from_word(parse_word(s)); }

  const Word& word() const { return word_; }
  int period() const { return static_cast<int>(word_.size()); }
  std::string str(int alphabet_size = 2) const { return word_to_string(word_, alphabet_size); }

  /// Rotation starting at position j.
  Word rotation(int j) const {
    Word r(word_.size());
    for (std::size_t i = 0; i < word_.size(); ++i) r[i] = word_[(i + static_cast<std::size_t>(j)) % word_.size()];
    return r;
  }

  /// First n symbols of the periodic sequence w w w ... starting at offset j.
  Word unroll(int n, int j = 0) const {
    Word r(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = word_[static_cast<std::size_t>(i + j) % word_.size()];
    return r;
  }

  /// Order used for deterministic tie-breaking: period, then lexicographic.
  friend std::strong_ordering operator<=>(const Necklace& a, const Necklace& b) {
    if (auto c = a.period() <=> b.period(); c != 0) return c;
    return a.word_ <=> b.word_;
  }
  friend bool operator==(const Necklace&, const Necklace&) = default;

 private:
  Word word_;
};

/// All primitive, cyclically admissible necklaces of period <= max_period,
/// ordered by (period, lexicographic).
inline std::vector<Necklace> enumerate_necklaces(const SymbolicSystem& sys, int max_period) {
  require(max_period >= 1, "max_period must be >= 1");
  const int k = sys.alphabet_size();
  double work = 0;
  for (int q = 1; q <= max_period; ++q) work += ipow(k, q);
  check_budget(work, enumeration_budget(), "necklace enumeration up to period " + std::to_string(max_period));

  std::vector<std::vector<Necklace>> by_period(static_cast<std::size_t>(max_period) + 1);
  // Duval's generator: Lyndon words of length <= max_period in lex order
  std::vector<int> w{-1};
  while (!w.empty()) {
    ++w.back();
    Word word(w.begin(), w.end());
    if (sys.cyclically_admissible(word)) {
      by_period[word.size()].push_back(Necklace::from_word(std::move(word)));
    }
    const std::size_t m = w.size();
    while (w.size() < static_cast<std::size_t>(max_period)) w.push_back(w[w.size() - m]);
    while (!w.empty() && w.back() == k - 1) w.pop_back();
  }
  std::vector<Necklace> out;
  for (auto& v : by_period)
    for (auto& n : v) out.push_back(std::move(n));
  return out;
}

/// Christoffel word of slope p/q: s_j = floor((j+1)p/q) - floor(jp/q), canonical form.
inline Necklace sturmian_word(int p, int q) {
  require(q >= 1 && p >= 0 && p <= q, "need 0 <= p <= q, q >= 1");
  require(std::gcd(p, q) == 1, "invalid rotation number " + std::to_string(p) + "/" + std::to_string(q) +
                                   ": gcd(p,q) != 1");
  Word w(static_cast<std::size_t>(q));
  for (long j = 0; j < q; ++j) w[static_cast<std::size_t>(j)] = static_cast<Symbol>(((j + 1) * p) / q - (j * p) / q);
  return Necklace::canonical(w);
}

/// Whether a binary necklace is the Sturmian necklace of its own slope.
inline bool is_sturmian(const Necklace& n) {
  const int q = n.period();
  int p = 0;
  for (Symbol s : n.word()) {
    if (s > 1) return false;
    p += s;
  }
  if (std::gcd(p, q) != 1) return false;
  return sturmian_word(p, q) == n;
}

// ---------------------------------------------------------------------------
// circle points for the doubling map

/// Point e^{2 pi i t} on the circle, stored as an exact rational num/den when
/// possible (den <= 2^62), else as a double.
class CirclePoint {
 public:
  CirclePoint() = default;

  static CirclePoint rational(std::uint64_t num, std::uint64_t den) {
    require(den >= 1 && den <= (std::uint64_t{1} << 62), "denominator out of range");
    CirclePoint p;
    p.exact_ = true;
    p.num_ = num % den;
    p.den_ = den;
    return p;
  }

  static CirclePoint approx(double t) {
    require(std::isfinite(t), "non-finite angle");
    CirclePoint p;
    p.exact_ = false;
    p.t_ = t - std::floor(t);
    if (p.t_ >= 1.0) p.t_ = 0.0;
    return p;
  }

  /// Dyadic point 0.w1 w2 ... (binary expansion given by the word).
  static CirclePoint from_binary(std::span<const Symbol> w) {
    if (w.size() <= 62) {
      for (Symbol s : w) require(s <= 1, "binary word expected");
      return rational(word_code(w, 2), std::uint64_t{1} << w.size());
    }
    double t = 0, scale = 0.5;
    for (Symbol s : w) {
      require(s <= 1, "binary word expected");
      t += s * scale;
      scale *= 0.5;
    }
    return approx(t);
  }

  bool exact() const { return exact_; }
  std::uint64_t numerator() const { return num_; }
  std::uint64_t denominator() const { return den_; }

  double angle() const {
    return exact_ ? static_cast<double>(num_) / static_cast<double>(den_) : t_;
  }

  /// Image under the doubling map t -> 2t mod 1.
  CirclePoint doubled() const {
    if (exact_) {
      std::uint64_t n2 = num_ * 2;
      return rational(n2 >= den_ ? n2 - den_ : n2, den_);
    }
    double t = 2 * t_;
    return approx(t >= 1 ? t - 1 : t);
  }

  /// First binary digit of t.
  Symbol digit() const { return exact_ ? static_cast<Symbol>(2 * num_ >= den_) : static_cast<Symbol>(t_ >= 0.5); }

  friend bool operator==(const CirclePoint& a, const CirclePoint& b) {
    if (a.exact_ && b.exact_) return a.num_ == b.num_ && a.den_ == b.den_;
    return a.angle() == b.angle();
  }

 private:
  bool exact_ = true;
  std::uint64_t num_ = 0, den_ = 1;
  double t_ = 0;
};

/// Doubling-map orbit of the periodic binary sequence of a necklace:
/// t_j = (rotation of w starting at j, read in binary) / (2^q - 1).
inline std::vector<CirclePoint> orbit_angles(const Necklace& w) {
  for (Symbol s : w.word()) require(s <= 1, "orbit_angles needs a binary necklace");
  const int q = w.period();
  std::vector<CirclePoint> out;
  out.reserve(static_cast<std::size_t>(q));
  if (q <= 62) {
    const std::uint64_t den = (std::uint64_t{1} << q) - 1;
    for (int j = 0; j < q; ++j) {
      Word r = w.rotation(j);
      out.push_back(CirclePoint::rational(word_code(r, 2), den));
    }
  } else {
    for (int j = 0; j < q; ++j) {
      Word r = w.unroll(1080, j);
      out.push_back(CirclePoint::from_binary(r));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// dense word-indexed tables

/// Table of values indexed by the admissible words of one fixed length,
/// stored densely by word code.
template <class T>
class WordTable {
 public:
  WordTable() = default;
  WordTable(const SymbolicSystem& sys, int length) : sys_(sys), length_(length) {
    require(length >= 0, "negative table window");
    const double size = sys.code_space(length);
    check_budget(size, table_budget(), "word table of length " + std::to_string(length));
    values_.resize(static_cast<std::size_t>(size));
    valid_.assign(values_.size(), 0);
  }

  const SymbolicSystem& system() const { return sys_; }
  int length() const { return length_; }
  std::size_t code_space() const { return values_.size(); }

  std::uint64_t code(std::span<const Symbol> w) const {
    return word_code(w.first(static_cast<std::size_t>(length_)), sys_.alphabet_size());
  }

  bool has(std::uint64_t code) const { return valid_[code] != 0; }
  bool has(std::span<const Symbol> w) const {
    return w.size() >= static_cast<std::size_t>(length_) && valid_[code(w)] != 0;
  }

  /// Looks up the entry for the first `length()` symbols of w.
  const T& at(std::span<const Symbol> w) const {
    if (w.size() < static_cast<std::size_t>(length_))
      throw ContextError("word of length " + std::to_string(w.size()) + " is shorter than table window " +
                         std::to_string(length_));
    auto c = code(w);
    if (!valid_[c]) throw ContextError("no table entry for word " + word_to_string(w.first(length_), sys_.alphabet_size()));
    return values_[c];
  }
  const T& at_code(std::uint64_t c) const { return values_[c]; }

  void set_code(std::uint64_t c, T v) {
    values_[c] = std::move(v);
    valid_[c] = 1;
  }
  void set(std::span<const Symbol> w, T v) { set_code(code(w), std::move(v)); }

  std::size_t size() const { return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), 1)); }

  /// Admissible codes in increasing (lexicographic) order.
  std::vector<std::uint64_t> codes() const {
    std::vector<std::uint64_t> out;
    for (std::size_t c = 0; c < valid_.size(); ++c)
      if (valid_[c]) out.push_back(c);
    return out;
  }

 private:
  SymbolicSystem sys_;
  int length_ = 0;
  std::vector<T> values_;
  std::vector<char> valid_;
};

/// Codes of all admissible words of the given length, ascending.
inline std::vector<std::uint64_t> admissible_codes(const SymbolicSystem& sys, int length) {
  std::vector<std::uint64_t> out;
  for_each_word(sys, length, [&](const Word& w) { out.push_back(word_code(w, sys.alphabet_size())); });
  return out;
}

}  // namespace ergopt
