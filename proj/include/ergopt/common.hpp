#pragma once

// Shared vocabulary for the ergopt headers: symbols and words, the error
// hierarchy, enumeration budgets and a small chunked parallel-for.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace ergopt {

using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;

// ---------------------------------------------------------------------------
// errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An enumeration or table would exceed the configured budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// A point or word does not carry enough context for the request.
class ContextError : public Error {
 public:
  using Error::Error;
};

/// Iterative scheme is drifting (no bounded fixed point).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Singular, indefinite or non-finite numerical input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

// ---------------------------------------------------------------------------
// budgets

namespace detail {
inline double env_budget_or(double fallback) {
  if (const char* s = std::getenv("ERGOPT_BUDGET")) {
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end != s && v > 0) return v;
  }
  return fallback;
}
}  // namespace detail

/// Maximum number of words any single enumeration may visit.
/// ERGOPT_BUDGET overrides the default.
inline double enumeration_budget() { return detail::env_budget_or(double{1 << 26}); }

/// Maximum number of entries summed over all levels of a word-indexed table.
inline double table_budget() { return detail::env_budget_or(1e7); }

inline void check_budget(double count, double budget, std::string_view what) {
  if (!(count <= budget)) {
    throw BudgetError(std::string(what) + ": " + std::to_string(count) +
                      " items exceeds budget " + std::to_string(budget) +
                      " (set ERGOPT_BUDGET to raise it)");
  }
}

// ---------------------------------------------------------------------------
// words

inline std::string word_to_string(std::span<const Symbol> w, int alphabet_size = 2) {
  std::string out;
  if (alphabet_size <= 10) {
    for (Symbol s : w) out.push_back(static_cast<char>('0' + s));
  } else {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) out.push_back('.');
      out += std::to_string(w[i]);
    }
  }
  return out;
}

/// Parses "0110" (one digit per symbol) or "3.10.2" (dot separated).
inline Word parse_word(std::string_view s) {
  Word w;
  if (s.find('.') != std::string_view::npos) {
    std::size_t pos = 0;
    while (pos <= s.size()) {
      auto next = s.find('.', pos);
      if (next == std::string_view::npos) next = s.size();
      auto tok = s.substr(pos, next - pos);
      require(!tok.empty(), "empty symbol in word");
      int v = 0;
      for (char c : tok) {
        require(c >= '0' && c <= '9', "bad symbol in word");
        v = v * 10 + (c - '0');
      }
      require(v < 256, "symbol out of range");
      w.push_back(static_cast<Symbol>(v));
      pos = next + 1;
    }
  } else {
    for (char c : s) {
      require(c >= '0' && c <= '9', "bad symbol in word '" + std::string(s) + "'");
      w.push_back(static_cast<Symbol>(c - '0'));
    }
  }
  return w;
}

/// Base-k code with the first symbol most significant, so numeric order of
/// codes equals lexicographic order of equal-length words.
inline std::uint64_t word_code(std::span<const Symbol> w, int k) {
  std::uint64_t c = 0;
  for (Symbol s : w) c = c * static_cast<std::uint64_t>(k) + s;
  return c;
}

inline Word word_from_code(std::uint64_t code, int k, int length) {
  Word w(static_cast<std::size_t>(length));
  for (int i = length - 1; i >= 0; --i) {
    w[static_cast<std::size_t>(i)] = static_cast<Symbol>(code % static_cast<std::uint64_t>(k));
    code /= static_cast<std::uint64_t>(k);
  }
  return w;
}

inline double ipow(double base, int e) {
  double r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// ---------------------------------------------------------------------------
// parallelism

namespace detail {
inline std::atomic<unsigned>& worker_slot() {
  static std::atomic<unsigned> n{0};
  return n;
}
}  // namespace detail

/// Number of worker threads used by the heavy loops; 1 means sequential.
inline unsigned worker_count() {
  unsigned n = detail::worker_slot().load();
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

inline void set_worker_count(unsigned n) { detail::worker_slot().store(n); }

/// Runs body(begin, end) over [0, n) split into contiguous chunks. Chunks write
/// disjoint outputs, so results do not depend on the worker count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  unsigned workers = worker_count();
  if (workers <= 1 || n < 2048) {
    body(0, n);
    return;
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    std::size_t b = t * chunk, e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, b, e] {
      try {
        body(b, e);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ergopt
