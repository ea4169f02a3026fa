#pragma once

// Adapted metrics by recursive geodesic midpoints: the tables psi_0..psi_k,
// the conjugated cocycle G = phi(Tx)^{-1/2} F(x) phi(x)^{1/2} and its
// certificates (one-step majorization by the N-step Cartan data, inclusion in
// the outer spectrum, one-step domination).

#include "cocycle.hpp"

namespace ergopt {

struct MetricLevel {
  int level = 0;
  int length = 0;  ///< window length of this level
  /// psi_j = B B^t with the factor B kept in scaled form; products are applied
  /// to factors, so conditioning is never squared.
  WordTable<ScaledMatrix> factor;
  WordTable<SpdPoint> psi;
};

/// All levels psi_0, ..., psi_k; phi = psi_k.
struct MetricTable {
  int k = 0;
  int N = 1;  ///< 2^k
  std::vector<MetricLevel> levels;

  const MetricLevel& level(int j) const { return levels.at(static_cast<std::size_t>(j)); }
  const WordTable<SpdPoint>& phi() const { return levels.back().psi; }
  const WordTable<ScaledMatrix>& phi_factor() const { return levels.back().factor; }
  int window() const { return levels.back().length; }
};

/// Window lengths L_0 = 0, L_{j+1} = m + max(L_j, W - 1) with m = 2^{k-j-1};
/// for one-step cocycles L_j = 2^k - 2^{k-j}.
inline std::vector<int> metric_lengths(int k, int cocycle_window) {
  std::vector<int> L{0};
  for (int j = 0; j < k; ++j) L.push_back((1 << (k - j - 1)) + std::max(L.back(), cocycle_window - 1));
  return L;
}

/// psi_0 = o and psi_{j+1}(x) = mid[(F^{(m)}(x))^{-1} * psi_j(T^m x), psi_j(x)],
/// m = 2^{k-j-1}, each level tabulated over all admissible windows.
inline MetricTable midpoint_recursion(const Cocycle& F, int k) {
  require(k >= 0 && k <= 20, "k must lie in [0, 20]");
  const auto L = metric_lengths(k, F.window());
  double total = 0;
  for (int len : L) total += F.base().code_space(len);
  check_budget(total, table_budget(), "adapted metric tables");

  MetricTable t;
  t.k = k;
  t.N = 1 << k;
  MetricLevel base{0, 0, WordTable<ScaledMatrix>(F.base(), 0), WordTable<SpdPoint>(F.base(), 0)};
  base.factor.set(Word{}, ScaledMatrix::identity(F.dim()));
  base.psi.set(Word{}, SpdPoint::identity(F.dim()));
  t.levels.push_back(std::move(base));

  for (int j = 0; j < k; ++j) {
    const int m = 1 << (k - j - 1);
    const MetricLevel& prev = t.levels.back();
    const int len = L[static_cast<std::size_t>(j + 1)];
    MetricLevel next{j + 1, len, WordTable<ScaledMatrix>(F.base(), len), WordTable<SpdPoint>(F.base(), len)};
    const auto codes = admissible_codes(F.base(), len);
    std::vector<ScaledMatrix> vals(codes.size());
    parallel_for(codes.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const Word w = word_from_code(codes[i], F.alphabet_size(), len);
        const std::span<const Symbol> ws(w);
        const ScaledMatrix fm = product(F, ws.first(static_cast<std::size_t>(m + F.window() - 1)));
        const ScaledMatrix pulled = fm.inverse() * prev.factor.at(ws.subspan(static_cast<std::size_t>(m)));
        vals[i] = factor_midpoint(pulled, prev.factor.at(ws));
      }
    });
    for (std::size_t i = 0; i < codes.size(); ++i) {
      next.psi.set_code(codes[i], SpdPoint::from_factor(vals[i]));
      next.factor.set_code(codes[i], std::move(vals[i]));
    }
    t.levels.push_back(std::move(next));
  }
  return t;
}

struct AdaptedConjugation {
  int k = 0;
  int N = 1;
  MetricTable metric;
  Cocycle G;                           ///< windowed, window = phi window + 1
  std::vector<Word> windows;           ///< windows of G, lexicographic
  std::vector<ChamberVector> sigma1_G; ///< cartan(G(w)) per window
};

/// G(w) = phi(shift w)^{-1/2} F(w) phi(w)^{1/2}, i.e. conjugation by
/// H = phi^{-1/2}, which sends every phi(x) to the base point o.
inline AdaptedConjugation conjugated_cocycle(const Cocycle& F, const MetricTable& metric) {
  require(metric.phi().system() == F.base(), "metric belongs to a different base");
  AdaptedConjugation r;
  r.k = metric.k;
  r.N = metric.N;
  r.metric = metric;
  WordTable<ScaledMatrix> half(F.base(), metric.window());
  for (auto c : metric.phi_factor().codes()) half.set_code(c, factor_sqrt(metric.phi_factor().at_code(c)));
  const int window = std::max(F.window(), metric.window() + 1);
  r.G = Cocycle::windowed_scaled(F.base(), F.dim(), window, [&](std::span<const Symbol> w) {
    return half.at(w.subspan(1)).inverse() * F.at(w) * half.at(w);
  });
  for_each_word(F.base(), r.G.window(), [&](const Word& w) {
    r.windows.push_back(w);
    r.sigma1_G.push_back(r.G.at(w).cartan());
  });
  return r;
}

inline AdaptedConjugation adapt(const Cocycle& F, int k) { return conjugated_cocycle(F, midpoint_recursion(F, k)); }

// ---------------------------------------------------------------------------
// certificates

struct ObaReport {
  double worst_slack = std::numeric_limits<double>::infinity();
  Word worst_word;
  std::size_t checked = 0;
  bool pass = false;  ///< worst_slack >= -1e-8
};

/// For each word u: sigma(G(u)) is majorized by (1/N) sigma(F^{(N)}(u)).
/// Reports the worst prefix-sum slack.
inline ObaReport verify_oba(const Cocycle& F, const AdaptedConjugation& r, const std::vector<Word>& sample) {
  const std::size_t need = static_cast<std::size_t>(std::max(r.G.window(), r.N + F.window() - 1));
  ObaReport rep;
  for (const auto& u : sample) {
    if (u.size() < need)
      throw InvalidArgument("sampled word of length " + std::to_string(u.size()) + " is shorter than " +
                            std::to_string(need));
    const std::span<const Symbol> us(u);
    const ChamberVector lhs = r.G.at(us).cartan();
    const ChamberVector rhs = product(F, us.first(static_cast<std::size_t>(r.N + F.window() - 1))).cartan().scaled(1.0 / r.N);
    const double s = majorization_slack(rhs.values(), lhs.values());
    if (s < rep.worst_slack) {
      rep.worst_slack = s;
      rep.worst_word = u;
    }
    ++rep.checked;
  }
  rep.pass = rep.worst_slack >= -1e-8;
  return rep;
}

/// verify_oba over every window of G.
inline ObaReport verify_oba(const Cocycle& F, const AdaptedConjugation& r) {
  std::vector<Word> all;
  const int len = std::max(r.G.window(), r.N + F.window() - 1);
  for_each_word(F.base(), len, [&](const Word& w) { all.push_back(w); });
  return verify_oba(F, r, all);
}

/// Word length needed by the level-by-level check below.
inline int telescoping_word_length(const Cocycle& F, const MetricTable& t) {
  int need = 0;
  for (int j = 0; j < t.k; ++j) {
    const int m = 1 << (t.k - j - 1);
    need = std::max({need, m + t.level(j + 1).length, 2 * m + t.level(j).length, 2 * m + F.window() - 1});
  }
  return std::max(need, 1);
}

/// Per-level chain: delta(psi_{j+1}(T^m x), F^{(m)}(x) * psi_{j+1}(x)) is
/// majorized by 1/2 delta(psi_j(T^{2m} x), F^{(2m)}(x) * psi_j(x)).
/// Returns the worst slack over levels and sampled words.
inline double verify_telescoping(const Cocycle& F, const MetricTable& t, const std::vector<Word>& sample) {
  const int need = telescoping_word_length(F, t);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& u : sample) {
    require(static_cast<int>(u.size()) >= need, "sampled word too short for the telescoping check");
    const std::span<const Symbol> us(u);
    for (int j = 0; j < t.k; ++j) {
      const int m = 1 << (t.k - j - 1);
      const auto& up = t.level(j + 1).factor;
      const auto& lo = t.level(j).factor;
      const std::size_t w1 = static_cast<std::size_t>(F.window() - 1);
      const ScaledMatrix fm = product(F, us.first(static_cast<std::size_t>(m) + w1));
      const ScaledMatrix f2m = product(F, us.first(static_cast<std::size_t>(2 * m) + w1));
      const ChamberVector lhs = factor_vdist(up.at(us.subspan(static_cast<std::size_t>(m))), fm * up.at(us));
      const ChamberVector rhs =
          factor_vdist(lo.at(us.subspan(static_cast<std::size_t>(2 * m))), f2m * lo.at(us)).scaled(0.5);
      worst = std::min(worst, majorization_slack(rhs.values(), lhs.values()));
    }
  }
  return worst;
}

struct InclusionReport {
  double epsilon = 0;           ///< requested tolerance
  double achieved_epsilon = 0;  ///< smallest epsilon that would pass
  std::vector<double> violation;  ///< per direction: max <c, xi> - outer(c) over sigma1_G
  bool pass = false;
};

/// Checks every point of Sigma_1(G) against the support values `outer`
/// (taken in the given directions), inflated by epsilon.
inline InclusionReport verify_inclusion(const AdaptedConjugation& r, const std::vector<Vector>& directions,
                                        const std::vector<double>& outer, double epsilon) {
  require(directions.size() == outer.size(), "one support value per direction expected");
  InclusionReport rep;
  rep.epsilon = epsilon;
  for (std::size_t q = 0; q < directions.size(); ++q) {
    require(directions[q].size() == r.G.dim(), "direction dimension mismatch");
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& xi : r.sigma1_G) worst = std::max(worst, directions[q].dot(xi.values()) - outer[q]);
    rep.violation.push_back(worst);
    rep.achieved_epsilon = std::max(rep.achieved_epsilon, worst);
  }
  rep.pass = rep.achieved_epsilon <= epsilon + 1e-12;
  return rep;
}

/// Inclusion against the outer Theta-hull envelope of a spectrum approximation.
inline InclusionReport verify_inclusion(const AdaptedConjugation& r, const SpectrumApprox& outer, double epsilon) {
  require(outer.theta.dim() == r.G.dim(), "Theta does not match the cocycle dimension");
  return verify_inclusion(r, outer.directions, outer.outer, epsilon);
}

/// Weaker inclusion in the Weyl-symmetrized outer envelope O.
inline InclusionReport verify_symmetric_inclusion(const AdaptedConjugation& r, const SpectrumApprox& outer,
                                                  double epsilon) {
  return verify_inclusion(r, outer.directions, outer.outer_symmetric, epsilon);
}

struct OneStepGap {
  int index = 1;
  double min_gap = 0;  ///< min over windows of log s_i(G) - log s_{i+1}(G)
  Word worst_window;
  bool positive = false;
};

/// Domination seen at the first iterate of G, for an index the report
/// verdicts dominated.
inline OneStepGap one_step_domination_check(const AdaptedConjugation& r, const DominationReport& report, int index) {
  require(index >= 1 && index < r.G.dim(), "domination index out of range");
  if (!report.dominated(index))
    throw InvalidArgument("index " + std::to_string(index) + " is not verdicted dominated for this cocycle");
  OneStepGap g;
  g.index = index;
  g.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.sigma1_G.size(); ++i) {
    const double gap = r.sigma1_G[i][index - 1] - r.sigma1_G[i][index];
    if (gap < g.min_gap) {
      g.min_gap = gap;
      g.worst_window = r.windows[i];
    }
  }
  g.positive = g.min_gap > 0;
  return g;
}

struct FavoredDiagnostic {
  ChamberVector lyapunov;   ///< Lyapunov vector of the orbit
  ChamberVector mean_rhs;   ///< orbit mean of (1/N) sigma(F^{(N)})
  ChamberVector mean_lhs;   ///< orbit mean of sigma(G)
  double l1_rhs = 0;        ///< orbit mean of |(1/N) sigma(F^{(N)}) - lyapunov|_1
};

/// Compares both sides of the one-step majorization, averaged over the orbit
/// of a periodic point, with its Lyapunov vector.
inline FavoredDiagnostic favored_measure_diagnostic(const Cocycle& F, const AdaptedConjugation& r,
                                                    const Necklace& orbit) {
  FavoredDiagnostic d;
  d.lyapunov = lyap_vector_periodic(F, orbit);
  const int q = orbit.period();
  const int len = std::max(r.G.window(), r.N + F.window() - 1);
  Vector rhs = Vector::Zero(F.dim()), lhs = Vector::Zero(F.dim());
  for (int i = 0; i < q; ++i) {
    const Word u = orbit.unroll(len, i);
    const ChamberVector a = product(F, std::span<const Symbol>(u).first(static_cast<std::size_t>(r.N + F.window() - 1)))
                                .cartan()
                                .scaled(1.0 / r.N);
    rhs += a.values();
    lhs += r.G.at(u).cartan().values();
    d.l1_rhs += (a.values() - d.lyapunov.values()).cwiseAbs().sum();
  }
  d.mean_rhs = ChamberVector::sorted(rhs / q);
  d.mean_lhs = ChamberVector::sorted(lhs / q);
  d.l1_rhs /= q;
  return d;
}

}  // namespace ergopt
