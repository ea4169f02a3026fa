#pragma once

// Seeded randomized property suites. Each property reports its worst case
// over all samples; a run is reproducible from (seed, cases).

#include <random>

#include "birkhoff.hpp"
#include "cocycle.hpp"

namespace ergopt {

struct PropertyResult {
  std::string suite;
  std::string name;
  int cases = 0;
  /// slack properties pass when worst >= -tolerance, error properties when
  /// worst <= tolerance
  bool is_slack = true;
  double worst = 0;
  double tolerance = 0;
  bool pass = true;
};

namespace detail {

/// Normal entries, rejected while |det| < 1e-6.
inline Matrix random_matrix(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = n(rng);
    if (std::abs(g.determinant()) >= 1e-6) return g;
  }
}

/// g g^t for a random g, kept in factored form.
inline SpdPoint random_spd(std::mt19937_64& rng, int d) { return SpdPoint::from_factor(random_matrix(rng, d)); }

/// The product a b with determinant tracking.
inline ScaledMatrix tracked(const Matrix& a, const Matrix& b) { return ScaledMatrix::from(a) * ScaledMatrix::from(b); }

inline double max_abs_diff(const ChamberVector& a, const ChamberVector& b) {
  return (a.values() - b.values()).cwiseAbs().maxCoeff();
}

class PropertyRun {
 public:
  PropertyRun(std::string suite, std::string name, bool is_slack, double tol)
      : r_{std::move(suite), std::move(name), 0, is_slack, is_slack ? 1e300 : 0.0, tol, true} {}

  void record(double v) {
    ++r_.cases;
    if (std::isnan(v)) {
      r_.worst = std::numeric_limits<double>::quiet_NaN();
      nan_ = true;
    } else if (!nan_) {
      r_.worst = r_.is_slack ? std::min(r_.worst, v) : std::max(r_.worst, v);
    }
  }

  PropertyResult finish() {
    if (r_.cases == 0) r_.worst = 0;
    r_.pass = !nan_ && (r_.is_slack ? r_.worst >= -r_.tolerance : r_.worst <= r_.tolerance);
    return r_;
  }

 private:
  PropertyResult r_;
  bool nan_ = false;
};

}  // namespace detail

/// Matrix-geometry properties, `cases` samples in each dimension 2 and 3.
inline std::vector<PropertyResult> matgeo_properties(std::uint64_t seed, int cases = 1000) {
  using detail::PropertyRun;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double tol = kMajorizationTol;

  PropertyRun subadd("matgeo", "cartan_subadditive", true, tol);
  PropertyRun jor("matgeo", "jordan_below_cartan", true, tol);
  PropertyRun gram("matgeo", "cartan_is_half_jordan_of_gram", false, tol);
  PropertyRun cyc("matgeo", "jordan_conjugation_invariant", false, tol);
  PropertyRun base("matgeo", "vdist_from_base_point", false, tol);
  PropertyRun inv("matgeo", "vdist_invariant", false, tol);
  PropertyRun zero("matgeo", "vdist_zero_on_diagonal", false, tol);
  PropertyRun sym("matgeo", "vdist_reverse_is_opposition", false, tol);
  PropertyRun lit("matgeo", "vdist_matches_cartan_form", false, tol);
  PropertyRun tri("matgeo", "vdist_triangle", true, tol);
  PropertyRun geo("matgeo", "geodesic_linear_in_parameter", false, 1e-8);
  PropertyRun bus("matgeo", "midpoint_contraction", true, tol);

  for (int d : {2, 3}) {
    for (int c = 0; c < cases; ++c) {
      const Matrix g = detail::random_matrix(rng, d);
      const Matrix h = detail::random_matrix(rng, d);
      const SpdPoint p = detail::random_spd(rng, d);
      const SpdPoint q = detail::random_spd(rng, d);
      const SpdPoint r = detail::random_spd(rng, d);
      const SpdPoint o = SpdPoint::identity(d);

      subadd.record(majorization_slack((cartan(g) + cartan(h)).values(), cartan(g * h).values()));
      jor.record(majorization_slack(cartan(g).values(), jordan(g).values()));
      gram.record(detail::max_abs_diff(cartan(g).scaled(2.0), detail::tracked(g, g.transpose()).jordan()));
      cyc.record(detail::max_abs_diff(jordan(g * h), jordan(h * g)));

      const ScaledMatrix& qb = q.factor();
      base.record(detail::max_abs_diff(vdist(o, q), (qb * ScaledMatrix::from(qb.value().transpose())).cartan()));
      inv.record(detail::max_abs_diff(vdist(act(g, p), act(g, q)), vdist(p, q)));
      zero.record(vdist(p, p).values().cwiseAbs().maxCoeff());
      sym.record(detail::max_abs_diff(vdist(q, p), opposition(vdist(p, q))));
      lit.record(detail::max_abs_diff(vdist(p, q), vdist_via_cartan(p, q)));
      tri.record(majorization_slack((vdist(p, q) + vdist(q, r)).values(), vdist(p, r).values()));

      double t = unit(rng), s = unit(rng);
      if (t > s) std::swap(t, s);
      geo.record(
          detail::max_abs_diff(vdist(geodesic(p, q, t), geodesic(p, q, s)), vdist(p, q).scaled(s - t)));
      bus.record(majorization_slack(vdist(p, q).scaled(0.5).values(),
                                    vdist(midpoint(r, p), midpoint(r, q)).values()));
    }
  }
  std::vector<PropertyResult> out;
  for (auto* run : {&subadd, &jor, &gram, &cyc, &base, &inv, &zero, &sym, &lit, &tri, &geo, &bus})
    out.push_back(run->finish());
  return out;
}

/// Products of a random one-step cocycle on the full 2-shift.
inline std::vector<PropertyResult> cocycle_properties(std::uint64_t seed, int cases = 200) {
  using detail::PropertyRun;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(1, 12);
  PropertyRun sub("cocycle", "product_cartan_subadditive", true, kMajorizationTol);
  PropertyRun rot("cocycle", "period_jordan_rotation_invariant", false, 1e-8);
  PropertyRun bracket("cocycle", "jsr_bracket_ordered", true, 1e-12);
  const auto sys = SymbolicSystem::full_shift(2);
  for (int c = 0; c < cases; ++c) {
    const int d = 2 + c % 2;
    const Cocycle F = Cocycle::one_step({detail::random_matrix(rng, d), detail::random_matrix(rng, d)}, sys);
    const Word u = random_admissible_word(sys, len(rng), rng);
    const Word v = random_admissible_word(sys, len(rng), rng);
    Word uv = v;
    uv.insert(uv.end(), u.begin(), u.end());
    // the product over uv (u read after v) is P(u) P(v)
    sub.record(majorization_slack((product(F, u).cartan() + product(F, v).cartan()).values(),
                                  product(F, uv).cartan().values()));
    Word w = u;
    std::rotate(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(w.size() / 2), w.end());
    rot.record(detail::max_abs_diff(product(F, u).jordan(), product(F, w).jordan()) /
               std::max(1.0, static_cast<double>(u.size())));
    if (c % 20 == 0) {
      const auto b = jsr_bracket(F, 6);
      bracket.record(b.upper - b.lower);
    }
  }
  return {sub.finish(), rot.finish(), bracket.finish()};
}

/// Random locally constant observables on the full 2-shift.
inline std::vector<PropertyResult> birkhoff_properties(std::uint64_t seed, int cases = 100) {
  using detail::PropertyRun;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  PropertyRun order("birkhoff", "beta_bracket_ordered", true, 1e-12);
  PropertyRun alpha("birkhoff", "alpha_below_beta", true, 1e-12);
  PropertyRun shift("birkhoff", "coboundary_invariant", false, 1e-9);
  const auto sys = SymbolicSystem::full_shift(2);
  for (int c = 0; c < cases; ++c) {
    std::vector<double> vals(4), g(2);
    for (auto& v : vals) v = n(rng);
    for (auto& v : g) v = n(rng);
    auto f = Observable::locally_constant(sys, 2, [&](std::span<const Symbol> w) { return vals[w[0] * 2 + w[1]]; });
    // f + g o sigma - g has the same periodic averages
    auto fg = Observable::locally_constant(
        sys, 2, [&](std::span<const Symbol> w) { return vals[w[0] * 2 + w[1]] + g[w[1]] - g[w[0]]; });
    const auto b = beta_bracket(f, 6, 8);
    const auto a = alpha_bracket(f, 6, 8);
    order.record(b.upper - b.lower);
    alpha.record(b.lower - a.upper);
    shift.record(std::abs(beta_bracket(fg, 6, 8).lower - b.lower));
  }
  return {order.finish(), alpha.finish(), shift.finish()};
}

inline std::vector<PropertyResult> run_properties(std::uint64_t seed, int cases = 1000) {
  auto out = matgeo_properties(seed, cases);
  for (auto& r : cocycle_properties(seed + 1, std::max(1, cases / 5))) out.push_back(r);
  for (auto& r : birkhoff_properties(seed + 2, std::max(1, cases / 10))) out.push_back(r);
  return out;
}

}  // namespace ergopt
