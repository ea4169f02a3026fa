#include <gtest/gtest.h>

#include <ergopt/adapt.hpp>
#include <numbers>

#include "fixtures.hpp"

using namespace ergopt;
using fixtures::diag2;
using fixtures::mat2;

namespace {

const double kLog2 = std::numbers::ln2;

void expect_vec(const ChamberVector& got, std::vector<double> want, double tol) {
  ASSERT_EQ(got.dim(), static_cast<int>(want.size()));
  for (int i = 0; i < got.dim(); ++i) EXPECT_NEAR(got[i], want[static_cast<std::size_t>(i)], tol) << "coordinate " << i;
}

int oba_length(const Cocycle& F, const AdaptedConjugation& r) { return std::max(r.G.window(), r.N + F.window() - 1); }

}  // namespace

TEST(MetricLengths, OneStepAndWindowed) {
  EXPECT_EQ(metric_lengths(3, 1), (std::vector<int>{0, 4, 6, 7}));
  EXPECT_EQ(metric_lengths(0, 1), (std::vector<int>{0}));
  // window 3: L_{j+1} = m + max(L_j, 2)
  EXPECT_EQ(metric_lengths(2, 3), (std::vector<int>{0, 4, 5}));
}

TEST(MidpointRecursion, IdentityGivesBasePoint) {
  const auto t = midpoint_recursion(Cocycle::identity(2), 3);
  EXPECT_EQ(t.N, 8);
  for (auto c : t.phi().codes()) EXPECT_LT((t.phi().at_code(c).matrix() - Matrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(MidpointRecursion, DiagonalOneLevel) {
  const auto t = midpoint_recursion(Cocycle::one_step({diag2(2, 0.5)}), 1);
  ASSERT_EQ(t.window(), 1);
  EXPECT_LT((t.phi().at(Word{0}).matrix() - diag2(0.5, 2)).norm(), 1e-14);
}

TEST(MidpointRecursion, SingleMatrixTableIsConstant) {
  const Matrix a = mat2(1.2, 0.7, -0.3, 0.9);
  const auto t = midpoint_recursion(Cocycle::one_step({a}), 2);
  // only one admissible window per level
  EXPECT_EQ(t.phi().size(), 1u);
}

TEST(MidpointRecursion, LevelsAreMidpointsOfPulledBackTables) {
  const auto F = fixtures::random_pair(3);
  const auto t = midpoint_recursion(F, 3);
  for (int j = 0; j < 3; ++j) {
    const int m = 1 << (3 - j - 1);
    const auto& lo = t.level(j).psi;
    const auto& lo_f = t.level(j).factor;
    const auto& up = t.level(j + 1).psi;
    for (const auto& w : words_of_length(F.base(), up.length())) {
      const std::span<const Symbol> ws(w);
      const Matrix fm = product(F, ws.first(static_cast<std::size_t>(m))).value();
      const SpdPoint p = SpdPoint::from_factor(ScaledMatrix::from(fm.inverse()) * lo_f.at(ws.subspan(static_cast<std::size_t>(m))));
      const SpdPoint& q = lo.at(ws);
      const SpdPoint& x = up.at(ws);
      // x is the midpoint: equidistant from both ends at half their distance
      const ChamberVector half = vdist(p, q).scaled(0.5);
      expect_vec(vdist(p, x), half.to_std(), 1e-8);
      expect_vec(vdist(x, q), half.to_std(), 1e-8);
    }
  }
}

TEST(MidpointRecursion, BudgetRefusesHugeTables) {
  EXPECT_THROW(midpoint_recursion(fixtures::random_pair(1), 21), InvalidArgument);
  ASSERT_EQ(setenv("ERGOPT_BUDGET", "50", 1), 0);
  EXPECT_THROW(midpoint_recursion(fixtures::random_pair(1), 4), BudgetError);
  unsetenv("ERGOPT_BUDGET");
}

TEST(Conjugated, IdentityCocycle) {
  const auto r = adapt(Cocycle::identity(2), 3);
  for (const auto& w : r.windows) EXPECT_LT((r.G.at(w).value() - Matrix::Identity(2, 2)).norm(), 1e-14);
  for (const auto& s : r.sigma1_G) expect_vec(s, {0, 0}, 1e-14);
}

TEST(Conjugated, DiagonalSingleMatrix) {
  for (int k : {1, 2, 4}) {
    const auto r = adapt(Cocycle::one_step({diag2(2, 0.5)}), k);
    for (const auto& s : r.sigma1_G) expect_vec(s, {kLog2, -kLog2}, 1e-13);
  }
}

TEST(Conjugated, ShearIsEqualized) {
  const auto r = adapt(Cocycle::one_step({mat2(1, 1, 0, 1)}), 3);
  double top = -1e300;
  for (const auto& s : r.sigma1_G) top = std::max(top, s[0]);
  EXPECT_LT(top, std::log(std::numbers::phi));
}

TEST(Conjugated, IdentityOfProof) {
  // delta(phi(Tx), F(x) * phi(x)) = delta(o, G(x) * o) = 2 sigma(G(x))
  const auto F = fixtures::random_pair(7);
  const auto r = adapt(F, 3);
  for (const auto& w : r.windows) {
    const std::span<const Symbol> ws(w);
    const ChamberVector lhs = vdist(r.metric.phi().at(ws.subspan(1)), act(F.at(ws), r.metric.phi().at(ws)));
    const ChamberVector rhs = vdist(SpdPoint::identity(2), act(r.G.at(ws), SpdPoint::identity(2)));
    expect_vec(lhs, rhs.to_std(), 1e-9);
    expect_vec(rhs, r.G.at(ws).cartan().scaled(2.0).to_std(), 1e-9);
  }
}

TEST(Conjugated, DeterminantConservedAlongPeriodicOrbits) {
  // det G(x) = det F(x) * (det phi(x) / det phi(Tx))^{1/2}: the metric factor
  // telescopes around every periodic orbit
  const auto F = fixtures::random_pair(7);
  const auto r = adapt(F, 3);
  for (const auto& n : enumerate_necklaces(F.base(), 6)) {
    double g = 0, f = 0;
    for (int i = 0; i < n.period(); ++i) {
      const Word u = n.unroll(r.G.window(), i);
      g += r.G.at(u).cartan().sum();
      f += F.at(u).log_abs_det();
    }
    EXPECT_NEAR(g, f, 1e-10) << n.str();
  }
}

TEST(Conjugated, JsrLowerBoundsAgree) {
  const auto F = fixtures::random_pair(7);
  const auto r = adapt(F, 2);
  const auto bf = jsr_bracket(F, 8), bg = jsr_bracket(r.G, 8);
  EXPECT_NEAR(bf.lower, bg.lower, 1e-6);
  EXPECT_EQ(bf.witness, bg.witness);
}

TEST(Oba, IdentityAndDiagonalAreTight) {
  {
    const auto F = Cocycle::identity(2);
    const auto r = adapt(F, 2);
    const auto rep = verify_oba(F, r);
    EXPECT_NEAR(rep.worst_slack, 0.0, 1e-14);
    EXPECT_TRUE(rep.pass);
  }
  {
    const auto F = Cocycle::one_step({diag2(2, 0.5)});
    const auto r = adapt(F, 3);
    const auto rep = verify_oba(F, r);
    EXPECT_NEAR(rep.worst_slack, 0.0, 1e-12);
    EXPECT_TRUE(rep.pass);
  }
}

TEST(Oba, RandomNearIdentityCocycle) {
  const auto F = Cocycle::one_step({mat2(1.1, 0.05, -0.1, 0.95), mat2(0.9, -0.2, 0.1, 1.05)});
  const auto r = adapt(F, 3);
  const auto rep = verify_oba(F, r, fixtures::sample_words(F, oba_length(F, r), 100, 1));
  EXPECT_EQ(rep.checked, 100u);
  EXPECT_GE(rep.worst_slack, -1e-8);
  EXPECT_TRUE(rep.pass);
}

TEST(Oba, ShortWordsAreRejected) {
  const auto F = fixtures::random_pair(2);
  const auto r = adapt(F, 2);
  EXPECT_THROW(verify_oba(F, r, {Word{0, 1}}), InvalidArgument);
}

TEST(Telescoping, RandomCocyclesPass) {
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    const auto F = fixtures::random_pair(seed);
    const auto r = adapt(F, 3);
    const auto words = fixtures::sample_words(F, telescoping_word_length(F, r.metric), 60, seed);
    EXPECT_GE(verify_telescoping(F, r.metric, words), -1e-8) << seed;
  }
}

TEST(Inclusion, IdentityPasses) {
  const auto F = Cocycle::identity(2);
  const auto r = adapt(F, 2);
  const auto s = spectrum_approx(F, 2, 4, ThetaSet::full(2), 8);
  EXPECT_TRUE(verify_inclusion(r, s, 0.0).pass);
}

TEST(Inclusion, DiagonalPairAtOuterGap) {
  const auto F = fixtures::diag_pair();
  const auto r = adapt(F, 4);
  const auto s = spectrum_approx(F, 8, 16, ThetaSet::empty(2), 64);
  const auto rep = verify_inclusion(r, s, s.gap);
  EXPECT_TRUE(rep.pass) << rep.achieved_epsilon;
  EXPECT_EQ(rep.violation.size(), s.directions.size());
}

TEST(Inclusion, ShearPairReportsNeededEpsilon) {
  const auto F = fixtures::shear_pair();
  const auto r = adapt(F, 4);
  const auto s = spectrum_approx(F, 8, 16, ThetaSet::full(2), 32);
  const auto rep = verify_inclusion(r, s, std::max(0.0, s.gap));
  EXPECT_TRUE(rep.pass) << rep.achieved_epsilon;
  EXPECT_LE(rep.achieved_epsilon, std::max(0.0, s.gap) + 1e-12);
}

TEST(Inclusion, DimensionMismatchIsAnError) {
  const auto r = adapt(Cocycle::identity(2), 1);
  const auto s = spectrum_approx(Cocycle::identity(3), 2, 2, ThetaSet::full(3), 8);
  EXPECT_THROW(verify_inclusion(r, s, 0.1), InvalidArgument);
}

TEST(OneStep, DiagonalPair) {
  const auto F = fixtures::diag_pair();
  const auto rep = domination_report(F, {4, 8, 12});
  const auto g = one_step_domination_check(adapt(F, 3), rep, 1);
  EXPECT_GE(g.min_gap, 2 * kLog2 - 1e-12);
  EXPECT_TRUE(g.positive);
}

TEST(OneStep, UndominatedIndexIsRejected) {
  const auto F = Cocycle::identity(2);
  const auto rep = domination_report(F, {2, 4});
  EXPECT_THROW(one_step_domination_check(adapt(F, 1), rep, 1), InvalidArgument);
  EXPECT_THROW(one_step_domination_check(adapt(F, 1), rep, 2), InvalidArgument);
}

TEST(Favored, DiagonalOrbitIsExact) {
  const auto F = fixtures::diag_pair();
  const auto r = adapt(F, 2);
  const auto d = favored_measure_diagnostic(F, r, Necklace::parse("01"));
  expect_vec(d.lyapunov, {0.5 * std::log(6.0), -0.5 * std::log(6.0)}, 1e-14);
  expect_vec(d.mean_rhs, d.lyapunov.to_std(), 1e-12);
  EXPECT_NEAR(d.l1_rhs, 0.0, 1e-12);
}

TEST(Determinism, WorkerCountDoesNotChangeTables) {
  const auto F = fixtures::random_pair(7);
  set_worker_count(1);
  const auto a = adapt(F, 4);
  set_worker_count(3);
  const auto b = adapt(F, 4);
  set_worker_count(0);
  ASSERT_EQ(a.sigma1_G.size(), b.sigma1_G.size());
  for (std::size_t i = 0; i < a.sigma1_G.size(); ++i) EXPECT_EQ(a.sigma1_G[i].to_std(), b.sigma1_G[i].to_std());
}
