#include <gtest/gtest.h>

#include "fpdtl/error.hpp"
#include "fpdtl/harness.hpp"
#include "fpdtl/similarity.hpp"
#include "oracles.hpp"

using namespace fpdtl;

namespace {

const StateActionSpace kSpace(3, 4);

}  // namespace

TEST(Similarity, CurrentIdealValues) {
  const auto ideal = harness::make_current_ideal(kSpace);
  EXPECT_NEAR(similarity(ideal, {2, 1, 0}), 0.249995, 1e-15);
  EXPECT_NEAR(similarity(ideal, {0, 3, 1}), 2.5e-6, 1e-18);
  EXPECT_NEAR(sigma_max(ideal), 0.249995, 1e-15);
  EXPECT_NEAR(normalized_similarity(ideal, {1, 0, 0}), 1.0, 1e-15);
  EXPECT_NEAR(normalized_similarity(ideal, {1, 0, 2}), 2.5e-6 / 0.249995, 1e-18);
  EXPECT_NEAR(normalized_similarity(ideal, {1, 0, 2}), 1.00002e-5, 1e-10);
}

TEST(Similarity, UniformAndDegenerateIdeals) {
  const IdealClosedLoopModel uniform(TransitionModel(kSpace, std::vector<double>(36, 1.0 / 3)),
                                     DecisionRule::uniform(kSpace));
  EXPECT_NEAR(similarity(uniform, {0, 0, 0}), 1.0 / 12, 1e-15);
  EXPECT_NEAR(normalized_similarity(uniform, {2, 3, 1}), 1.0, 1e-15);

  // A single tuple with all the mass.
  const StateActionSpace sp(2, 2);
  const IdealClosedLoopModel point(TransitionModel(sp, {0, 1, 0, 1, 0, 1, 0, 1}),
                                   DecisionRule(sp, {1, 0, 1, 0}));
  EXPECT_EQ(similarity(point, {0, 0, 1}), 1.0);
  EXPECT_EQ(normalized_similarity(point, {0, 0, 1}), 1.0);
  EXPECT_EQ(normalized_similarity(point, {0, 1, 1}), 0.0);
}

TEST(Similarity, AllZeroScoresThrow) {
  const JointScores zero(kSpace, std::vector<double>(36, 0.0));
  EXPECT_THROW(sigma_max(zero), AllZeroIdealError);
  EXPECT_THROW(normalized_similarity(zero, {0, 0, 0}), AllZeroIdealError);
  EXPECT_THROW(JointScores(kSpace, std::vector<double>(35, 1.0)), ShapeError);
  std::vector<double> neg(36, 1.0);
  neg[4] = -0.5;
  EXPECT_THROW(JointScores(kSpace, neg), NegativeEntryError);
}

TEST(Similarity, NormalizedRangeAndAttainedMaximum) {
  Pcg32 g(12);
  for (int trial = 0; trial < 50; ++trial) {
    const StateActionSpace sp(1 + g.uniform_index(4), 1 + g.uniform_index(4));
    const IdealClosedLoopModel ideal(oracle::random_transition(sp, g), oracle::random_rule(sp, g));
    double best = 0.0;
    for (std::size_t s1 = 0; s1 < sp.n_states; ++s1)
      for (std::size_t a = 0; a < sp.n_actions; ++a)
        for (std::size_t s = 0; s < sp.n_states; ++s) {
          const double v = normalized_similarity(ideal, {s1, a, s});
          ASSERT_GE(v, 0.0);
          ASSERT_LE(v, 1.0);
          best = std::max(best, v);
        }
    EXPECT_EQ(best, 1.0);
  }
}

TEST(Similarity, RatioInvarianceOnRawScores) {
  Pcg32 g(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> scores(36);
    for (double& v : scores) v = g.uniform01() * 7.0;
    const double c = 0.01 + 100.0 * g.uniform01();
    std::vector<double> scaled = scores;
    for (double& v : scaled) v *= c;
    const JointScores a(kSpace, scores), b(kSpace, scaled);
    const Triple x{g.uniform_index(3), g.uniform_index(4), g.uniform_index(3)};
    EXPECT_NEAR(normalized_similarity(a, x), normalized_similarity(b, x), 1e-14);
  }
}

TEST(Similarity, MultiplicativeInRuleFactor) {
  Pcg32 g(14);
  const auto p = oracle::random_transition(kSpace, g);
  std::vector<double> rule(12);
  for (double& v : rule) v = 0.1 + g.uniform01();
  // Unnormalized joint: rule weight times transition probability.
  auto joint = [&](const std::vector<double>& r) {
    std::vector<double> out(36);
    for (std::size_t s1 = 0; s1 < 3; ++s1)
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t s = 0; s < 3; ++s) out[(s1 * 4 + a) * 3 + s] = r[s1 * 4 + a] * p(s1, a, s);
    return JointScores(kSpace, out);
  };
  auto doubled = rule;
  doubled[1 * 4 + 2] *= 2.0;
  const auto before = joint(rule), after = joint(doubled);
  for (std::size_t s = 0; s < 3; ++s) {
    EXPECT_NEAR(after({1, 2, s}), 2.0 * before({1, 2, s}), 1e-15);
    EXPECT_EQ(after({1, 1, s}), before({1, 1, s}));
  }

  // Same check through a normalized rule: doubling then renormalizing scales sigma by 2/(1+w).
  auto normalize = [](std::vector<double> r) {
    for (std::size_t s1 = 0; s1 < 3; ++s1) {
      double sum = 0.0;
      for (std::size_t a = 0; a < 4; ++a) sum += r[s1 * 4 + a];
      for (std::size_t a = 0; a < 4; ++a) r[s1 * 4 + a] /= sum;
    }
    return r;
  };
  const DecisionRule base(kSpace, normalize(rule));
  auto base_doubled = normalize(rule);
  base_doubled[1 * 4 + 2] *= 2.0;
  const DecisionRule twice(kSpace, normalize(base_doubled));
  const IdealClosedLoopModel i1(p, base), i2(p, twice);
  const double w = base(1, 2);
  for (std::size_t s = 0; s < 3; ++s) {
    EXPECT_NEAR(similarity(i2, {1, 2, s}), similarity(i1, {1, 2, s}) * 2.0 / (1.0 + w), 1e-14);
  }
}

TEST(WeighRecord, OneWeightPerTripleAndModesAgree) {
  const auto ideal = harness::make_current_ideal(kSpace);
  Pcg32 g(15);
  const auto system = harness::generate_system(kSpace, g);
  const auto record = harness::generate_past_data(system, harness::make_past_ideal(harness::PastIdeal::P3, kSpace),
                                                  10, 60, g);
  const auto norm = weigh_record(ideal, record);
  const auto raw = weigh_record(ideal, record, SimilarityMode::Raw);
  ASSERT_EQ(norm.omega.size(), 60u);
  ASSERT_EQ(raw.omega.size(), 60u);
  ASSERT_TRUE(norm.sigma_max.has_value());
  EXPECT_FALSE(raw.sigma_max.has_value());
  for (std::size_t i = 0; i < 60; ++i) {
    EXPECT_NEAR(raw.omega[i], norm.omega[i] * *norm.sigma_max, 1e-15);
    EXPECT_EQ(norm.omega[i], normalized_similarity(ideal, record.triple(i + 1)));
  }

  const ClosedLoopRecord stay(kSpace, 0, std::vector<Step>(7, Step{2, 0}));
  const auto same = weigh_record(ideal, stay);
  for (const double w : same.omega) EXPECT_EQ(w, same.omega.front());

  EXPECT_THROW(weigh_record(ideal, ClosedLoopRecord(kSpace, 0)), Error);
}
