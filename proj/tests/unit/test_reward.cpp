#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "boolsearch/errors.hpp"
#include "boolsearch/reward.hpp"
#include "oracles.hpp"
#include "random_inputs.hpp"

namespace bs = boolsearch;
namespace oracle = testing_support::oracle;
using oracle::Real;
using bs::RewardKind;

namespace {

constexpr double kTol = 1e-9;

bs::RetrievalOutcome outcome(double r, double p, std::size_t n = 10) {
  bs::RetrievalOutcome o;
  o.recall = r;
  o.precision = p;
  o.n_retrieved = n;
  return o;
}

bs::FormatVerdict format(bool ok) {
  bs::FormatVerdict f;
  f.ok = ok;
  if (!ok) f.violations.push_back(bs::FormatViolation::missing_answer_tags);
  return f;
}

bs::ValidityVerdict validity(bool ok, bs::ValidityReason reason = bs::ValidityReason::ok) {
  bs::ValidityVerdict v;
  v.ok = ok;
  v.reason = ok ? bs::ValidityReason::ok : reason;
  return v;
}

}  // namespace

TEST(PrecisionTerm, Anchors) {
  const bs::RewardConfig cfg;
  EXPECT_EQ(bs::precision_term(0.4, 0.0, cfg), 0.0);
  EXPECT_NEAR(bs::precision_term(0.4, 1.0, cfg), 4.0, kTol);
  const double expected = oracle::precision_term(Real("0.5"), Real("0.1"), 10, 100, 1).convert_to<double>();
  EXPECT_NEAR(expected, 2.5978, 1e-4);
  EXPECT_NEAR(expected, 2.5978685324122033, 1e-15);
  EXPECT_NEAR(bs::precision_term(0.5, 0.1, cfg), expected, kTol);
}

TEST(RetrievalReward, Anchors) {
  const bs::RewardConfig cfg;
  EXPECT_EQ(bs::retrieval_reward(outcome(0, 0, 0), cfg), -20.0);
  EXPECT_EQ(bs::retrieval_reward(outcome(0, 0, 50), cfg), -5.0);
  EXPECT_NEAR(bs::retrieval_reward(outcome(1, 1), cfg), 20.0, kTol);
  EXPECT_NEAR(bs::retrieval_reward(outcome(0.3, 0), cfg), 3.0, kTol);
}

TEST(RetrievalReward, RangeChecked) {
  EXPECT_THROW(bs::retrieval_reward(outcome(1.5, 0.5), {}), bs::ContractError);
  EXPECT_THROW(bs::retrieval_reward(outcome(0.5, -0.1), {}), bs::ContractError);
}

TEST(TotalReward, Breakdowns) {
  const bs::RewardConfig cfg;
  auto b = bs::total_reward(format(true), validity(true), outcome(1, 1), cfg);
  EXPECT_NEAR(b.r_format, 10, kTol);
  EXPECT_NEAR(b.r_validity, 10, kTol);
  EXPECT_NEAR(b.r_retrieval, 20, kTol);
  EXPECT_NEAR(b.r_total, 40, kTol);

  b = bs::total_reward(format(false), validity(false, bs::ValidityReason::parse_failure), std::nullopt, cfg);
  EXPECT_EQ(b.r_format, -10);
  EXPECT_EQ(b.r_validity, -10);
  EXPECT_EQ(b.r_retrieval, -20);
  EXPECT_EQ(b.r_total, -40);

  b = bs::total_reward(format(true), validity(true), outcome(0, 0, 30), cfg);
  EXPECT_EQ(b.r_retrieval, -5);
  EXPECT_EQ(b.r_total, 15);
}

TEST(TotalReward, OutcomeMustMatchValidity) {
  EXPECT_THROW(bs::total_reward(format(true), validity(true), std::nullopt, {}), bs::ContractError);
  EXPECT_THROW(bs::total_reward(format(true), validity(false), outcome(1, 1), {}), bs::ContractError);
}

TEST(TotalReward, DecompositionIsExact) {
  testing_support::Rng rng(12);
  bs::RewardConfig cfg;
  for (int i = 0; i < 2000; ++i) {
    const bool valid = rng.chance(0.7);
    const std::optional<bs::RetrievalOutcome> o =
        valid ? std::optional(outcome(rng.unit(), rng.unit(), rng.below(5))) : std::nullopt;
    const auto b = bs::total_reward(format(rng.chance(0.5)), validity(valid), o, cfg);
    EXPECT_EQ(b.r_total, b.r_format + b.r_validity + b.r_retrieval);
  }
}

TEST(TotalReward, InvalidRetrievalRewardIsConfigurable) {
  bs::RewardConfig cfg;
  cfg.invalid_retrieval_reward = -7.5;
  const auto b = bs::total_reward(format(true), validity(false), std::nullopt, cfg);
  EXPECT_EQ(b.r_retrieval, -7.5);
}

TEST(Variants, Examples) {
  const bs::RewardConfig cfg;
  EXPECT_NEAR(bs::variant_reward({RewardKind::no_precision}, outcome(0.7, 0.3), cfg), 7.0, kTol);
  EXPECT_NEAR(bs::variant_reward({RewardKind::no_recall_dependency}, outcome(0.2, 0.9), cfg), 11.0, kTol);
  EXPECT_NEAR(bs::variant_reward({RewardKind::f3_based, 3.0}, outcome(1, 1), cfg), 10.0, kTol);
  EXPECT_EQ(bs::variant_reward({RewardKind::f3_based}, outcome(0, 0, 0), cfg), -20.0);
  EXPECT_EQ(bs::variant_reward({RewardKind::no_log_scaling}, outcome(0, 0, 3), cfg), -5.0);
  EXPECT_THROW(bs::variant_reward({RewardKind::f3_based, 0.0}, outcome(1, 1), cfg), bs::ContractError);
}

TEST(Variants, MatchOracle) {
  testing_support::Rng rng(13);
  const double alphas[] = {0.5, 1.0, 2.0};
  for (int i = 0; i < 1000; ++i) {
    bs::RewardConfig cfg;
    cfg.M = 1 + 19 * rng.unit();
    cfg.s = 1 + 999 * rng.unit();
    cfg.alpha = alphas[rng.below(3)];
    const double r = 0.001 + 0.999 * rng.unit(), p = 0.001 + 0.999 * rng.unit();
    const auto o = outcome(r, p);
    const Real R(r), P(p), M(cfg.M), S(cfg.s), A(cfg.alpha);
    EXPECT_NEAR(bs::variant_reward({RewardKind::full}, o, cfg), oracle::full(R, P, M, S, A).convert_to<double>(), kTol);
    EXPECT_NEAR(bs::variant_reward({RewardKind::no_log_scaling}, o, cfg),
                oracle::no_log_scaling(R, P, M, A).convert_to<double>(), kTol);
    EXPECT_NEAR(bs::variant_reward({RewardKind::no_recall_dependency}, o, cfg),
                oracle::no_recall_dependency(R, P, M).convert_to<double>(), kTol);
    EXPECT_NEAR(bs::variant_reward({RewardKind::no_precision}, o, cfg), oracle::no_precision(R, M).convert_to<double>(),
                kTol);
    EXPECT_NEAR(bs::variant_reward({RewardKind::f3_based, 3.0}, o, cfg),
                oracle::f3_based(R, P, M, Real(3)).convert_to<double>(), kTol);
  }
}

TEST(Surface, Properties) {
  testing_support::Rng rng(14);
  const double alphas[] = {0.5, 1.0, 2.0};
  for (int i = 0; i < 10000; ++i) {
    bs::RewardConfig cfg;
    cfg.alpha = alphas[rng.below(3)];
    double r1 = rng.unit(), r2 = rng.unit(), p1 = rng.unit(), p2 = rng.unit();
    if (r1 > r2) std::swap(r1, r2);
    if (p1 > p2) std::swap(p1, p2);
    EXPECT_LE(bs::recall_weighted_f(r1, p1, cfg), bs::recall_weighted_f(r2, p1, cfg) + kTol);
    EXPECT_LE(bs::recall_weighted_f(r1, p1, cfg), bs::recall_weighted_f(r1, p2, cfg) + kTol);
    EXPECT_NEAR(bs::recall_weighted_f(r1, 0.0, cfg), cfg.M * r1, kTol);
    const double term = bs::precision_term(r1, p1, cfg);
    EXPECT_GE(term, -kTol);
    EXPECT_LE(term, cfg.M * std::pow(r1, cfg.alpha) + kTol);
    EXPECT_LE(bs::recall_weighted_f(r2, p2, cfg), 2 * cfg.M + kTol);
  }
}

TEST(Surface, HigherAlphaSuppressesPrecision) {
  testing_support::Rng rng(15);
  for (int i = 0; i < 2000; ++i) {
    bs::RewardConfig lo, hi;
    lo.alpha = 0.5 + rng.unit();
    hi.alpha = lo.alpha + 0.01 + rng.unit();
    const double r = 0.001 + 0.998 * rng.unit(), p = rng.unit();
    EXPECT_GE(bs::precision_term(r, p, lo), bs::precision_term(r, p, hi) - kTol);
  }
}

TEST(Surface, PenaltiesDominate) {
  const bs::RewardConfig cfg;
  testing_support::Rng rng(16);
  EXPECT_LT(cfg.empty_penalty, cfg.zero_relevant_penalty);
  for (int i = 0; i < 2000; ++i) {
    const double r = rng.unit(), p = rng.unit();
    if (r == 0 && p == 0) continue;
    EXPECT_GT(bs::retrieval_reward(outcome(r, p), cfg), cfg.zero_relevant_penalty);
  }
}

TEST(GroupAdvantages, Examples) {
  EXPECT_EQ(bs::group_advantages({10, 10, 10, 10}), (std::vector<double>{0, 0, 0, 0}));
  const auto a = bs::group_advantages({0, 20});
  EXPECT_NEAR(a[0], -1, kTol);
  EXPECT_NEAR(a[1], 1, kTol);
  EXPECT_THROW(bs::group_advantages({1}), bs::ContractError);
  EXPECT_THROW(bs::group_advantages({}), bs::ContractError);
}

TEST(GroupAdvantages, ZeroMeanUnitVariance) {
  testing_support::Rng rng(17);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> rewards;
    for (std::size_t k = rng.between(2, 16); k > 0; --k) rewards.push_back(-40 + 80 * rng.unit());
    const auto adv = bs::group_advantages(rewards);
    Real mean, sd;
    oracle::mean_std(rewards, mean, sd);
    ASSERT_GT(sd, Real(1e-8));
    double sum = 0, sq = 0;
    for (std::size_t k = 0; k < adv.size(); ++k) {
      EXPECT_NEAR(adv[k], ((Real(rewards[k]) - mean) / sd).convert_to<double>(), kTol);
      sum += adv[k];
      sq += adv[k] * adv[k];
    }
    EXPECT_NEAR(sum, 0.0, kTol);
    EXPECT_NEAR(sq / static_cast<double>(adv.size()), 1.0, kTol);
  }
}

TEST(Config, ValidationRules) {
  bs::RewardConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.M = 0;
  EXPECT_THROW(cfg.validate(), bs::ContractError);
  cfg = {};
  cfg.s = -1;
  EXPECT_THROW(cfg.validate(), bs::ContractError);
  cfg = {};
  cfg.alpha = -0.5;
  EXPECT_THROW(cfg.validate(), bs::ContractError);
  cfg = {};
  cfg.empty_penalty = -1;
  EXPECT_THROW(cfg.validate(), bs::ContractError);
  cfg = {};
  cfg.zero_relevant_penalty = 1;
  cfg.empty_penalty = 0;
  EXPECT_THROW(cfg.validate(), bs::ContractError);
}

TEST(Config, ReadsKeyValueFile) {
  std::istringstream in("# sweep\nM = 5\n s=50 # smoothing\n\nalpha = 2\nvariant = f3_based\nbeta = 2\n");
  const auto cfg = bs::read_reward_config(in);
  EXPECT_EQ(cfg.M, 5);
  EXPECT_EQ(cfg.s, 50);
  EXPECT_EQ(cfg.alpha, 2);
  EXPECT_EQ(cfg.variant.kind, RewardKind::f3_based);
  EXPECT_EQ(cfg.variant.beta, 2);
  EXPECT_EQ(cfg.empty_penalty, -20);
}

TEST(Config, ErrorsCarryLineNumbers) {
  std::istringstream missing_eq("M = 5\nalpha 2\n");
  try {
    bs::read_reward_config(missing_eq);
    FAIL();
  } catch (const bs::DataError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream unknown("\n\ngamma = 1\n");
  try {
    bs::read_reward_config(unknown);
    FAIL();
  } catch (const bs::DataError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream bad_value("M = ten\n");
  EXPECT_THROW(bs::read_reward_config(bad_value), bs::DataError);
  std::istringstream bad_order("empty_penalty = -1\n");
  EXPECT_THROW(bs::read_reward_config(bad_order), bs::DataError);
}

TEST(Config, BaseValuesAreOverriddenByFile) {
  bs::RewardConfig base;
  base.M = 7;
  base.alpha = 0.5;
  std::istringstream in("alpha = 2\n");
  const auto cfg = bs::read_reward_config(in, base);
  EXPECT_EQ(cfg.M, 7);
  EXPECT_EQ(cfg.alpha, 2);
}

TEST(Config, WriteReadRoundTrip) {
  bs::RewardConfig cfg;
  cfg.M = 3.25;
  cfg.s = 0.1;
  cfg.invalid_retrieval_reward = -12;
  cfg.limits.max_docs = 500;
  cfg.variant = {RewardKind::no_log_scaling, 2.0};
  std::stringstream buffer;
  bs::write_reward_config(buffer, cfg);
  const auto back = bs::read_reward_config(buffer);
  EXPECT_EQ(back.to_map(), cfg.to_map());
  EXPECT_EQ(back.s, 0.1);
}

TEST(Kinds, NamesRoundTrip) {
  for (auto k : {RewardKind::full, RewardKind::no_log_scaling, RewardKind::no_recall_dependency,
                 RewardKind::no_precision, RewardKind::f3_based}) {
    EXPECT_EQ(bs::reward_kind_from_string(bs::to_string(k)), k);
  }
  EXPECT_THROW(bs::reward_kind_from_string("bogus"), bs::ContractError);
}
