#include <gtest/gtest.h>

#include "boolsearch/errors.hpp"
#include "boolsearch/validity.hpp"

namespace bs = boolsearch;
using bs::FormatViolation;
using bs::OutputMode;
using bs::ValidityReason;

TEST(Format, PlainAnswerBlock) {
  const auto v = bs::check_format("<answer>asthma[tiab] AND child*[tiab]</answer>", OutputMode::no_reasoning);
  EXPECT_TRUE(v.ok);
  EXPECT_EQ(v.extracted_query, "asthma[tiab] AND child*[tiab]");
}

TEST(Format, ThinkThenAnswer) {
  const auto v = bs::check_format("<think>look at MeSH</think>\n<answer> a[ti] OR b[ti] </answer>\n",
                                  OutputMode::reasoning);
  EXPECT_TRUE(v.ok);
  EXPECT_EQ(v.extracted_query, "a[ti] OR b[ti]");
}

TEST(Format, ReasoningModeRequiresThinkBlock) {
  const auto v = bs::check_format("<answer>a</answer>", OutputMode::reasoning);
  EXPECT_FALSE(v.ok);
  EXPECT_TRUE(v.has(FormatViolation::missing_think_tags));
}

TEST(Format, ThinkBlockInNoReasoningModeIsOutsideContent) {
  const auto v = bs::check_format("<think>x</think><answer>a</answer>", OutputMode::no_reasoning);
  EXPECT_TRUE(v.has(FormatViolation::content_outside_tags));
}

TEST(Format, Violations) {
  EXPECT_TRUE(bs::check_format("asthma", OutputMode::no_reasoning).has(FormatViolation::missing_answer_tags));
  EXPECT_TRUE(bs::check_format("<answer>a</answer><answer>b</answer>", OutputMode::no_reasoning)
                  .has(FormatViolation::multiple_answer_blocks));
  EXPECT_TRUE(bs::check_format("Sure! <answer>a</answer>", OutputMode::no_reasoning)
                  .has(FormatViolation::content_outside_tags));
  EXPECT_TRUE(bs::check_format("<answer>a and b</answer>", OutputMode::no_reasoning)
                  .has(FormatViolation::lowercase_operator));
  EXPECT_TRUE(bs::check_format("<answer>(a Or b)</answer>", OutputMode::no_reasoning)
                  .has(FormatViolation::lowercase_operator));
  EXPECT_TRUE(bs::check_format("<answer>\"chronic pain\"[tiab]</answer>", OutputMode::no_reasoning)
                  .has(FormatViolation::double_quoted_term));
  EXPECT_TRUE(bs::check_format("<answer>  </answer>", OutputMode::no_reasoning)
                  .has(FormatViolation::empty_answer));
}

TEST(Format, UnclosedAnswerIsMissing) {
  const auto v = bs::check_format("<answer>a AND b", OutputMode::no_reasoning);
  EXPECT_TRUE(v.has(FormatViolation::missing_answer_tags));
  EXPECT_FALSE(v.extracted_query.has_value());
}

TEST(Format, WordsContainingOperatorsAreFine) {
  EXPECT_TRUE(bs::check_format("<answer>android[ti] AND organ[ti] AND notch[ti]</answer>",
                               OutputMode::no_reasoning)
                  .ok);
}

TEST(Validity, Reasons) {
  const bs::ExecutionLimits limits{100, 1};
  auto counting = [](std::size_t n) { return [n](const std::string&) { return n; }; };
  EXPECT_EQ(bs::check_validity("a AND", counting(5), limits).reason, ValidityReason::parse_failure);
  EXPECT_EQ(bs::check_validity("a", counting(0), limits).reason, ValidityReason::zero_results);
  EXPECT_EQ(bs::check_validity("a", counting(101), limits).reason, ValidityReason::over_limit);
  const auto ok = bs::check_validity("a", counting(100), limits);
  EXPECT_TRUE(ok.ok);
  EXPECT_EQ(ok.reason, ValidityReason::ok);
  EXPECT_EQ(ok.n_retrieved, 100u);
}

TEST(Validity, ParseFailureSkipsExecution) {
  bool called = false;
  const auto v = bs::check_validity("(a", [&](const std::string&) { called = true; return std::size_t{1}; },
                                    bs::ExecutionLimits{});
  EXPECT_FALSE(called);
  EXPECT_FALSE(v.diagnostics.empty());
}

TEST(Validity, RejectionsMapToReasons) {
  auto rejecting = [](bs::QueryRejected::Reason r) {
    return [r](const std::string&) -> std::size_t { throw bs::QueryRejected(r, "no"); };
  };
  EXPECT_EQ(bs::check_validity("a", rejecting(bs::QueryRejected::Reason::too_broad), {}).reason,
            ValidityReason::over_limit);
  EXPECT_EQ(bs::check_validity("a", rejecting(bs::QueryRejected::Reason::unparseable), {}).reason,
            ValidityReason::parse_failure);
}

TEST(Validity, TransportErrorsPropagate) {
  auto failing = [](const std::string&) -> std::size_t { throw bs::TransportError("down", 503, true); };
  EXPECT_THROW(bs::check_validity("a", failing, {}), bs::TransportError);
}

TEST(Validity, LimitsAreChecked) {
  auto one = [](const std::string&) { return std::size_t{1}; };
  EXPECT_THROW(bs::check_validity("a", one, bs::ExecutionLimits{10, 0}), bs::ContractError);
  EXPECT_THROW(bs::check_validity("a", one, bs::ExecutionLimits{1, 2}), bs::ContractError);
}
