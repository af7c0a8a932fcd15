#include <gtest/gtest.h>

#include <cmath>

#include "chainmi/error.hpp"
#include "chainmi/learning.hpp"
#include "generators.hpp"

using namespace chainmi;
using chainmi::testing::Gen;

namespace {

LearningProblem erm_problem(Matrix loss, std::vector<double> probs, std::size_t n) {
  LearningProblem p;
  p.example_probs = std::move(probs);
  p.loss = std::move(loss);
  p.sample_size = n;
  p.kernel = erm_kernel(p.loss);
  return p;
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return Errc::InvalidArgument;
}

}  // namespace

TEST(Adapter, SampleBlindKernelCarriesNoInformation) {
  LearningProblem p;
  p.example_probs = {0.3, 0.7};
  p.loss = {{0, 1}, {1, 0}, {0.5, 0.5}};
  p.sample_size = 3;
  p.kernel = constant_kernel({0.2, 0.5, 0.3});
  const auto r = learning_adapter(p, 4, 0, 1);
  for (double v : r.mi_series.values) EXPECT_NEAR(v, 0.0, 1e-15);
  EXPECT_NEAR(r.bound_a.bound_value, 0.0, 1e-15);
  EXPECT_NEAR(r.gen, 0.0, 1e-15);
  EXPECT_TRUE(r.enumerated);
}

TEST(Adapter, ErmOnTwoExamplesIsBoundedByChainedBound) {
  const auto p = erm_problem({{0, 1}, {1, 0}}, {0.5, 0.5}, 2);
  const auto r = learning_adapter(p, 4, 0, 1);
  EXPECT_TRUE(r.enumerated);
  // Independent enumeration: S in {00, 01, 10, 11}, ERM ties to hypothesis 0.
  double gen = 0.0;
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      const double l0 = (p.loss[0][a] + p.loss[0][b]) / 2.0;
      const double l1 = (p.loss[1][a] + p.loss[1][b]) / 2.0;
      const std::size_t w = l1 < l0 ? 1 : 0;
      gen += 0.25 * (0.5 - (w == 0 ? l0 : l1));
    }
  }
  EXPECT_NEAR(r.gen, gen, 1e-15);
  EXPECT_GE(r.bound_a.bound_value, r.gen);
  EXPECT_GT(r.gen, 0.0);
  EXPECT_NEAR(r.bound_a.terms_sum() + r.bound_a.tail_estimate, r.bound_a.bound_value, 1e-12);
}

TEST(Adapter, IdenticalLossesAreDegenerate) {
  const auto p = erm_problem({{0.2, 0.4}, {0.2, 0.4}, {0.2, 0.4}}, {0.5, 0.5}, 2);
  EXPECT_EQ(code_of([&] { base_scale_index(gen_metric(p)); }), Errc::DegenerateSpace);
  const auto r = learning_adapter(p, 3, 0, 1);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.bound_a.bound_value, 0.0);
  EXPECT_NEAR(r.gen, 0.0, 1e-15);
}

TEST(Adapter, AbsoluteFormNeedsAZeroLossHypothesis) {
  const auto with_zero = erm_problem({{0, 0}, {1, 0}, {0, 1}}, {0.4, 0.6}, 3);
  const auto a = learning_adapter(with_zero, 4, 0, 1);
  ASSERT_TRUE(a.bound_b.has_value());
  EXPECT_GE(a.bound_b->bound_value, a.gen_abs);
  EXPECT_EQ(a.bound_b->formula_id, "chained-b");

  const auto without = erm_problem({{0.1, 0}, {1, 0}, {0, 1}}, {0.4, 0.6}, 3);
  const auto b = learning_adapter(without, 4, 0, 1);
  EXPECT_FALSE(b.bound_b.has_value());
  EXPECT_FALSE(b.bound_b_skipped_reason.empty());
}

TEST(Adapter, ExactGenMatchesMonteCarlo) {
  const auto p = erm_problem({{0, 1}, {1, 0}, {0.4, 0.3}, {0.9, 0.2}}, {0.35, 0.65}, 4);
  const auto r = learning_adapter(p, 4, 0, 1);
  const auto mc = learning_gen_mc(p, 200000, 12);
  EXPECT_NEAR(r.gen, mc.estimate, 3.0 * mc.std_error);
  EXPECT_LE(r.gen, r.bound_a.bound_value);
}

TEST(Adapter, FallsBackToMonteCarloAboveCap) {
  const auto p = erm_problem({{0, 1}, {1, 0}, {0.5, 0.2}}, {0.5, 0.5}, 6);
  const auto exact = learning_adapter(p, 4, 0, 1);
  const auto approx = learning_adapter(p, 4, 50000, 3, 1e-9, 10);
  EXPECT_TRUE(approx.enumeration_cap_exceeded);
  EXPECT_FALSE(approx.enumerated);
  EXPECT_NEAR(approx.gen, exact.gen, 4.0 * approx.gen_std_error);
  EXPECT_NEAR(approx.bound_a.bound_value, exact.bound_a.bound_value, 0.05 * exact.bound_a.bound_value);
}

TEST(Adapter, InformationIncreasesWithResolutionAndStaysBelowTotal) {
  Gen g(41);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t h = g.index(2, 4);
    Matrix loss(h, std::vector<double>(2));
    for (auto& row : loss) {
      for (double& v : row) v = g.uniform();
    }
    LearningProblem p;
    p.example_probs = g.simplex(2);
    p.loss = loss;
    p.sample_size = g.index(1, 4);
    p.kernel = gibbs_kernel(loss, g.uniform(0, 5));
    const auto r = learning_adapter(p, 3, 0, 1);
    if (r.degenerate) continue;
    for (std::size_t i = 1; i < r.mi_series.values.size(); ++i) {
      EXPECT_LE(r.mi_series.values[i - 1], r.mi_series.values[i] + 1e-12);
    }
    EXPECT_LE(r.mi_series.values.back(), r.mi_total + 1e-12);
    EXPECT_LE(r.gen, r.bound_a.bound_value);
  }
}

TEST(GenProcess, IncrementsSatisfyHoeffdingEnvelope) {
  Gen g(42);
  for (int rep = 0; rep < 30; ++rep) {
    Matrix loss(3, std::vector<double>(3));
    for (auto& row : loss) {
      for (double& v : row) v = g.uniform();
    }
    LearningProblem p;
    p.example_probs = g.simplex(3);
    p.loss = loss;
    p.sample_size = g.index(1, 5);
    p.kernel = erm_kernel(loss);
    const auto d = gen_metric(p);
    for (double lambda : {-8.0, -2.0, -0.5, 0.5, 1.0, 3.0, 10.0}) {
      const double envelope = 0.5 * lambda * lambda * d(0, 1) * d(0, 1);
      EXPECT_LE(gen_increment_log_mgf(p, 0, 1, lambda), envelope + 1e-12) << lambda;
    }
  }
}

TEST(Kernels, TableGibbsAndValidation) {
  // n = 2, |Z| = 2: rows for samples 00, 01, 10, 11.
  const auto k = table_kernel({{1, 0}, {0.5, 0.5}, {0.25, 0.75}, {0, 1}}, 2, 2);
  const std::vector<std::size_t> s10{1, 0};
  EXPECT_EQ(k(s10), (std::vector<double>{0.25, 0.75}));
  EXPECT_EQ(code_of([] { table_kernel({{1, 0}}, 2, 2); }), Errc::KernelInvalid);

  const auto gibbs = gibbs_kernel({{0, 1}, {1, 0}}, 0.0);
  const std::vector<std::size_t> s{0, 0, 1};
  EXPECT_EQ(gibbs(s), (std::vector<double>{0.5, 0.5}));

  LearningProblem p;
  p.example_probs = {0.5, 0.5};
  p.loss = {{0, 1}, {1, 0}};
  p.sample_size = 1;
  EXPECT_EQ(code_of([&] { p.validate(); }), Errc::KernelInvalid);
  p.kernel = constant_kernel({0.7, 0.7});
  EXPECT_EQ(code_of([&] { learning_adapter(p, 3, 0, 1); }), Errc::KernelInvalid);
  p.example_probs = {0.5, 0.6};
  EXPECT_EQ(code_of([&] { p.validate(); }), Errc::NotNormalized);
}
