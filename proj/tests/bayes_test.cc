// Copyright 2026 The subwordbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "subwordbench/bayes.h"
#include "subwordbench/error.h"

namespace subwordbench::stats {
namespace {

SamplerConfig Quick(std::uint64_t seed) {
  SamplerConfig s;
  s.chains = 4;
  s.warmup = 500;
  s.draws = 500;
  s.seed = seed;
  return s;
}

ScoreTable Synthetic(const std::vector<double>& eta, const std::vector<double>& tau,
                     const std::vector<double>& eps, int seeds, std::uint64_t seed,
                     double shift = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0, 1);
  ScoreTable table;
  for (std::size_t l = 0; l < eta.size(); ++l) {
    for (std::size_t m = 0; m < tau.size(); ++m) {
      for (int s = 0; s < seeds; ++s) {
        table.Add({"t" + std::to_string(l), "m" + std::to_string(m), s, Metric::kBleu,
                   eta[l] + tau[m] + eps[l] * normal(rng) + shift});
      }
    }
  }
  return table;
}

const std::vector<double> kEta = {1.0, 4.0, 8.0, 2.5};
const std::vector<double> kTau = {0.3, -0.2, 0.0};
const std::vector<double> kEps = {0.2, 0.5, 0.3, 0.1};

TEST(BayesTest, DeterministicAndThreadIndependent) {
  const auto table = Synthetic(kEta, kTau, kEps, 5, 1);
  auto config = Quick(7);
  const auto a = SampleBayesLinear(table, Metric::kBleu, PriorConfig{}, config);
  const auto b = SampleBayesLinear(table, Metric::kBleu, PriorConfig{}, config);
  config.parallel_chains = false;
  const auto c = SampleBayesLinear(table, Metric::kBleu, PriorConfig{}, config);
  EXPECT_EQ(a.eta_draws, b.eta_draws);
  EXPECT_EQ(a.eta_draws, c.eta_draws);
  EXPECT_EQ(a.eps_draws, c.eps_draws);
}

TEST(BayesTest, RecoversParameters) {
  const auto table = Synthetic(kEta, kTau, kEps, 5, 2);
  const auto fit = FitBayesLinear(table, Metric::kBleu, PriorConfig{}, Quick(3));
  ASSERT_EQ(fit.eta.size(), 4u);
  ASSERT_EQ(fit.tau.size(), 3u);
  for (std::size_t l = 0; l < kEta.size(); ++l) {
    EXPECT_NEAR(fit.eta[l].mean + fit.tau[0].mean, kEta[l] + kTau[0], 3 * fit.eta[l].sd + 0.3);
  }
  const auto diffs = PairwiseTau(fit, "m0");
  EXPECT_NEAR(diffs[1].mean, kTau[1] - kTau[0], 3 * diffs[1].sd + 0.05);
  EXPECT_NEAR(diffs[2].mean, kTau[2] - kTau[0], 3 * diffs[2].sd + 0.05);
  for (const auto& draws : fit.eps_draws) {
    for (double e : draws) ASSERT_GT(e, 0.0);
  }
  for (const auto* group : {&fit.eta, &fit.tau, &fit.eps}) {
    for (const auto& p : *group) {
      EXPECT_LT(p.rhat, 1.05) << p.name;
      EXPECT_GT(p.ess, 50.0) << p.name;
    }
  }
}

TEST(BayesTest, ShiftMovesEtaOnly) {
  const auto base = Synthetic(kEta, kTau, kEps, 5, 4);
  const auto shifted = Synthetic(kEta, kTau, kEps, 5, 4, 1.5);
  auto priors = PriorConfig{};
  auto shifted_priors = priors;
  shifted_priors.task_mean += 1.5;  // keep the prior centred on the data
  const auto a = FitBayesLinear(base, Metric::kBleu, priors, Quick(5));
  const auto b = FitBayesLinear(shifted, Metric::kBleu, shifted_priors, Quick(5));
  for (std::size_t l = 0; l < kEta.size(); ++l) {
    const double mcse = a.eta[l].sd / std::sqrt(a.eta[l].ess) + b.eta[l].sd / std::sqrt(b.eta[l].ess);
    EXPECT_NEAR(b.eta[l].mean - a.eta[l].mean, 1.5, 3 * mcse + 0.05);
  }
  const auto da = PairwiseTau(a, "m0");
  const auto db = PairwiseTau(b, "m0");
  for (std::size_t m = 1; m < da.size(); ++m) {
    const double mcse = 2 * da[m].sd / std::sqrt(a.tau[m].ess);
    EXPECT_NEAR(da[m].mean, db[m].mean, 3 * mcse + 0.02);
  }
}

TEST(BayesTest, PairwiseBaselineSelfIsZero) {
  const auto fit = SampleBayesLinear(Synthetic(kEta, kTau, kEps, 3, 5), Metric::kBleu,
                                     PriorConfig{}, Quick(1));
  const auto diffs = PairwiseTau(fit, "m1");
  EXPECT_EQ(diffs[1].mean, 0.0);
  EXPECT_EQ(diffs[1].sd, 0.0);
  EXPECT_THROW(PairwiseTau(fit, "Subword-NMT"), std::invalid_argument);
}

TEST(BayesTest, EmptyCellAndNonConvergence) {
  ScoreTable table = Synthetic(kEta, kTau, kEps, 3, 6);
  table.Add({"t9", "m0", 0, Metric::kBleu, 1.0});
  EXPECT_THROW(SampleBayesLinear(table, Metric::kBleu, PriorConfig{}, Quick(1)),
               std::invalid_argument);
  auto strict = Quick(1);
  strict.max_rhat = 0.5;
  EXPECT_THROW(FitBayesLinear(Synthetic(kEta, kTau, kEps, 3, 6), Metric::kBleu, PriorConfig{},
                              strict),
               ConvergenceError);
}

TEST(BayesTest, PriorsPerMetric) {
  const auto bleu = PriorConfig::ForMetric(Metric::kBleu);
  const auto chrf = PriorConfig::ForMetric(Metric::kChrf3);
  EXPECT_EQ(bleu.task_mean, 4.0);
  EXPECT_EQ(bleu.task_sd, 3.0);
  EXPECT_EQ(chrf.task_mean, 15.0);
  EXPECT_EQ(chrf.task_sd, 7.0);
  EXPECT_EQ(chrf.method_sd, 1.0);
  EXPECT_EQ(chrf.noise_scale, 5.0);
}

TEST(DiagnosticsTest, RhatAndEss) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(0, 1);
  std::vector<std::vector<double>> iid(4, std::vector<double>(1000));
  for (auto& c : iid) {
    for (auto& x : c) x = normal(rng);
  }
  EXPECT_NEAR(SplitRhat(iid), 1.0, 0.01);
  EXPECT_GT(EffectiveSampleSize(iid), 3000.0);

  auto stuck = iid;
  for (auto& x : stuck[0]) x += 5.0;
  EXPECT_GT(SplitRhat(stuck), 1.5);

  // AR(1) with coefficient 0.9: ESS near n (1 - 0.9) / (1 + 0.9).
  std::vector<std::vector<double>> ar(4, std::vector<double>(5000));
  for (auto& c : ar) {
    double x = 0;
    for (auto& v : c) v = x = 0.9 * x + normal(rng);
  }
  const double ess = EffectiveSampleSize(ar);
  EXPECT_GT(ess, 20000 * 0.0526 * 0.6);
  EXPECT_LT(ess, 20000 * 0.0526 * 1.6);
}

}  // namespace
}  // namespace subwordbench::stats
