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

#ifndef SUBWORDBENCH_BAYES_H_
#define SUBWORDBENCH_BAYES_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subwordbench/stats.h"

namespace subwordbench::stats {

// Priors of score ~ Normal(eta[task] + tau[method], eps[task]):
//   eta ~ Normal(task_mean, task_sd), tau ~ Normal(method_mean, method_sd),
//   eps ~ HalfCauchy(noise_scale).
struct PriorConfig {
  double task_mean = 4.0;
  double task_sd = 3.0;
  double method_mean = 0.0;
  double method_sd = 1.0;
  double noise_scale = 5.0;

  // BLEU: eta ~ N(4, 3); CHRF3: eta ~ N(15, 7); tau ~ N(0, 1) and
  // eps ~ HalfCauchy(5) for both.
  static PriorConfig ForMetric(Metric metric);
};

struct SamplerConfig {
  int chains = 4;
  int warmup = 2000;
  int draws = 2000;
  std::uint64_t seed = 0;
  double max_rhat = 1.05;
  // Run chains on OpenMP threads. Draws are identical either way.
  bool parallel_chains = true;
};

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double rhat = 0.0;
  double ess = 0.0;
};

struct PairwiseDifference {
  std::string method;
  double mean = 0.0;
  double sd = 0.0;
};

struct PosteriorSummary {
  Metric metric = Metric::kBleu;
  std::vector<std::string> tasks;
  std::vector<std::string> methods;
  std::vector<ParameterSummary> eta;  // per task
  std::vector<ParameterSummary> tau;  // per method
  std::vector<ParameterSummary> eps;  // per task
  int chains = 0;
  int draws_per_chain = 0;
  // Post-warmup draws, chain-major: eta_draws[task][chain * draws + i].
  std::vector<std::vector<double>> eta_draws;
  std::vector<std::vector<double>> tau_draws;
  std::vector<std::vector<double>> eps_draws;

  double MaxRhat() const;
};

// Metropolis-within-Gibbs: (eta, tau) drawn jointly from their Gaussian full
// conditional, each log(eps) updated by an adaptive random-walk Metropolis
// step (HalfCauchy prior with the log-Jacobian). Throws ConvergenceError if
// any split R-hat exceeds `sampler.max_rhat`, std::invalid_argument if a
// (task, method) cell is empty.
PosteriorSummary FitBayesLinear(const ScoreTable& table, Metric metric,
                                const PriorConfig& priors,
                                const SamplerConfig& sampler);

// Same fit without the convergence check.
PosteriorSummary SampleBayesLinear(const ScoreTable& table, Metric metric,
                                   const PriorConfig& priors,
                                   const SamplerConfig& sampler);

// Draw-wise tau[method] - tau[baseline] for every method, in method order.
// Throws std::invalid_argument if the baseline is absent.
std::vector<PairwiseDifference> PairwiseTau(const PosteriorSummary& summary,
                                            std::string_view baseline = "Subword-NMT");

// Split R-hat over equally long chains.
double SplitRhat(std::span<const std::vector<double>> chains);
// Multi-chain effective sample size (Geyer initial monotone sequence).
double EffectiveSampleSize(std::span<const std::vector<double>> chains);

}  // namespace subwordbench::stats

#endif  // SUBWORDBENCH_BAYES_H_
