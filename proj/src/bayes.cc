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

#include "subwordbench/bayes.h"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "subwordbench/error.h"

namespace subwordbench::stats {
namespace {

// Sufficient statistics of one (task, method) cell.
struct Cell {
  double n = 0.0;
  double sum = 0.0;
  double sumsq = 0.0;
};

struct Data {
  std::size_t tasks = 0;
  std::size_t methods = 0;
  std::vector<Cell> cells;  // task-major
  std::vector<double> task_n;
  std::vector<double> task_mean;
  std::vector<double> task_sd;

  const Cell& At(std::size_t task, std::size_t method) const {
    return cells[task * methods + method];
  }
};

Data Collect(const ScoreTable& table, Metric metric) {
  Data data;
  std::vector<std::string> tasks;
  for (const auto& t : table.tasks()) {
    bool any = false;
    for (const auto& m : table.methods()) any = any || !table.Scores(t, m, metric).empty();
    if (any) tasks.push_back(t);
  }
  data.tasks = tasks.size();
  data.methods = table.methods().size();
  if (data.tasks == 0) throw std::invalid_argument("no scores for metric");
  data.cells.resize(data.tasks * data.methods);
  data.task_n.assign(data.tasks, 0.0);
  data.task_mean.assign(data.tasks, 0.0);
  data.task_sd.assign(data.tasks, 0.0);
  for (std::size_t l = 0; l < data.tasks; ++l) {
    std::vector<double> all;
    for (std::size_t m = 0; m < data.methods; ++m) {
      const auto scores = table.Scores(tasks[l], table.methods()[m], metric);
      if (scores.empty()) {
        throw std::invalid_argument("empty cell " + tasks[l] + "/" + table.methods()[m]);
      }
      auto& cell = data.cells[l * data.methods + m];
      for (const double y : scores) {
        cell.n += 1.0;
        cell.sum += y;
        cell.sumsq += y * y;
      }
      all.insert(all.end(), scores.begin(), scores.end());
    }
    data.task_n[l] = static_cast<double>(all.size());
    data.task_mean[l] = Mean(all);
    data.task_sd[l] = StdDev(all);
  }
  return data;
}

struct ChainDraws {
  std::vector<std::vector<double>> eta;
  std::vector<std::vector<double>> tau;
  std::vector<std::vector<double>> eps;
};

class Chain {
 public:
  Chain(const Data& data, const PriorConfig& priors, std::uint64_t seed, int index)
      : data_(data), priors_(priors) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), 0x5eedu};
    rng_.seed(seq);
    const std::size_t L = data.tasks;
    const std::size_t M = data.methods;
    eta_.resize(L);
    tau_.resize(M);
    log_eps_.resize(L);
    step_.assign(L, 0.5);
    // Overdispersed starting points around the data.
    for (std::size_t l = 0; l < L; ++l) {
      eta_[l] = data.task_mean[l] + Normal();
      log_eps_[l] = std::log(std::max(data.task_sd[l], 0.1)) + 0.5 * Normal();
    }
    for (std::size_t m = 0; m < M; ++m) tau_[m] = priors.method_mean + Normal();
  }

  ChainDraws Run(int warmup, int draws) {
    const std::size_t L = data_.tasks;
    const std::size_t M = data_.methods;
    ChainDraws out;
    out.eta.assign(L, std::vector<double>(draws));
    out.tau.assign(M, std::vector<double>(draws));
    out.eps.assign(L, std::vector<double>(draws));
    std::vector<int> accepted(L, 0);
    int batch_iters = 0;
    int batch_index = 0;
    for (int it = 0; it < warmup + draws; ++it) {
      DrawEffects();
      for (std::size_t l = 0; l < L; ++l) {
        for (int k = 0; k < kNoiseUpdatesPerIteration; ++k) accepted[l] += UpdateNoise(l);
      }
      if (it < warmup && ++batch_iters == kAdaptBatch) {
        ++batch_index;
        const double delta = std::min(0.1, 1.0 / std::sqrt(static_cast<double>(batch_index)));
        for (std::size_t l = 0; l < L; ++l) {
          const double rate = static_cast<double>(accepted[l]) /
                              (kAdaptBatch * kNoiseUpdatesPerIteration);
          step_[l] *= std::exp(rate > kTargetAcceptance ? delta : -delta);
          accepted[l] = 0;
        }
        batch_iters = 0;
      }
      if (it >= warmup) {
        const auto i = static_cast<std::size_t>(it - warmup);
        for (std::size_t l = 0; l < L; ++l) {
          out.eta[l][i] = eta_[l];
          out.eps[l][i] = std::exp(log_eps_[l]);
        }
        for (std::size_t m = 0; m < M; ++m) out.tau[m][i] = tau_[m];
      }
    }
    return out;
  }

 private:
  static constexpr int kAdaptBatch = 50;
  static constexpr int kNoiseUpdatesPerIteration = 3;
  static constexpr double kTargetAcceptance = 0.44;
  static constexpr double kLogEpsFloor = -20.0;

  double Normal() { return normal_(rng_); }

  // Joint Gaussian full conditional of (eta, tau) given eps.
  void DrawEffects() {
    const std::size_t L = data_.tasks;
    const std::size_t M = data_.methods;
    const auto K = static_cast<Eigen::Index>(L + M);
    Eigen::MatrixXd precision = Eigen::MatrixXd::Zero(K, K);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(K);
    for (std::size_t l = 0; l < L; ++l) {
      const double inv_var = std::exp(-2.0 * log_eps_[l]);
      const auto a = static_cast<Eigen::Index>(l);
      for (std::size_t m = 0; m < M; ++m) {
        const Cell& cell = data_.At(l, m);
        const auto b = static_cast<Eigen::Index>(L + m);
        const double w = cell.n * inv_var;
        precision(a, a) += w;
        precision(b, b) += w;
        precision(a, b) += w;
        precision(b, a) += w;
        rhs(a) += cell.sum * inv_var;
        rhs(b) += cell.sum * inv_var;
      }
    }
    const double task_prec = 1.0 / (priors_.task_sd * priors_.task_sd);
    const double method_prec = 1.0 / (priors_.method_sd * priors_.method_sd);
    for (std::size_t l = 0; l < L; ++l) {
      const auto a = static_cast<Eigen::Index>(l);
      precision(a, a) += task_prec;
      rhs(a) += priors_.task_mean * task_prec;
    }
    for (std::size_t m = 0; m < M; ++m) {
      const auto b = static_cast<Eigen::Index>(L + m);
      precision(b, b) += method_prec;
      rhs(b) += priors_.method_mean * method_prec;
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(precision);
    Eigen::VectorXd z(K);
    for (Eigen::Index k = 0; k < K; ++k) z(k) = Normal();
    const Eigen::VectorXd x = llt.solve(rhs) + llt.matrixU().solve(z);
    for (std::size_t l = 0; l < L; ++l) eta_[l] = x(static_cast<Eigen::Index>(l));
    for (std::size_t m = 0; m < M; ++m) tau_[m] = x(static_cast<Eigen::Index>(L + m));
  }

  double LogNoiseTarget(std::size_t l, double log_eps, double ss) const {
    const double scaled = std::exp(log_eps) / priors_.noise_scale;
    return -data_.task_n[l] * log_eps - 0.5 * ss * std::exp(-2.0 * log_eps) -
           std::log1p(scaled * scaled) + log_eps;
  }

  int UpdateNoise(std::size_t l) {
    double ss = 0.0;
    for (std::size_t m = 0; m < data_.methods; ++m) {
      const Cell& cell = data_.At(l, m);
      const double mu = eta_[l] + tau_[m];
      ss += cell.sumsq - 2.0 * mu * cell.sum + cell.n * mu * mu;
    }
    ss = std::max(ss, 0.0);
    const double proposal = log_eps_[l] + step_[l] * Normal();
    if (proposal < kLogEpsFloor) return 0;
    const double log_ratio =
        LogNoiseTarget(l, proposal, ss) - LogNoiseTarget(l, log_eps_[l], ss);
    if (log_ratio >= 0.0 || std::log(uniform_(rng_)) < log_ratio) {
      log_eps_[l] = proposal;
      return 1;
    }
    return 0;
  }

  const Data& data_;
  const PriorConfig& priors_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::vector<double> eta_;
  std::vector<double> tau_;
  std::vector<double> log_eps_;
  std::vector<double> step_;
};

ParameterSummary Summarize(std::string name, std::span<const std::vector<double>> chains) {
  ParameterSummary s;
  s.name = std::move(name);
  std::vector<double> all;
  for (const auto& c : chains) all.insert(all.end(), c.begin(), c.end());
  s.mean = Mean(all);
  s.sd = StdDev(all);
  s.rhat = SplitRhat(chains);
  s.ess = EffectiveSampleSize(chains);
  return s;
}

std::vector<double> Concat(std::span<const std::vector<double>> chains) {
  std::vector<double> all;
  for (const auto& c : chains) all.insert(all.end(), c.begin(), c.end());
  return all;
}

}  // namespace

PriorConfig PriorConfig::ForMetric(Metric metric) {
  PriorConfig p;
  if (metric == Metric::kChrf3) {
    p.task_mean = 15.0;
    p.task_sd = 7.0;
  }
  return p;
}

double PosteriorSummary::MaxRhat() const {
  double worst = 0.0;
  for (const auto* group : {&eta, &tau, &eps}) {
    for (const auto& p : *group) worst = std::max(worst, p.rhat);
  }
  return worst;
}

double SplitRhat(std::span<const std::vector<double>> chains) {
  std::vector<std::span<const double>> halves;
  for (const auto& c : chains) {
    const std::size_t half = c.size() / 2;
    if (half < 2) throw std::invalid_argument("chains too short for split R-hat");
    halves.emplace_back(c.data(), half);
    halves.emplace_back(c.data() + c.size() - half, half);
  }
  const double n = static_cast<double>(halves.front().size());
  std::vector<double> means;
  double within = 0.0;
  for (const auto& h : halves) {
    means.push_back(Mean(h));
    const double sd = StdDev(h);
    within += sd * sd;
  }
  within /= static_cast<double>(halves.size());
  const double sd_means = StdDev(means);
  const double between = n * sd_means * sd_means;
  if (within <= 0.0) return between > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  const double var_plus = (n - 1.0) / n * within + between / n;
  return std::sqrt(var_plus / within);
}

double EffectiveSampleSize(std::span<const std::vector<double>> chains) {
  const std::size_t m = chains.size();
  const std::size_t n = chains.front().size();
  if (n < 4) throw std::invalid_argument("chains too short for ESS");
  std::vector<double> means(m);
  std::vector<double> variances(m);
  for (std::size_t c = 0; c < m; ++c) {
    means[c] = Mean(chains[c]);
    const double sd = StdDev(chains[c]);
    variances[c] = sd * sd;
  }
  const double nn = static_cast<double>(n);
  const double within = Mean(variances);
  const double sd_means = m > 1 ? StdDev(means) : 0.0;
  const double var_plus = (nn - 1.0) / nn * within + sd_means * sd_means;
  const double total = static_cast<double>(m) * nn;
  if (var_plus <= 0.0) return total;

  // Biased autocovariance of every chain at `lag`, averaged over chains.
  const auto mean_autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i + lag < n; ++i) {
        s += (chains[c][i] - means[c]) * (chains[c][i + lag] - means[c]);
      }
      acc += s / nn;
    }
    return acc / static_cast<double>(m);
  };
  const auto rho = [&](std::size_t lag) {
    return 1.0 - (within - mean_autocov(lag)) / var_plus;
  };

  double tau = -1.0;
  double previous_pair = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    double pair = rho(2 * k) + rho(2 * k + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, previous_pair);  // initial monotone sequence
    previous_pair = pair;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0 / std::log10(total));
  return total / tau;
}

PosteriorSummary SampleBayesLinear(const ScoreTable& table, Metric metric,
                                   const PriorConfig& priors,
                                   const SamplerConfig& sampler) {
  if (sampler.chains < 2) throw std::invalid_argument("need at least two chains");
  if (sampler.draws < 4 || sampler.warmup < 0) {
    throw std::invalid_argument("bad warmup/draw counts");
  }
  const Data data = Collect(table, metric);
  std::vector<ChainDraws> runs(static_cast<std::size_t>(sampler.chains));
#pragma omp parallel for schedule(static, 1) if (sampler.parallel_chains)
  for (int c = 0; c < sampler.chains; ++c) {
    Chain chain(data, priors, sampler.seed, c);
    runs[static_cast<std::size_t>(c)] = chain.Run(sampler.warmup, sampler.draws);
  }

  PosteriorSummary summary;
  summary.metric = metric;
  for (const auto& t : table.tasks()) {
    for (const auto& m : table.methods()) {
      if (!table.Scores(t, m, metric).empty()) {
        summary.tasks.push_back(t);
        break;
      }
    }
  }
  summary.methods = table.methods();
  summary.chains = sampler.chains;
  summary.draws_per_chain = sampler.draws;

  const auto collect = [&](auto member, std::size_t index) {
    std::vector<std::vector<double>> chains;
    for (const auto& run : runs) chains.push_back((run.*member)[index]);
    return chains;
  };
  for (std::size_t l = 0; l < data.tasks; ++l) {
    const auto eta = collect(&ChainDraws::eta, l);
    const auto eps = collect(&ChainDraws::eps, l);
    summary.eta.push_back(Summarize("eta[" + summary.tasks[l] + "]", eta));
    summary.eps.push_back(Summarize("eps[" + summary.tasks[l] + "]", eps));
    summary.eta_draws.push_back(Concat(eta));
    summary.eps_draws.push_back(Concat(eps));
  }
  for (std::size_t m = 0; m < data.methods; ++m) {
    const auto tau = collect(&ChainDraws::tau, m);
    summary.tau.push_back(Summarize("tau[" + summary.methods[m] + "]", tau));
    summary.tau_draws.push_back(Concat(tau));
  }
  return summary;
}

PosteriorSummary FitBayesLinear(const ScoreTable& table, Metric metric,
                                const PriorConfig& priors,
                                const SamplerConfig& sampler) {
  auto summary = SampleBayesLinear(table, metric, priors, sampler);
  std::ostringstream failures;
  for (const auto* group : {&summary.eta, &summary.tau, &summary.eps}) {
    for (const auto& p : *group) {
      if (!(p.rhat <= sampler.max_rhat)) failures << ' ' << p.name << '=' << p.rhat;
    }
  }
  if (!failures.str().empty()) {
    throw ConvergenceError("R-hat above " + std::to_string(sampler.max_rhat) + ":" +
                           failures.str());
  }
  return summary;
}

std::vector<PairwiseDifference> PairwiseTau(const PosteriorSummary& summary,
                                            std::string_view baseline) {
  const auto it = std::find(summary.methods.begin(), summary.methods.end(), baseline);
  if (it == summary.methods.end()) {
    throw std::invalid_argument("baseline method not present: " + std::string(baseline));
  }
  const auto& base = summary.tau_draws[static_cast<std::size_t>(it - summary.methods.begin())];
  std::vector<PairwiseDifference> out;
  for (std::size_t m = 0; m < summary.methods.size(); ++m) {
    std::vector<double> diff(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) diff[i] = summary.tau_draws[m][i] - base[i];
    out.push_back({summary.methods[m], Mean(diff), StdDev(diff)});
  }
  return out;
}

}  // namespace subwordbench::stats
