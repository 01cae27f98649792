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

#include "subwordbench/metrics.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "subwordbench/corpus.h"
#include "subwordbench/utf8.h"

namespace subwordbench::metrics {
namespace {

void Validate(const EvalPair& pair) {
  if (pair.hypotheses.empty()) throw std::invalid_argument("no hypotheses");
  if (pair.hypotheses.size() != pair.references.size()) {
    throw std::invalid_argument("hypothesis/reference count mismatch");
  }
}

std::vector<std::string> Prepare(const std::vector<std::string>& lines,
                                 bool lowercase) {
  std::vector<std::string> out;
  out.reserve(lines.size());
  for (const auto& line : lines) {
    auto normalized = NormalizeWhitespace(line);
    out.push_back(lowercase ? utf8::ToLower(normalized) : std::move(normalized));
  }
  return out;
}

}  // namespace

std::string NormalizeWhitespace(const std::string& text) {
  const auto tokens = SplitWhitespace(text);
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

double BleuFromCounts(const kernels::BleuCounts& counts, int max_n) {
  if (counts.hyp_length == 0) return 0.0;
  double log_precision = 0.0;
  for (int n = 0; n < max_n; ++n) {
    if (counts.matches[n] == 0 || counts.totals[n] == 0) return 0.0;
    log_precision += std::log(static_cast<double>(counts.matches[n]) /
                              static_cast<double>(counts.totals[n]));
  }
  const double c = static_cast<double>(counts.hyp_length);
  const double r = static_cast<double>(counts.ref_length);
  const double brevity = c > r ? 1.0 : std::exp(1.0 - r / c);
  return 100.0 * brevity * std::exp(log_precision / max_n);
}

double CorpusBleu(const EvalPair& pair, int max_n, bool lowercase) {
  Validate(pair);
  if (max_n < 1 || max_n > kernels::kMaxBleuOrder) {
    throw std::invalid_argument("unsupported BLEU order");
  }
  const auto hyps = Prepare(pair.hypotheses, lowercase);
  const auto refs = Prepare(pair.references, lowercase);
  return BleuFromCounts(kernels::omp::AccumulateBleu(hyps, refs, max_n), max_n);
}

double Chrf(const EvalPair& pair, double beta, int max_n, bool lowercase) {
  Validate(pair);
  if (max_n < 1) throw std::invalid_argument("unsupported CHRF order");
  const auto hyps = Prepare(pair.hypotheses, lowercase);
  const auto refs = Prepare(pair.references, lowercase);
  const auto scores = kernels::omp::ChrfScores(hyps, refs, beta, max_n);
  return std::accumulate(scores.begin(), scores.end(), 0.0) /
         static_cast<double>(scores.size());
}

}  // namespace subwordbench::metrics
