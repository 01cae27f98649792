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

#ifndef SUBWORDBENCH_METRICS_H_
#define SUBWORDBENCH_METRICS_H_

#include <string>
#include <vector>

#include "subwordbench/kernels.h"

namespace subwordbench::metrics {

// One reference per hypothesis.
struct EvalPair {
  std::vector<std::string> hypotheses;
  std::vector<std::string> references;
};

// Corpus BLEU in [0, 100] over whitespace tokens: clipped n-gram precisions,
// geometric mean, exponential brevity penalty. No smoothing, so any order
// without a match scores 0. Throws std::invalid_argument on an empty or
// mismatched pair.
double CorpusBleu(const EvalPair& pair, int max_n = 4, bool lowercase = true);

double BleuFromCounts(const kernels::BleuCounts& counts, int max_n);

// Character n-gram F-score (CHRF, beta = 3 gives CHRF3) macro-averaged over
// sentences, in [0, 100]. Each sentence is trimmed and internal whitespace
// runs collapse to one space, which is kept as a character. Per sentence,
// precision and recall are averaged over the orders for which either side
// has n-grams.
double Chrf(const EvalPair& pair, double beta = 3.0, int max_n = 6,
            bool lowercase = true);

std::string NormalizeWhitespace(const std::string& text);

}  // namespace subwordbench::metrics

#endif  // SUBWORDBENCH_METRICS_H_
