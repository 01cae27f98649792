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


// Published per-cell mean and standard deviation over five seeds.

#ifndef SUBWORDBENCH_TESTS_AGGREGATES_H_
#define SUBWORDBENCH_TESTS_AGGREGATES_H_

#include <vector>

#include "subwordbench/stats.h"

namespace subwordbench::testdata {

struct AggregateRow {
  const char* task;
  const char* method;
  double bleu_mean;
  double bleu_sd;
  double chrf_mean;
  double chrf_sd;
};

inline constexpr AggregateRow kAggregates[] = {
    {"EN-KK (train120k)", "LMVR", 1.00, 0.12, 21.98, 0.41},
    {"EN-KK (train120k)", "MORSEL", 0.94, 0.11, 21.24, 0.89},
    {"EN-KK (train120k)", "SentencePiece", 1.04, 0.09, 21.48, 0.47},
    {"EN-KK (train120k)", "Subword-NMT", 1.32, 0.08, 22.12, 0.28},
    {"EN-KK (train220k)", "LMVR", 1.82, 0.13, 22.74, 0.84},
    {"EN-KK (train220k)", "MORSEL", 2.06, 0.11, 22.88, 0.40},
    {"EN-KK (train220k)", "SentencePiece", 2.18, 0.08, 22.78, 0.43},
    {"EN-KK (train220k)", "Subword-NMT", 1.94, 0.22, 22.62, 0.88},
    {"KK-EN (train120k)", "LMVR", 1.70, 0.07, 23.72, 0.44},
    {"KK-EN (train120k)", "MORSEL", 2.62, 0.08, 26.26, 0.36},
    {"KK-EN (train120k)", "SentencePiece", 2.34, 0.21, 24.64, 0.81},
    {"KK-EN (train120k)", "Subword-NMT", 3.14, 0.18, 25.92, 0.54},
    {"KK-EN (train220k)", "LMVR", 9.42, 0.26, 33.88, 0.76},
    {"KK-EN (train220k)", "MORSEL", 10.44, 0.48, 34.58, 0.88},
    {"KK-EN (train220k)", "SentencePiece", 10.02, 0.29, 33.50, 0.54},
    {"KK-EN (train220k)", "Subword-NMT", 10.68, 0.34, 35.52, 0.41},
    {"EN-NE", "LMVR", 4.32, 0.04, 31.00, 0.29},
    {"EN-NE", "MORSEL", 4.38, 0.16, 31.28, 0.47},
    {"EN-NE", "SentencePiece", 4.58, 0.15, 31.36, 0.35},
    {"EN-NE", "Subword-NMT", 4.42, 0.16, 30.96, 0.34},
    {"NE-EN", "LMVR", 7.84, 0.11, 34.10, 0.16},
    {"NE-EN", "MORSEL", 5.30, 0.30, 28.18, 0.97},
    {"NE-EN", "SentencePiece", 8.42, 0.23, 34.40, 0.73},
    {"NE-EN", "Subword-NMT", 8.46, 0.15, 34.18, 0.13},
    {"EN-SI", "LMVR", 1.44, 0.32, 28.22, 0.30},
    {"EN-SI", "MORSEL", 1.12, 0.13, 27.44, 0.34},
    {"EN-SI", "SentencePiece", 1.08, 0.31, 27.56, 0.43},
    {"EN-SI", "Subword-NMT", 0.88, 0.13, 26.78, 0.51},
    {"SI-EN", "LMVR", 7.24, 0.22, 32.16, 0.63},
    {"SI-EN", "MORSEL", 7.78, 0.16, 34.32, 0.30},
    {"SI-EN", "SentencePiece", 7.52, 0.08, 33.58, 0.43},
    {"SI-EN", "Subword-NMT", 7.76, 0.25, 34.38, 0.38},
};

inline std::vector<stats::CellAggregate> AggregateCells(stats::Metric metric) {
  std::vector<stats::CellAggregate> cells;
  for (const auto& row : kAggregates) {
    const bool bleu = metric == stats::Metric::kBleu;
    cells.push_back({row.task, row.method, metric, bleu ? row.bleu_mean : row.chrf_mean,
                     bleu ? row.bleu_sd : row.chrf_sd});
  }
  return cells;
}

}  // namespace subwordbench::testdata

#endif  // SUBWORDBENCH_TESTS_AGGREGATES_H_
