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

#ifndef SUBWORDBENCH_KERNELS_H_
#define SUBWORDBENCH_KERNELS_H_

// Data-parallel inner loops. Each kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::omp` that must return
// identical results; the library calls the OpenMP versions.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <vector>

namespace subwordbench::kernels {

// A word type as a sequence of interned symbol ids, weighted by frequency.
struct SymbolWord {
  std::vector<std::int32_t> symbols;
  std::int64_t freq = 0;
};

inline std::uint64_t PackPair(std::int32_t left, std::int32_t right) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(left)) << 32) |
         static_cast<std::uint32_t>(right);
}
inline std::int32_t PairLeft(std::uint64_t key) {
  return static_cast<std::int32_t>(key >> 32);
}
inline std::int32_t PairRight(std::uint64_t key) {
  return static_cast<std::int32_t>(key & 0xFFFFFFFFu);
}

// Frequency-weighted counts of adjacent symbol pairs (overlapping).
using PairCounts = std::unordered_map<std::uint64_t, std::int64_t>;

inline constexpr int kMaxBleuOrder = 8;

// Sufficient statistics for corpus BLEU.
struct BleuCounts {
  std::array<std::int64_t, kMaxBleuOrder> matches{};
  std::array<std::int64_t, kMaxBleuOrder> totals{};
  std::int64_t hyp_length = 0;
  std::int64_t ref_length = 0;

  bool operator==(const BleuCounts&) const = default;
};

// Clipped n-gram statistics of one whitespace-tokenized sentence pair.
BleuCounts SentenceBleuCounts(const std::string& hyp, const std::string& ref,
                              int max_n);

// Sentence-level character n-gram F-score in [0, 100]. Inputs are already
// normalized (case, whitespace).
double SentenceChrf(const std::string& hyp, const std::string& ref,
                    double beta, int max_n);

namespace serial {

PairCounts CountPairs(std::span<const SymbolWord> words);
BleuCounts AccumulateBleu(std::span<const std::string> hyps,
                          std::span<const std::string> refs, int max_n);
std::vector<double> ChrfScores(std::span<const std::string> hyps,
                               std::span<const std::string> refs, double beta,
                               int max_n);

template <typename T, typename Fn>
auto Map(std::span<const T> items, Fn&& fn) {
  using R = std::invoke_result_t<Fn&, const T&>;
  std::vector<R> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(fn(item));
  return out;
}

}  // namespace serial

namespace omp {

PairCounts CountPairs(std::span<const SymbolWord> words);
BleuCounts AccumulateBleu(std::span<const std::string> hyps,
                          std::span<const std::string> refs, int max_n);
std::vector<double> ChrfScores(std::span<const std::string> hyps,
                               std::span<const std::string> refs, double beta,
                               int max_n);

// Applies `fn` to every item; output order matches input order. `fn` must be
// safe to call concurrently.
template <typename T, typename Fn>
auto Map(std::span<const T> items, Fn&& fn) {
  using R = std::invoke_result_t<Fn&, const T&>;
  std::vector<R> out(items.size());
  const auto n = static_cast<std::int64_t>(items.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = fn(items[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace omp

}  // namespace subwordbench::kernels

#endif  // SUBWORDBENCH_KERNELS_H_
