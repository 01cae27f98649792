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

#ifndef SUBWORDBENCH_BPE_H_
#define SUBWORDBENCH_BPE_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "subwordbench/corpus.h"

namespace subwordbench::bpe {

// Continuation marker attached to non-final pieces in token mode.
inline constexpr std::string_view kContinuation = "@@";
// End-of-word sentinel used while learning/applying token-mode merges.
// Never emitted.
inline constexpr std::string_view kEndOfWord = "</w>";
// Default word-boundary marker for sentence mode (U+2581).
inline constexpr std::string_view kDefaultBoundary = "\xE2\x96\x81";

enum class Mode { kToken, kSentence };

std::string_view ModeName(Mode mode);

struct MergeRule {
  std::string left;
  std::string right;

  bool operator==(const MergeRule&) const = default;
};

// A learned merge list. Immutable once constructed; all member functions are
// safe to call concurrently.
class BpeModel {
 public:
  BpeModel(Mode mode, std::vector<MergeRule> merges,
           std::set<std::string> alphabet, std::int64_t requested_symbols,
           std::string boundary = std::string(kDefaultBoundary));

  Mode mode() const { return mode_; }
  const std::vector<MergeRule>& merges() const { return merges_; }
  std::int64_t requested_symbols() const { return requested_symbols_; }
  const std::string& boundary() const { return boundary_; }
  // Initial symbols seen in training (marker-glued first characters in
  // sentence mode; the end-of-word sentinel is not included).
  const std::set<std::string>& alphabet() const { return alphabet_; }

  // Every symbol the model can produce from its training data: the alphabet
  // plus each merge result, with the end-of-word sentinel removed. Grows
  // monotonically with the number of merges.
  std::set<std::string> Vocabulary() const;

  // Model restricted to its first `count` merges.
  BpeModel Truncated(std::size_t count) const;

  // Raw merged symbols of one word after replaying all merges, without
  // markers. Token mode keeps the sentinel on the last symbol.
  std::vector<std::string> MergeWord(std::string_view word) const;

  // Segments one whitespace-free word into marked pieces: "@@" on non-final
  // pieces (token mode) or the boundary marker on the first piece (sentence
  // mode). Throws std::invalid_argument for words the marker convention
  // cannot represent (token mode: ends in "@@"; sentence mode: contains the
  // boundary marker).
  std::vector<std::string> SegmentWord(std::string_view word) const;

  // Segments every whitespace-separated word of `text`.
  std::vector<std::string> Apply(std::string_view text) const;

  bool operator==(const BpeModel& other) const {
    return mode_ == other.mode_ && merges_ == other.merges_ &&
           boundary_ == other.boundary_;
  }

 private:
  static std::string PairKey(std::string_view left, std::string_view right);

  Mode mode_;
  std::vector<MergeRule> merges_;
  std::set<std::string> alphabet_;
  std::int64_t requested_symbols_;
  std::string boundary_;
  std::unordered_map<std::string, std::vector<std::size_t>> ranks_;
};

// Greedy merge learning on word frequencies with an end-of-word sentinel.
// Ties on pair frequency break lexicographically by (left, right). Stops early
// once no pair occurs at least twice. The seed is accepted for interface
// uniformity; learning is fully deterministic.
BpeModel LearnTokenBpe(const FrequencyTable& freq, std::int64_t num_merges,
                       std::uint64_t seed = 0);

// Learning from sentences: every word gets the boundary marker glued to its
// first character, and merges never cross word boundaries.
BpeModel LearnSentenceBpe(const TokenizedCorpus& corpus, std::int64_t num_merges,
                          std::uint64_t seed = 0,
                          std::string boundary = std::string(kDefaultBoundary));

// Trains one independent model per merge count, in the order given.
std::vector<BpeModel> SweepTokenMergeCounts(const FrequencyTable& freq,
                                            std::span<const std::int64_t> counts,
                                            std::uint64_t seed = 0);
std::vector<BpeModel> SweepSentenceMergeCounts(
    const TokenizedCorpus& corpus, std::span<const std::int64_t> counts,
    std::uint64_t seed = 0);

// Inverse of the marker convention. Token mode joins "@@"-marked pieces to
// their successor; sentence mode starts a new word at every marker-prefixed
// piece. Throws FormatError on malformed sequences.
std::string Detokenize(std::span<const std::string> pieces, Mode mode,
                       std::string_view boundary = kDefaultBoundary);

// Model file: `#subwordbench-bpe v1 mode=<token|sentence> merges=<N>` then
// one `left right` line per merge in application order.
void WriteModel(const BpeModel& model, std::ostream& out);
BpeModel ReadModel(std::istream& in);
void SaveModel(const BpeModel& model, const std::string& path);
BpeModel LoadModel(const std::string& path);

}  // namespace subwordbench::bpe

#endif  // SUBWORDBENCH_BPE_H_
