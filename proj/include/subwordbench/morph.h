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

#ifndef SUBWORDBENCH_MORPH_H_
#define SUBWORDBENCH_MORPH_H_

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subwordbench/corpus.h"

namespace subwordbench::morph {

// Minimum-description-length segmentation model.
//
// Cost of a model over word types w with frequency f_w and segmentation
// morphs(w):
//   corpus  = N log N - sum_m c_m log c_m     (c_m token-weighted morph counts)
//   lexicon = sum_{m in lexicon} |m| * (log |A| + log 2)
//   total   = corpus + alpha * lexicon
// where A is the character alphabet of the training words and log 2 per
// character is the geometric (p = 0.5) morph-length prior. Costs are in nats.
class MdlModel {
 public:
  struct WordEntry {
    std::int64_t freq = 0;
    Morphs morphs;

    bool operator==(const WordEntry&) const = default;
  };

  MdlModel() = default;
  // Builds a model from stored training segmentations; counts and cost are
  // derived.
  MdlModel(std::map<std::string, WordEntry> words, double corpusweight,
           bool vocab_constrained = false);

  const std::map<std::string, std::int64_t>& lexicon() const { return lexicon_; }
  const std::map<std::string, WordEntry>& words() const { return words_; }
  const std::set<std::string>& alphabet() const { return alphabet_; }
  double corpusweight() const { return corpusweight_; }
  double total_cost() const { return total_cost_; }
  std::int64_t morph_tokens() const { return morph_tokens_; }
  // True when produced by ConstrainVocab (the stand-in for a
  // vocabulary-bounded segmenter).
  bool vocab_constrained() const { return vocab_constrained_; }

  double CorpusCost() const;
  double LexiconCost() const;

  // Distinct symbols the model emits on its training alphabet: lexicon
  // morphs plus single-character fallbacks.
  std::size_t ProducibleSymbolCount() const;

  // -log p(morph) for lexicon morphs; single characters outside the lexicon
  // get the smoothed cost log(2 (N + 1)); anything else is +infinity.
  double MorphCost(std::string_view morph) const;

  // Stored segmentation for training words, otherwise the minimum-cost
  // segmentation under MorphCost found by dynamic programming.
  Morphs Segment(std::string_view word) const;
  Morphs Viterbi(std::string_view word) const;

  bool operator==(const MdlModel&) const = default;

 private:
  std::map<std::string, WordEntry> words_;
  std::map<std::string, std::int64_t> lexicon_;
  std::set<std::string> alphabet_;
  std::size_t max_morph_chars_ = 0;
  double corpusweight_ = 1.0;
  double total_cost_ = 0.0;
  std::int64_t morph_tokens_ = 0;
  bool vocab_constrained_ = false;
};

// Total cost of an arbitrary segmentation of the given words, using the same
// formula as MdlModel. Used by the trainer and by exhaustive checks.
double SegmentationCost(const std::map<std::string, MdlModel::WordEntry>& words,
                        double corpusweight);

struct TrainOptions {
  int max_epochs = 50;
  // Extra descents: the first starts from single characters, the rest from
  // seeded random splits. The lowest final cost wins. Greedy splitting from whole words cannot reach analyses that only
  // pay off once several words share a morph.
  int restarts = 4;
  // The best descent is then refined by collective moves (split out a shared
  // affix, join a frequent morph pair, break a morph into characters), up to
  // `max_kicks` of each kind per round, each followed by a local descent and
  // kept only if the total cost drops. Moves touching more than
  // `max_kick_words` words are skipped.
  int kick_rounds = 3;
  std::size_t max_kicks = 32;
  std::size_t max_kick_words = 100;
  // When set, receives the total cost after initialization and after every
  // accepted word update of the winning descent.
  std::vector<double>* cost_trace = nullptr;
};

// Greedy recursive binary splitting. Word types are visited in a seeded
// random order each epoch; a new analysis is kept only if it does not raise
// the total cost. Stops when an epoch changes nothing. The first descent
// starts from whole words, the others from random splits.
MdlModel TrainMdl(const FrequencyTable& freq, double corpusweight,
                  std::uint64_t seed, const TrainOptions& options = {});

struct F1Report {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t predicted = 0;
  std::int64_t gold = 0;
  std::int64_t matched = 0;
};

enum class AlternativePolicy { kBestMatch, kFirst };

// Internal boundary offsets (in code points) of a segmentation.
std::vector<std::size_t> Boundaries(std::span<const std::string> morphs);

// Micro-averaged boundary precision/recall/F1. A word whose predicted and
// gold boundary sets are both empty counts as a perfect match; if the totals
// are all zero the report is P = R = F1 = 1. Throws std::invalid_argument if
// a gold word has no prediction.
F1Report BoundaryF1(const std::map<std::string, Morphs>& predicted,
                    const GoldSegmentations& gold,
                    AlternativePolicy policy = AlternativePolicy::kBestMatch);

inline constexpr double kDefaultAlphaGrid[] = {0.01, 0.1, 0.5, 1, 2, 5, 10};

struct TuneRow {
  double corpusweight;
  F1Report report;
};

struct TuneResult {
  double best_corpusweight;
  std::vector<TuneRow> rows;  // grid order
  MdlModel best_model;
};

// Trains one model per grid value (in parallel) and keeps the one with the
// highest boundary F1 on the gold words; ties go to the smallest value.
TuneResult TuneCorpusweight(const FrequencyTable& freq,
                            const GoldSegmentations& gold,
                            std::span<const double> grid, std::uint64_t seed,
                            AlternativePolicy policy = AlternativePolicy::kBestMatch);

// Shrinks the lexicon to at most `max_vocab` distinct morphs by repeatedly
// dropping the rarest multi-character morph (ties: longest, then
// lexicographically smallest) and re-segmenting the words that used it.
// Budgets count ProducibleSymbolCount, so character fallback units count
// against them. Throws
// std::invalid_argument if `max_vocab` is below the alphabet size.
MdlModel ConstrainVocab(const MdlModel& model, std::int64_t max_vocab);

// "s +low +ly" style: non-initial morphs prefixed with '+'.
std::vector<std::string> RenderLmvrStyle(std::span<const std::string> morphs);
// Inverse over a piece sequence that may span several words; returns the
// words joined by single spaces. Throws FormatError if the first piece is a
// continuation.
std::string JoinLmvrStyle(std::span<const std::string> pieces);

// `#subwordbench-mdl v1 alpha=<float> vocab=<N>`, then `morph<TAB>count`
// sorted by descending count then lexicographically, then a `#words` section
// of `word<TAB>freq<TAB>morph morph ...` lines.
void WriteModel(const MdlModel& model, std::ostream& out);
MdlModel ReadModel(std::istream& in);
void SaveModel(const MdlModel& model, const std::string& path);
MdlModel LoadModel(const std::string& path);

}  // namespace subwordbench::morph

#endif  // SUBWORDBENCH_MORPH_H_
