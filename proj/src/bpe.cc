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

#include "subwordbench/bpe.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <unordered_set>

#include "subwordbench/error.h"
#include "subwordbench/kernels.h"
#include "subwordbench/utf8.h"

namespace subwordbench::bpe {
namespace {

using kernels::PackPair;
using kernels::PairCounts;
using kernels::SymbolWord;

struct TrainingWord {
  std::vector<std::string> symbols;
  std::int64_t freq;
};

std::vector<std::string> InitialSymbols(std::string_view word, Mode mode,
                                        std::string_view boundary) {
  auto symbols = utf8::SplitChars(word);
  if (mode == Mode::kToken) {
    symbols.emplace_back(kEndOfWord);
  } else if (!symbols.empty()) {
    symbols.front().insert(0, boundary);
  }
  return symbols;
}

void MergeInPlace(std::vector<std::int32_t>* symbols, std::int32_t left,
                  std::int32_t right, std::int32_t merged) {
  auto& s = *symbols;
  std::size_t out = 0;
  for (std::size_t i = 0; i < s.size();) {
    if (i + 1 < s.size() && s[i] == left && s[i + 1] == right) {
      s[out++] = merged;
      i += 2;
    } else {
      s[out++] = s[i++];
    }
  }
  s.resize(out);
}

// Incremental greedy learner. Pair statistics are updated only for words that
// contain the merged pair; the candidate set is kept ordered by
// (count desc, left asc, right asc).
class Learner {
 public:
  Learner(std::vector<TrainingWord> words, Mode mode, std::string boundary)
      : mode_(mode), boundary_(std::move(boundary)), queue_(Order{&strings_}) {
    words_.reserve(words.size());
    for (auto& w : words) {
      SymbolWord sw;
      sw.freq = w.freq;
      for (const auto& s : w.symbols) {
        sw.symbols.push_back(Intern(s));
        if (s != kEndOfWord) alphabet_.insert(s);
      }
      words_.push_back(std::move(sw));
    }
  }

  BpeModel Run(std::int64_t num_merges) {
    counts_ = kernels::omp::CountPairs(words_);
    for (std::size_t w = 0; w < words_.size(); ++w) IndexWord(w);
    for (const auto& [key, count] : counts_) {
      if (count > 0) queue_.insert({count, key});
    }

    std::vector<MergeRule> merges;
    while (static_cast<std::int64_t>(merges.size()) < num_merges &&
           !queue_.empty()) {
      const Candidate best = *queue_.begin();
      if (best.count < 2) break;
      const std::int32_t left = kernels::PairLeft(best.key);
      const std::int32_t right = kernels::PairRight(best.key);
      merges.push_back({strings_[left], strings_[right]});
      ApplyMerge(best.key, left, right,
                 Intern(strings_[left] + strings_[right]));
    }
    return BpeModel(mode_, std::move(merges), alphabet_, num_merges, boundary_);
  }

 private:
  struct Candidate {
    std::int64_t count;
    std::uint64_t key;
  };
  struct Order {
    const std::vector<std::string>* strings;
    bool operator()(const Candidate& a, const Candidate& b) const {
      if (a.count != b.count) return a.count > b.count;
      const auto& s = *strings;
      const auto& al = s[kernels::PairLeft(a.key)];
      const auto& bl = s[kernels::PairLeft(b.key)];
      if (al != bl) return al < bl;
      return s[kernels::PairRight(a.key)] < s[kernels::PairRight(b.key)];
    }
  };

  std::int32_t Intern(const std::string& symbol) {
    const auto [it, inserted] =
        ids_.emplace(symbol, static_cast<std::int32_t>(strings_.size()));
    if (inserted) strings_.push_back(symbol);
    return it->second;
  }

  void IndexWord(std::size_t w) {
    const auto& symbols = words_[w].symbols;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto& slot = where_[PackPair(symbols[i], symbols[i + 1])];
      if (slot.empty() || slot.back() != static_cast<std::int32_t>(w)) {
        slot.push_back(static_cast<std::int32_t>(w));
      }
    }
  }

  void ApplyMerge(std::uint64_t key, std::int32_t left, std::int32_t right,
                  std::int32_t merged) {
    std::vector<std::int32_t> affected = std::move(where_[key]);
    where_[key].clear();
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());

    std::unordered_map<std::uint64_t, std::int64_t> delta;
    for (const std::int32_t w : affected) {
      auto& word = words_[w];
      const auto before = word.symbols;
      MergeInPlace(&word.symbols, left, right, merged);
      if (word.symbols.size() == before.size()) continue;  // stale index entry
      for (std::size_t i = 0; i + 1 < before.size(); ++i) {
        delta[PackPair(before[i], before[i + 1])] -= word.freq;
      }
      for (std::size_t i = 0; i + 1 < word.symbols.size(); ++i) {
        delta[PackPair(word.symbols[i], word.symbols[i + 1])] += word.freq;
      }
      IndexWord(w);
    }
    for (const auto& [pair, change] : delta) {
      if (change == 0) continue;
      auto& count = counts_[pair];
      if (count > 0) queue_.erase({count, pair});
      count += change;
      if (count > 0) queue_.insert({count, pair});
    }
  }

  Mode mode_;
  std::string boundary_;
  std::vector<std::string> strings_;
  std::unordered_map<std::string, std::int32_t> ids_;
  std::vector<SymbolWord> words_;
  std::set<std::string> alphabet_;
  PairCounts counts_;
  std::unordered_map<std::uint64_t, std::vector<std::int32_t>> where_;
  std::set<Candidate, Order> queue_;
};

BpeModel LearnFromWords(std::vector<TrainingWord> words, Mode mode,
                        std::int64_t num_merges, std::string boundary) {
  if (num_merges < 0) throw std::invalid_argument("negative merge count");
  Learner learner(std::move(words), mode, std::move(boundary));
  return learner.Run(num_merges);
}

constexpr char kPairSeparator = '\xFF';  // never occurs in valid UTF-8

}  // namespace

std::string_view ModeName(Mode mode) {
  return mode == Mode::kToken ? "token" : "sentence";
}

BpeModel::BpeModel(Mode mode, std::vector<MergeRule> merges,
                   std::set<std::string> alphabet,
                   std::int64_t requested_symbols, std::string boundary)
    : mode_(mode),
      merges_(std::move(merges)),
      alphabet_(std::move(alphabet)),
      requested_symbols_(requested_symbols),
      boundary_(std::move(boundary)) {
  if (boundary_.empty() || utf8::Length(boundary_) != 1) {
    throw std::invalid_argument("boundary marker must be one code point");
  }
  for (std::size_t rank = 0; rank < merges_.size(); ++rank) {
    const auto& m = merges_[rank];
    if (m.left.empty() || m.right.empty()) {
      throw std::invalid_argument("empty merge side");
    }
    ranks_[PairKey(m.left, m.right)].push_back(rank);
  }
}

std::string BpeModel::PairKey(std::string_view left, std::string_view right) {
  std::string key;
  key.reserve(left.size() + right.size() + 1);
  key.append(left);
  key.push_back(kPairSeparator);
  key.append(right);
  return key;
}

std::set<std::string> BpeModel::Vocabulary() const {
  std::set<std::string> vocab;
  const auto add = [&](std::string symbol) {
    if (mode_ == Mode::kToken && symbol.ends_with(kEndOfWord)) {
      symbol.resize(symbol.size() - kEndOfWord.size());
    }
    if (!symbol.empty()) vocab.insert(std::move(symbol));
  };
  for (const auto& s : alphabet_) add(s);
  for (const auto& m : merges_) add(m.left + m.right);
  return vocab;
}

BpeModel BpeModel::Truncated(std::size_t count) const {
  count = std::min(count, merges_.size());
  return BpeModel(mode_,
                  std::vector<MergeRule>(merges_.begin(), merges_.begin() + count),
                  alphabet_, static_cast<std::int64_t>(count), boundary_);
}

std::vector<std::string> BpeModel::MergeWord(std::string_view word) const {
  auto symbols = InitialSymbols(word, mode_, boundary_);
  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  std::size_t last = kNone;
  while (symbols.size() > 1) {
    std::size_t best = kNone;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      const auto it = ranks_.find(PairKey(symbols[i], symbols[i + 1]));
      if (it == ranks_.end()) continue;
      // Smallest rank not yet replayed.
      const auto r = last == kNone
                         ? it->second.begin()
                         : std::upper_bound(it->second.begin(), it->second.end(), last);
      if (r != it->second.end() && *r < best) best = *r;
    }
    if (best == kNone) break;
    const auto& rule = merges_[best];
    std::vector<std::string> next;
    next.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size();) {
      if (i + 1 < symbols.size() && symbols[i] == rule.left &&
          symbols[i + 1] == rule.right) {
        next.push_back(symbols[i] + symbols[i + 1]);
        i += 2;
      } else {
        next.push_back(std::move(symbols[i]));
        ++i;
      }
    }
    symbols = std::move(next);
    last = best;
  }
  return symbols;
}

std::vector<std::string> BpeModel::SegmentWord(std::string_view word) const {
  if (word.empty()) throw std::invalid_argument("empty word");
  if (mode_ == Mode::kToken) {
    if (word.ends_with(kContinuation)) {
      throw std::invalid_argument("word ends with the continuation marker: " +
                                  std::string(word));
    }
    auto pieces = MergeWord(word);
    auto& tail = pieces.back();
    tail.resize(tail.size() - kEndOfWord.size());
    if (tail.empty()) pieces.pop_back();
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
      pieces[i].append(kContinuation);
    }
    return pieces;
  }
  if (word.find(boundary_) != std::string_view::npos) {
    throw std::invalid_argument("word contains the boundary marker: " +
                                std::string(word));
  }
  return MergeWord(word);
}

std::vector<std::string> BpeModel::Apply(std::string_view text) const {
  std::vector<std::string> pieces;
  for (const auto& word : SplitWhitespace(text)) {
    auto segmented = SegmentWord(word);
    pieces.insert(pieces.end(), std::make_move_iterator(segmented.begin()),
                  std::make_move_iterator(segmented.end()));
  }
  return pieces;
}

BpeModel LearnTokenBpe(const FrequencyTable& freq, std::int64_t num_merges,
                       std::uint64_t /*seed*/) {
  if (freq.empty()) throw std::invalid_argument("empty frequency table");
  std::vector<TrainingWord> words;
  words.reserve(freq.size());
  for (const auto& [word, count] : freq) {
    words.push_back({InitialSymbols(word, Mode::kToken, kDefaultBoundary), count});
  }
  return LearnFromWords(std::move(words), Mode::kToken, num_merges,
                        std::string(kDefaultBoundary));
}

BpeModel LearnSentenceBpe(const TokenizedCorpus& corpus, std::int64_t num_merges,
                          std::uint64_t /*seed*/, std::string boundary) {
  const auto freq = CountFrequencies(corpus);
  if (freq.empty()) throw std::invalid_argument("empty corpus");
  std::vector<TrainingWord> words;
  words.reserve(freq.size());
  for (const auto& [word, count] : freq) {
    if (word.find(boundary) != std::string::npos) {
      throw std::invalid_argument("corpus contains the boundary marker");
    }
    words.push_back({InitialSymbols(word, Mode::kSentence, boundary), count});
  }
  return LearnFromWords(std::move(words), Mode::kSentence, num_merges,
                        std::move(boundary));
}

namespace {

template <typename LearnFn>
std::vector<BpeModel> Sweep(std::span<const std::int64_t> counts, LearnFn learn) {
  std::vector<std::optional<BpeModel>> slots(counts.size());
  const auto n = static_cast<std::int64_t>(counts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    slots[static_cast<std::size_t>(i)].emplace(learn(counts[static_cast<std::size_t>(i)]));
  }
  std::vector<BpeModel> models;
  models.reserve(slots.size());
  for (auto& slot : slots) models.push_back(std::move(*slot));
  return models;
}

}  // namespace

std::vector<BpeModel> SweepTokenMergeCounts(const FrequencyTable& freq,
                                            std::span<const std::int64_t> counts,
                                            std::uint64_t seed) {
  return Sweep(counts, [&](std::int64_t k) { return LearnTokenBpe(freq, k, seed); });
}

std::vector<BpeModel> SweepSentenceMergeCounts(const TokenizedCorpus& corpus,
                                               std::span<const std::int64_t> counts,
                                               std::uint64_t seed) {
  return Sweep(counts,
               [&](std::int64_t k) { return LearnSentenceBpe(corpus, k, seed); });
}

std::string Detokenize(std::span<const std::string> pieces, Mode mode,
                       std::string_view boundary) {
  std::string text;
  if (mode == Mode::kToken) {
    bool pending = false;
    for (const auto& piece : pieces) {
      if (piece.empty() || piece == kContinuation) {
        throw FormatError("empty piece in token-mode sequence");
      }
      if (!pending && !text.empty()) text.push_back(' ');
      if (piece.ends_with(kContinuation)) {
        text.append(piece, 0, piece.size() - kContinuation.size());
        pending = true;
      } else {
        text.append(piece);
        pending = false;
      }
    }
    if (pending) throw FormatError("final piece carries the continuation marker");
    return text;
  }
  bool started = false;
  for (const auto& piece : pieces) {
    if (piece.empty() || piece == boundary) {
      throw FormatError("empty piece in sentence-mode sequence");
    }
    if (piece.starts_with(boundary)) {
      if (started) text.push_back(' ');
      text.append(piece, boundary.size());
    } else {
      text.append(piece);
    }
    started = true;
  }
  return text;
}

void WriteModel(const BpeModel& model, std::ostream& out) {
  out << "#subwordbench-bpe v1 mode=" << ModeName(model.mode())
      << " merges=" << model.merges().size() << '\n';
  for (const auto& m : model.merges()) out << m.left << ' ' << m.right << '\n';
}

BpeModel ReadModel(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing BPE model header");
  const auto header = SplitWhitespace(line);
  if (header.size() != 4 || header[0] != "#subwordbench-bpe" || header[1] != "v1" ||
      !header[2].starts_with("mode=") || !header[3].starts_with("merges=")) {
    throw FormatError("bad BPE model header: " + line);
  }
  Mode mode;
  if (header[2] == "mode=token") {
    mode = Mode::kToken;
  } else if (header[2] == "mode=sentence") {
    mode = Mode::kSentence;
  } else {
    throw FormatError("unknown BPE mode in header: " + line);
  }
  std::size_t count = 0;
  try {
    count = std::stoull(header[3].substr(7));
  } catch (const std::exception&) {
    throw FormatError("bad merge count in header: " + line);
  }
  std::vector<MergeRule> merges;
  std::set<std::string> produced;
  std::set<std::string> alphabet;
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw FormatError("truncated BPE model");
    auto fields = SplitWhitespace(line);
    if (fields.size() != 2) throw FormatError("bad merge line: " + line);
    for (const auto& side : fields) {
      if (side != kEndOfWord && !produced.count(side)) alphabet.insert(side);
    }
    produced.insert(fields[0] + fields[1]);
    merges.push_back({std::move(fields[0]), std::move(fields[1])});
  }
  std::string boundary(kDefaultBoundary);
  return BpeModel(mode, std::move(merges), std::move(alphabet),
                  static_cast<std::int64_t>(count), boundary);
}

void SaveModel(const BpeModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  WriteModel(model, out);
  if (!out) throw IoError("write error on " + path);
}

BpeModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return ReadModel(in);
}

}  // namespace subwordbench::bpe
