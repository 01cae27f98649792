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

#include "subwordbench/morph.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <tuple>
#include <unordered_map>
#include <utility>

#include "subwordbench/error.h"
#include "subwordbench/utf8.h"

namespace subwordbench::morph {
namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

double XLogX(double x) { return x > 0 ? x * std::log(x) : 0.0; }

double CharCodeLength(std::size_t alphabet_size) {
  // Uniform character code plus the geometric (p = 0.5) length prior.
  return std::log(static_cast<double>(std::max<std::size_t>(alphabet_size, 1))) +
         std::log(2.0);
}

std::set<std::string> AlphabetOf(const std::map<std::string, MdlModel::WordEntry>& words) {
  std::set<std::string> alphabet;
  for (const auto& [word, entry] : words) {
    for (auto& c : utf8::SplitChars(word)) alphabet.insert(std::move(c));
  }
  return alphabet;
}

std::string Concat(std::span<const std::string> chars, std::size_t begin,
                   std::size_t end) {
  std::string s;
  for (std::size_t i = begin; i < end; ++i) s += chars[i];
  return s;
}

// Minimum-cost segmentation of `chars`; morphs longer than `max_len` code
// points are not considered except that single characters always are.
template <typename CostFn>
Morphs MinCostSegmentation(std::span<const std::string> chars, std::size_t max_len,
                           CostFn&& cost) {
  const std::size_t n = chars.size();
  std::vector<double> best(n + 1, kInfinity);
  std::vector<std::size_t> back(n + 1, 0);
  best[0] = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t lo = j > std::max<std::size_t>(max_len, 1)
                               ? j - std::max<std::size_t>(max_len, 1)
                               : 0;
    for (std::size_t i = lo; i < j; ++i) {
      if (best[i] == kInfinity) continue;
      const double c = best[i] + cost(Concat(chars, i, j));
      if (c < best[j]) {
        best[j] = c;
        back[j] = i;
      }
    }
  }
  Morphs morphs;
  for (std::size_t j = n; j > 0; j = back[j]) {
    morphs.push_back(Concat(chars, back[j], j));
  }
  std::reverse(morphs.begin(), morphs.end());
  return morphs;
}

// Incrementally maintained cost of a segmentation under construction.
class CostState {
 public:
  CostState(double corpusweight, std::size_t alphabet_size)
      : corpusweight_(corpusweight), char_cost_(CharCodeLength(alphabet_size)) {}

  void Add(const std::string& morph, std::int64_t f) {
    auto& c = counts_[morph];
    if (c == 0) lexicon_chars_ += static_cast<std::int64_t>(utf8::Length(morph));
    sum_xlogx_ -= XLogX(static_cast<double>(c));
    c += f;
    sum_xlogx_ += XLogX(static_cast<double>(c));
    tokens_ += f;
  }

  void Remove(const std::string& morph, std::int64_t f) {
    auto it = counts_.find(morph);
    sum_xlogx_ -= XLogX(static_cast<double>(it->second));
    it->second -= f;
    sum_xlogx_ += XLogX(static_cast<double>(it->second));
    tokens_ -= f;
    if (it->second == 0) {
      lexicon_chars_ -= static_cast<std::int64_t>(utf8::Length(morph));
      counts_.erase(it);
    }
  }

  void AddAll(const Morphs& morphs, std::int64_t f) {
    for (const auto& m : morphs) Add(m, f);
  }
  void RemoveAll(const Morphs& morphs, std::int64_t f) {
    for (const auto& m : morphs) Remove(m, f);
  }

  double Cost() const {
    return XLogX(static_cast<double>(tokens_)) - sum_xlogx_ +
           corpusweight_ * static_cast<double>(lexicon_chars_) * char_cost_;
  }

  std::int64_t Count(const std::string& morph) const {
    const auto it = counts_.find(morph);
    return it == counts_.end() ? 0 : it->second;
  }
  std::int64_t tokens() const { return tokens_; }
  // Lexicon cost of one new character.
  double CharCost() const { return corpusweight_ * char_cost_; }

 private:
  double corpusweight_;
  double char_cost_;
  std::unordered_map<std::string, std::int64_t> counts_;
  std::int64_t tokens_ = 0;
  double sum_xlogx_ = 0.0;
  std::int64_t lexicon_chars_ = 0;
};

// Recursive binary splitting of `chars` with frequency `f`; adds the chosen
// morphs to `state` and appends them to `out`.
void Resplit(std::span<const std::string> chars, std::int64_t f, CostState* state,
             Morphs* out) {
  const std::string whole = Concat(chars, 0, chars.size());
  state->Add(whole, f);
  double best_cost = state->Cost();
  state->Remove(whole, f);
  std::size_t best_split = 0;
  for (std::size_t i = 1; i < chars.size(); ++i) {
    const std::string prefix = Concat(chars, 0, i);
    const std::string suffix = Concat(chars, i, chars.size());
    state->Add(prefix, f);
    state->Add(suffix, f);
    const double cost = state->Cost();
    state->Remove(suffix, f);
    state->Remove(prefix, f);
    if (cost < best_cost - 1e-12) {
      best_cost = cost;
      best_split = i;
    }
  }
  if (best_split == 0) {
    state->Add(whole, f);
    out->push_back(whole);
    return;
  }
  const auto left = chars.first(best_split);
  const auto right = chars.subspan(best_split);
  const std::string suffix = Concat(right, 0, right.size());
  state->Add(suffix, f);
  Resplit(left, f, state, out);
  state->Remove(suffix, f);
  Resplit(right, f, state, out);
}

// True when the split encoded by mask a has a longer first morph than b,
// comparing later morphs on equal length.
bool LongerLead(std::uint64_t a, std::uint64_t b, std::size_t n) {
  for (std::size_t bit = 0; bit + 1 < n; ++bit) {
    const bool cut_a = a >> bit & 1;
    const bool cut_b = b >> bit & 1;
    if (cut_a != cut_b) return cut_b;
  }
  return false;
}

// Minimum-cost segmentation of one word given all other words, by dynamic
// programming over (end position, number of morphs). Exact unless a morph
// repeats within the word.
Morphs DpSplit(std::span<const std::string> chars, std::int64_t f, const CostState& state) {
  const std::size_t n = chars.size();
  const double fd = static_cast<double>(f);
  // delta[i][j]: cost change from adding chars[i, j) as one morph.
  std::vector<std::vector<double>> delta(n, std::vector<double>(n + 1, kInfinity));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j <= n; ++j) {
      const auto c = static_cast<double>(state.Count(Concat(chars, i, j)));
      delta[i][j] = -(XLogX(c + fd) - XLogX(c)) +
                    (c == 0 ? static_cast<double>(j - i) * state.CharCost() : 0.0);
    }
  }
  // best[k][j]: cheapest split of chars[0, j) into k morphs.
  std::vector<std::vector<double>> best(n + 1, std::vector<double>(n + 1, kInfinity));
  std::vector<std::vector<std::size_t>> back(n + 1, std::vector<std::size_t>(n + 1, 0));
  best[0][0] = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t j = k; j <= n; ++j) {
      for (std::size_t i = k - 1; i < j; ++i) {
        const double v = best[k - 1][i] + delta[i][j];
        if (v < best[k][j]) {
          best[k][j] = v;
          back[k][j] = i;
        }
      }
    }
  }
  const auto tokens = static_cast<double>(state.tokens());
  std::size_t best_k = 1;
  double best_total = kInfinity;
  for (std::size_t k = 1; k <= n; ++k) {
    const double total = XLogX(tokens + fd * static_cast<double>(k)) + best[k][n];
    if (total < best_total - 1e-12) {
      best_total = total;
      best_k = k;
    }
  }
  Morphs out(best_k);
  std::size_t j = n;
  for (std::size_t k = best_k; k > 0; --k) {
    const std::size_t i = back[k][j];
    out[k - 1] = Concat(chars, i, j);
    j = i;
  }
  return out;
}

// Minimum-cost segmentation of one word given all other words, by scoring
// every split exactly (repeated morphs included). For short words only.
Morphs EnumerateSplit(std::span<const std::string> chars, std::int64_t f,
                      const CostState& state) {
  const std::size_t n = chars.size();
  const double fd = static_cast<double>(f);
  // Substrings interned so repeats within a split can be counted.
  std::map<std::string, std::size_t> ids;
  std::vector<double> counts;
  std::vector<double> lengths;
  std::vector<std::vector<std::size_t>> id(n, std::vector<std::size_t>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j <= n; ++j) {
      auto text = Concat(chars, i, j);
      const auto [it, fresh] = ids.emplace(text, counts.size());
      if (fresh) {
        counts.push_back(static_cast<double>(state.Count(text)));
        lengths.push_back(static_cast<double>(j - i));
      }
      id[i][j] = it->second;
    }
  }
  const auto tokens = static_cast<double>(state.tokens());
  std::vector<std::size_t> pieces;
  std::vector<std::pair<std::size_t, int>> distinct;
  double best_cost = kInfinity;
  std::uint64_t best_mask = 0;
  const std::uint64_t masks = std::uint64_t{1} << (n - 1);
  for (std::uint64_t mask = 0; mask < masks; ++mask) {
    pieces.clear();
    std::size_t start = 0;
    for (std::size_t b = 1; b <= n; ++b) {
      if (b == n || (mask >> (b - 1) & 1)) {
        pieces.push_back(id[start][b]);
        start = b;
      }
    }
    distinct.clear();
    for (const auto p : pieces) {
      auto it = std::find_if(distinct.begin(), distinct.end(),
                             [&](const auto& d) { return d.first == p; });
      if (it == distinct.end()) {
        distinct.emplace_back(p, 1);
      } else {
        ++it->second;
      }
    }
    double cost = XLogX(tokens + fd * static_cast<double>(pieces.size()));
    for (const auto& [p, r] : distinct) {
      const double c = counts[p];
      cost -= XLogX(c + fd * r) - XLogX(c);
      if (c == 0) cost += lengths[p] * state.CharCost();
    }
    // Ties go to the longer leading morph.
    const double tolerance = 1e-9 * std::max(1.0, std::abs(cost));
    if (cost < best_cost - tolerance ||
        (cost <= best_cost + tolerance && LongerLead(mask, best_mask, n))) {
      best_cost = std::min(cost, best_cost);
      best_mask = mask;
    }
  }
  Morphs out;
  std::size_t start = 0;
  for (std::size_t b = 1; b <= n; ++b) {
    if (b == n || (best_mask >> (b - 1) & 1)) {
      out.push_back(Concat(chars, start, b));
      start = b;
    }
  }
  return out;
}

}  // namespace

MdlModel::MdlModel(std::map<std::string, WordEntry> words, double corpusweight,
                   bool vocab_constrained)
    : words_(std::move(words)),
      corpusweight_(corpusweight),
      vocab_constrained_(vocab_constrained) {
  if (!(corpusweight_ > 0)) throw std::invalid_argument("corpusweight must be > 0");
  for (const auto& [word, entry] : words_) {
    std::string joined;
    for (const auto& m : entry.morphs) {
      if (m.empty()) throw std::invalid_argument("empty morph for " + word);
      joined += m;
      lexicon_[m] += entry.freq;
      max_morph_chars_ = std::max(max_morph_chars_, utf8::Length(m));
    }
    if (joined != word || entry.freq <= 0) {
      throw std::invalid_argument("inconsistent segmentation for " + word);
    }
    morph_tokens_ += entry.freq * static_cast<std::int64_t>(entry.morphs.size());
  }
  alphabet_ = AlphabetOf(words_);
  total_cost_ = CorpusCost() + corpusweight_ * LexiconCost();
}

double MdlModel::CorpusCost() const {
  double cost = XLogX(static_cast<double>(morph_tokens_));
  for (const auto& [morph, count] : lexicon_) cost -= XLogX(static_cast<double>(count));
  return cost;
}

double MdlModel::LexiconCost() const {
  std::int64_t chars = 0;
  for (const auto& [morph, count] : lexicon_) {
    chars += static_cast<std::int64_t>(utf8::Length(morph));
  }
  return static_cast<double>(chars) * CharCodeLength(alphabet_.size());
}

std::size_t MdlModel::ProducibleSymbolCount() const {
  std::size_t count = lexicon_.size();
  for (const auto& c : alphabet_) count += lexicon_.count(c) ? 0 : 1;
  return count;
}

double MdlModel::MorphCost(std::string_view morph) const {
  const auto it = lexicon_.find(std::string(morph));
  const double n = static_cast<double>(morph_tokens_);
  if (it != lexicon_.end()) return std::log(n) - std::log(static_cast<double>(it->second));
  if (!morph.empty() && utf8::Length(morph) == 1) return std::log(2.0 * (n + 1.0));
  return kInfinity;
}

Morphs MdlModel::Viterbi(std::string_view word) const {
  const auto chars = utf8::SplitChars(word);
  return MinCostSegmentation(chars, max_morph_chars_,
                             [this](const std::string& m) { return MorphCost(m); });
}

Morphs MdlModel::Segment(std::string_view word) const {
  const auto it = words_.find(std::string(word));
  if (it != words_.end()) return it->second.morphs;
  return Viterbi(word);
}

double SegmentationCost(const std::map<std::string, MdlModel::WordEntry>& words,
                        double corpusweight) {
  return MdlModel(words, corpusweight).total_cost();
}

namespace {

using WordMap = std::map<std::string, MdlModel::WordEntry>;
using WordRef = WordMap::iterator;

// Words up to kMaxEnumerateChars get the exact per-word optimum, words up to
// kMaxDpChars a dynamic-programming approximation; longer words are only
// re-split recursively.
constexpr std::size_t kMaxEnumerateChars = 8;
constexpr std::size_t kMaxDpChars = 24;

// Greedy coordinate descent: re-splits each word of `order` given all other
// words until an epoch changes nothing. `state` holds the cost of the whole
// current segmentation.
void Descend(std::vector<WordRef> order, CostState& state, std::mt19937_64& rng,
             int max_epochs, std::vector<double>* trace) {
  for (int epoch = 0; epoch < max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    bool changed = false;
    for (auto it : order) {
      auto& entry = it->second;
      const double before = state.Cost();
      state.RemoveAll(entry.morphs, entry.freq);
      const auto chars = utf8::SplitChars(it->first);
      Morphs candidate;
      Resplit(chars, entry.freq, &state, &candidate);
      double after = state.Cost();
      if (chars.size() <= kMaxDpChars) {
        state.RemoveAll(candidate, entry.freq);
        auto exact = chars.size() <= kMaxEnumerateChars
                         ? EnumerateSplit(chars, entry.freq, state)
                         : DpSplit(chars, entry.freq, state);
        state.AddAll(exact, entry.freq);
        const double exact_cost = state.Cost();
        if (exact_cost < after - 1e-12) {
          candidate = std::move(exact);
          after = exact_cost;
        } else {
          state.RemoveAll(exact, entry.freq);
          state.AddAll(candidate, entry.freq);
        }
      }
      if (candidate == entry.morphs) continue;
      // Only strict improvements, so equal-cost alternatives cannot cycle.
      if (after > before - 1e-9 * std::max(1.0, std::abs(before))) {
        state.RemoveAll(candidate, entry.freq);
        state.AddAll(entry.morphs, entry.freq);
        continue;
      }
      entry.morphs = std::move(candidate);
      changed = true;
      if (trace) trace->push_back(after);
    }
    if (!changed) break;
  }
}

Morphs RandomSplit(std::string_view word, std::mt19937_64& rng) {
  const auto chars = utf8::SplitChars(word);
  Morphs morphs(1, chars.front());
  for (std::size_t i = 1; i < chars.size(); ++i) {
    if (rng() & 1) morphs.emplace_back();
    morphs.back() += chars[i];
  }
  return morphs;
}

enum class KickKind { kSplitSuffix, kSplitPrefix, kJoin, kExplode };

// A collective move applied to every word at once.
struct Kick {
  KickKind kind;
  std::string first;
  std::string second;
};

Morphs Kicked(const Morphs& morphs, const Kick& kick) {
  Morphs out;
  for (const auto& m : morphs) {
    switch (kick.kind) {
      case KickKind::kSplitSuffix:
        if (m.size() > kick.first.size() && m.ends_with(kick.first)) {
          out.push_back(m.substr(0, m.size() - kick.first.size()));
          out.push_back(kick.first);
          continue;
        }
        break;
      case KickKind::kSplitPrefix:
        if (m.size() > kick.first.size() && m.starts_with(kick.first)) {
          out.push_back(kick.first);
          out.push_back(m.substr(kick.first.size()));
          continue;
        }
        break;
      case KickKind::kJoin:
        if (!out.empty() && out.back() == kick.first && m == kick.second) {
          out.back() += m;
          continue;
        }
        break;
      case KickKind::kExplode:
        if (m == kick.first) {
          for (auto& c : utf8::SplitChars(m)) out.push_back(std::move(c));
          continue;
        }
        break;
    }
    out.push_back(m);
  }
  return out;
}

// Candidate kicks of each kind, most widely shared first, at most `limit`
// per kind.
std::vector<Kick> CandidateKicks(const WordMap& words, std::size_t limit) {
  std::map<std::string, std::int64_t> lexicon;
  std::map<std::pair<std::string, std::string>, std::int64_t> bigrams;
  for (const auto& [word, entry] : words) {
    for (std::size_t i = 0; i < entry.morphs.size(); ++i) {
      lexicon[entry.morphs[i]] += entry.freq;
      if (i > 0) bigrams[{entry.morphs[i - 1], entry.morphs[i]}] += entry.freq;
    }
  }
  std::map<std::string, std::int64_t> suffixes;
  std::map<std::string, std::int64_t> prefixes;
  for (const auto& [m, count] : lexicon) {
    const auto chars = utf8::SplitChars(m);
    for (std::size_t i = 1; i < chars.size(); ++i) {
      ++suffixes[Concat(chars, i, chars.size())];
      ++prefixes[Concat(chars, 0, i)];
    }
  }
  std::vector<Kick> out;
  const auto take = [&](auto ranked, auto make) {
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (std::size_t i = 0; i < ranked.size() && i < limit; ++i) out.push_back(make(ranked[i].first));
  };
  const auto shared = [](const std::map<std::string, std::int64_t>& m) {
    std::vector<std::pair<std::string, std::int64_t>> v;
    for (const auto& [k, n] : m) {
      if (n >= 2) v.emplace_back(k, n);
    }
    return v;
  };
  take(shared(suffixes), [](const std::string& a) { return Kick{KickKind::kSplitSuffix, a, {}}; });
  take(shared(prefixes), [](const std::string& a) { return Kick{KickKind::kSplitPrefix, a, {}}; });
  std::vector<std::pair<std::pair<std::string, std::string>, std::int64_t>> pairs;
  for (const auto& [k, n] : bigrams) {
    if (n >= 2) pairs.emplace_back(k, n);
  }
  take(pairs, [](const std::pair<std::string, std::string>& p) {
    return Kick{KickKind::kJoin, p.first, p.second};
  });
  std::vector<std::pair<std::string, std::int64_t>> longs;
  for (const auto& [m, n] : lexicon) {
    if (utf8::Length(m) >= 3) longs.emplace_back(m, n);
  }
  take(longs, [](const std::string& m) { return Kick{KickKind::kExplode, m, {}}; });
  return out;
}

// Above this many new morphs a kick re-descends only the words it changed.
constexpr std::size_t kMaxNeighbourMorphs = 64;

// Iterated local search: apply a collective move, descend over the words it
// touched (and, for small moves, every word containing a morph it created),
// and keep the result when the total cost drops.
void ApplyKicks(WordMap& words, CostState& state, std::mt19937_64& rng,
                const TrainOptions& options, std::vector<double>& trace) {
  for (int round = 0; round < options.kick_rounds; ++round) {
    bool improved = false;
    for (const auto& kick : CandidateKicks(words, options.max_kicks)) {
      const double before = state.Cost();
      std::vector<std::pair<WordRef, Morphs>> changes;
      for (auto it = words.begin(); it != words.end(); ++it) {
        auto next = Kicked(it->second.morphs, kick);
        if (next != it->second.morphs) changes.emplace_back(it, std::move(next));
      }
      if (changes.empty() || changes.size() > options.max_kick_words) continue;
      std::vector<std::pair<WordRef, Morphs>> saved;
      std::set<std::string> created;
      for (auto& [it, next] : changes) {
        state.RemoveAll(it->second.morphs, it->second.freq);
        state.AddAll(next, it->second.freq);
        for (const auto& m : next) created.insert(m);
        saved.emplace_back(it, std::exchange(it->second.morphs, std::move(next)));
      }

      std::vector<WordRef> scope;
      for (const auto& [it, old] : saved) scope.push_back(it);
      if (created.size() <= kMaxNeighbourMorphs) {
        std::set<std::string> touched;
        for (const auto& [it, old] : saved) touched.insert(it->first);
        std::vector<WordRef> neighbours;
        for (auto it = words.begin(); it != words.end(); ++it) {
          if (touched.count(it->first)) continue;
          const bool contains = std::any_of(created.begin(), created.end(), [&](const auto& m) {
            return utf8::Length(m) > 1 && it->first.size() > m.size() &&
                   it->first.find(m) != std::string::npos;
          });
          if (contains) neighbours.push_back(it);
        }
        if (scope.size() + neighbours.size() <= options.max_kick_words) {
          for (auto it : neighbours) {
            saved.emplace_back(it, it->second.morphs);
            scope.push_back(it);
          }
        }
      }
      Descend(scope, state, rng, options.max_epochs, nullptr);
      if (state.Cost() < before - 1e-9 * std::max(1.0, std::abs(before))) {
        trace.push_back(state.Cost());
        improved = true;
        continue;
      }
      for (auto& [it, old] : saved) {
        state.RemoveAll(it->second.morphs, it->second.freq);
        state.AddAll(old, it->second.freq);
        it->second.morphs = std::move(old);
      }
    }
    if (!improved) break;
  }
}

// Moves the character c leftwards across every boundary whose right morph
// starts with c, keeping each move that does not raise the cost. Breaks ties
// between equal-cost segmentations towards longer leading morphs.
void ShiftTies(WordMap& words, CostState& state, const TrainOptions& options) {
  const auto shifted = [](const Morphs& morphs, const std::string& c) {
    Morphs out = morphs;
    for (std::size_t i = 1; i < out.size(); ++i) {
      if (out[i].size() > c.size() && out[i].starts_with(c)) {
        out[i - 1] += c;
        out[i].erase(0, c.size());
      }
    }
    return out;
  };
  bool moved = true;
  while (moved) {
    moved = false;
    std::set<std::string> leads;
    for (const auto& [word, entry] : words) {
      for (std::size_t i = 1; i < entry.morphs.size(); ++i) {
        const auto& m = entry.morphs[i];
        if (utf8::Length(m) > 1) leads.insert(utf8::SplitChars(m).front());
      }
    }
    for (const auto& c : leads) {
      std::vector<std::pair<WordRef, Morphs>> saved;
      for (auto it = words.begin(); it != words.end(); ++it) {
        auto next = shifted(it->second.morphs, c);
        if (next != it->second.morphs) saved.emplace_back(it, std::move(next));
      }
      if (saved.empty() || saved.size() > options.max_kick_words) continue;
      const double before = state.Cost();
      for (auto& [it, next] : saved) {
        state.RemoveAll(it->second.morphs, it->second.freq);
        state.AddAll(next, it->second.freq);
        std::swap(it->second.morphs, next);
      }
      if (state.Cost() <= before + 1e-9 * std::max(1.0, std::abs(before))) {
        moved = true;
        continue;
      }
      for (auto& [it, old] : saved) {
        state.RemoveAll(it->second.morphs, it->second.freq);
        state.AddAll(old, it->second.freq);
        it->second.morphs = std::move(old);
      }
    }
  }
}

}  // namespace

MdlModel TrainMdl(const FrequencyTable& freq, double corpusweight,
                  std::uint64_t seed, const TrainOptions& options) {
  if (freq.empty()) throw std::invalid_argument("empty frequency table");
  if (!(corpusweight > 0)) throw std::invalid_argument("corpusweight must be > 0");
  if (options.restarts < 0 || options.kick_rounds < 0) {
    throw std::invalid_argument("negative restart or kick count");
  }

  WordMap whole;
  for (const auto& [word, count] : freq) whole[word] = {count, {word}};
  const auto alphabet_size = AlphabetOf(whole).size();

  WordMap best;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<double> best_trace;
  for (int run = 0; run <= options.restarts; ++run) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(run)};
    std::mt19937_64 rng(seq);
    WordMap words = whole;
    if (run == 1) {
      for (auto& [word, entry] : words) entry.morphs = utf8::SplitChars(word);
    } else if (run > 1) {
      for (auto& [word, entry] : words) entry.morphs = RandomSplit(word, rng);
    }
    CostState state(corpusweight, alphabet_size);
    std::vector<WordRef> order;
    for (auto it = words.begin(); it != words.end(); ++it) {
      state.AddAll(it->second.morphs, it->second.freq);
      order.push_back(it);
    }
    std::vector<double> trace = {state.Cost()};
    Descend(order, state, rng, options.max_epochs, &trace);
    // Recompute from scratch to drop accumulated rounding.
    const double cost = MdlModel(words, corpusweight).total_cost();
    if (cost < best_cost - 1e-9 * std::max(1.0, std::abs(cost))) {
      best_cost = cost;
      best = std::move(words);
      best_trace = std::move(trace);
    }
  }
  {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(options.restarts + 1)};
    std::mt19937_64 rng(seq);
    CostState state(corpusweight, alphabet_size);
    for (const auto& [word, entry] : best) state.AddAll(entry.morphs, entry.freq);
    ApplyKicks(best, state, rng, options, best_trace);
    ShiftTies(best, state, options);
  }
  if (options.cost_trace) {
    options.cost_trace->insert(options.cost_trace->end(), best_trace.begin(),
                               best_trace.end());
  }
  return MdlModel(std::move(best), corpusweight);
}

std::vector<std::size_t> Boundaries(std::span<const std::string> morphs) {
  std::vector<std::size_t> offsets;
  std::size_t pos = 0;
  for (std::size_t i = 0; i + 1 < morphs.size(); ++i) {
    pos += utf8::Length(morphs[i]);
    offsets.push_back(pos);
  }
  return offsets;
}

F1Report BoundaryF1(const std::map<std::string, Morphs>& predicted,
                    const GoldSegmentations& gold, AlternativePolicy policy) {
  F1Report report;
  for (const auto& [word, alternatives] : gold.entries) {
    const auto it = predicted.find(word);
    if (it == predicted.end()) {
      throw std::invalid_argument("no prediction for gold word " + word);
    }
    const auto pred = Boundaries(it->second);
    std::int64_t best_matched = 0;
    std::int64_t best_gold = 0;
    double best_f1 = -1.0;
    const std::size_t candidates =
        policy == AlternativePolicy::kFirst ? std::min<std::size_t>(1, alternatives.size())
                                            : alternatives.size();
    for (std::size_t a = 0; a < candidates; ++a) {
      const auto ref = Boundaries(alternatives[a]);
      std::vector<std::size_t> common;
      std::set_intersection(pred.begin(), pred.end(), ref.begin(), ref.end(),
                            std::back_inserter(common));
      const auto matched = static_cast<std::int64_t>(common.size());
      double f1;
      if (pred.empty() && ref.empty()) {
        f1 = 1.0;
      } else if (pred.empty() || ref.empty()) {
        f1 = 0.0;
      } else {
        f1 = 2.0 * static_cast<double>(matched) /
             static_cast<double>(pred.size() + ref.size());
      }
      if (f1 > best_f1) {
        best_f1 = f1;
        best_matched = matched;
        best_gold = static_cast<std::int64_t>(ref.size());
      }
    }
    report.predicted += static_cast<std::int64_t>(pred.size());
    report.gold += best_gold;
    report.matched += best_matched;
  }
  const auto ratio = [](std::int64_t num, std::int64_t den, bool other_empty) {
    if (den > 0) return static_cast<double>(num) / static_cast<double>(den);
    return other_empty ? 1.0 : 0.0;
  };
  report.precision = ratio(report.matched, report.predicted, report.gold == 0);
  report.recall = ratio(report.matched, report.gold, report.predicted == 0);
  const double sum = report.precision + report.recall;
  report.f1 = sum > 0 ? 2.0 * report.precision * report.recall / sum : 0.0;
  return report;
}

TuneResult TuneCorpusweight(const FrequencyTable& freq, const GoldSegmentations& gold,
                            std::span<const double> grid, std::uint64_t seed,
                            AlternativePolicy policy) {
  if (grid.empty()) throw std::invalid_argument("empty corpusweight grid");
  std::vector<std::optional<MdlModel>> models(grid.size());
  std::vector<F1Report> reports(grid.size());
  const auto n = static_cast<std::int64_t>(grid.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    models[idx].emplace(TrainMdl(freq, grid[idx], seed));
    std::map<std::string, Morphs> predicted;
    for (const auto& [word, alternatives] : gold.entries) {
      predicted[word] = models[idx]->Segment(word);
    }
    reports[idx] = BoundaryF1(predicted, gold, policy);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const bool better = reports[i].f1 > reports[best].f1 ||
                        (reports[i].f1 == reports[best].f1 && grid[i] < grid[best]);
    if (better) best = i;
  }
  TuneResult result{grid[best], {}, std::move(*models[best])};
  for (std::size_t i = 0; i < grid.size(); ++i) result.rows.push_back({grid[i], reports[i]});
  return result;
}

MdlModel ConstrainVocab(const MdlModel& model, std::int64_t max_vocab) {
  if (max_vocab < static_cast<std::int64_t>(model.alphabet().size())) {
    throw std::invalid_argument("vocabulary budget below alphabet size");
  }
  if (static_cast<std::int64_t>(model.ProducibleSymbolCount()) <= max_vocab) return model;

  auto words = model.words();
  std::map<std::string, std::int64_t> counts = model.lexicon();
  std::int64_t tokens = model.morph_tokens();
  std::unordered_map<std::string, std::set<std::string>> users;
  for (const auto& [word, entry] : words) {
    for (const auto& m : entry.morphs) users[m].insert(word);
  }
  // Removal order: rarest first, then longest, then lexicographic.
  using Key = std::tuple<std::int64_t, std::int64_t, std::string>;
  std::set<Key> queue;
  const auto key_of = [&](const std::string& m, std::int64_t count) {
    return Key{count, -static_cast<std::int64_t>(utf8::Length(m)), m};
  };
  for (const auto& [m, c] : counts) {
    if (utf8::Length(m) > 1) queue.insert(key_of(m, c));
  }
  const auto adjust = [&](const std::string& m, std::int64_t delta) {
    auto& c = counts[m];
    const bool multi = utf8::Length(m) > 1;
    if (multi && c > 0) queue.erase(key_of(m, c));
    c += delta;
    tokens += delta;
    if (c == 0) {
      counts.erase(m);
    } else if (multi) {
      queue.insert(key_of(m, c));
    }
  };

  std::size_t max_len = 1;
  for (const auto& [m, c] : counts) max_len = std::max(max_len, utf8::Length(m));

  const auto producible = [&] {
    auto n = static_cast<std::int64_t>(counts.size());
    for (const auto& c : model.alphabet()) n += counts.count(c) ? 0 : 1;
    return n;
  };
  while (producible() > max_vocab && !queue.empty()) {
    const std::string victim = std::get<2>(*queue.begin());
    const auto affected = users[victim];
    users.erase(victim);
    for (const auto& word : affected) {
      auto& entry = words[word];
      for (const auto& m : entry.morphs) {
        adjust(m, -entry.freq);
        if (m != victim) users[m].erase(word);
      }
    }
    const auto cost = [&](const std::string& m) {
      const auto it = counts.find(m);
      const double n = static_cast<double>(tokens);
      if (it != counts.end()) return std::log(n) - std::log(static_cast<double>(it->second));
      if (utf8::Length(m) == 1) return std::log(2.0 * (n + 1.0));
      return kInfinity;
    };
    for (const auto& word : affected) {
      auto& entry = words[word];
      entry.morphs = MinCostSegmentation(utf8::SplitChars(word), max_len, cost);
      for (const auto& m : entry.morphs) {
        adjust(m, entry.freq);
        users[m].insert(word);
      }
    }
  }
  return MdlModel(std::move(words), model.corpusweight(), true);
}

std::vector<std::string> RenderLmvrStyle(std::span<const std::string> morphs) {
  std::vector<std::string> pieces;
  pieces.reserve(morphs.size());
  for (std::size_t i = 0; i < morphs.size(); ++i) {
    pieces.push_back(i == 0 ? morphs[i] : "+" + morphs[i]);
  }
  return pieces;
}

std::string JoinLmvrStyle(std::span<const std::string> pieces) {
  std::string text;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& piece = pieces[i];
    if (piece.empty() || piece == "+") throw FormatError("empty morph piece");
    if (piece.front() == '+') {
      if (i == 0) throw FormatError("sequence starts with a continuation morph");
      text.append(piece, 1);
    } else {
      if (i > 0) text.push_back(' ');
      text.append(piece);
    }
  }
  return text;
}

namespace {

std::string FormatDouble(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace

void WriteModel(const MdlModel& model, std::ostream& out) {
  out << "#subwordbench-mdl v1 alpha=" << FormatDouble(model.corpusweight())
      << " vocab=" << model.lexicon().size() << '\n';
  std::vector<std::pair<std::string, std::int64_t>> entries(model.lexicon().begin(),
                                                            model.lexicon().end());
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  for (const auto& [morph, count] : entries) out << morph << '\t' << count << '\n';
  if (model.vocab_constrained()) {
    out << "#note vocabulary-constrained MDL segmentation (LMVR stand-in)\n";
  }
  out << "#words\n";
  for (const auto& [word, entry] : model.words()) {
    out << word << '\t' << entry.freq << '\t';
    for (std::size_t i = 0; i < entry.morphs.size(); ++i) {
      if (i > 0) out << ' ';
      out << entry.morphs[i];
    }
    out << '\n';
  }
}

MdlModel ReadModel(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing MDL model header");
  const auto header = SplitWhitespace(line);
  if (header.size() != 4 || header[0] != "#subwordbench-mdl" || header[1] != "v1" ||
      !header[2].starts_with("alpha=") || !header[3].starts_with("vocab=")) {
    throw FormatError("bad MDL model header: " + line);
  }
  double alpha = 0;
  const auto& a = header[2];
  const auto res = std::from_chars(a.data() + 6, a.data() + a.size(), alpha);
  if (res.ec != std::errc() || res.ptr != a.data() + a.size()) {
    throw FormatError("bad alpha in header: " + line);
  }
  std::map<std::string, std::int64_t> lexicon;
  std::map<std::string, MdlModel::WordEntry> words;
  bool constrained = false;
  bool in_words = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line == "#words") {
      in_words = true;
      continue;
    }
    if (line.starts_with("#note vocabulary-constrained")) {
      constrained = true;
      continue;
    }
    if (line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError("bad MDL model line: " + line);
    try {
      if (!in_words) {
        lexicon[line.substr(0, tab)] = std::stoll(line.substr(tab + 1));
        continue;
      }
      const auto tab2 = line.find('\t', tab + 1);
      if (tab2 == std::string::npos) throw FormatError("bad word line: " + line);
      MdlModel::WordEntry entry;
      entry.freq = std::stoll(line.substr(tab + 1, tab2 - tab - 1));
      entry.morphs = SplitWhitespace(std::string_view(line).substr(tab2 + 1));
      words[line.substr(0, tab)] = std::move(entry);
    } catch (const std::invalid_argument&) {
      throw FormatError("bad number in MDL model line: " + line);
    }
  }
  try {
    MdlModel model(std::move(words), alpha, constrained);
    if (model.lexicon() != lexicon) {
      throw FormatError("MDL lexicon does not match stored segmentations");
    }
    return model;
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("inconsistent MDL model: ") + e.what());
  }
}

void SaveModel(const MdlModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  WriteModel(model, out);
  if (!out) throw IoError("write error on " + path);
}

MdlModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return ReadModel(in);
}

}  // namespace subwordbench::morph
