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

#include "subwordbench/hybrid.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "subwordbench/error.h"
#include "subwordbench/utf8.h"

namespace subwordbench::hybrid {
namespace {

constexpr std::string_view kContinuation = bpe::kContinuation;

void CheckWord(std::string_view word) {
  if (word.empty()) throw std::invalid_argument("empty word");
  if (word.front() == '+') {
    throw std::invalid_argument("word starts with the suffix marker: " +
                                std::string(word));
  }
}

}  // namespace

HybridModel::HybridModel(bpe::BpeModel stem_bpe, std::set<std::string> suffixes,
                         AnalysisTable analyses, std::int64_t vocab_budget)
    : stem_bpe_(std::move(stem_bpe)),
      suffixes_(std::move(suffixes)),
      analyses_(std::move(analyses)),
      vocab_budget_(vocab_budget) {
  if (stem_bpe_.mode() != bpe::Mode::kToken) {
    throw std::invalid_argument("stem BPE must be token mode");
  }
  for (const auto& [word, analysis] : analyses_.entries) {
    for (const auto& s : analysis.suffixes) {
      if (!suffixes_.count(s)) {
        throw std::invalid_argument("suffix '" + s + "' missing from suffix set");
      }
    }
  }
}

std::size_t HybridModel::ProducibleSymbolCount() const {
  return stem_bpe_.Vocabulary().size() + suffixes_.size();
}

std::vector<std::string> HybridModel::Segment(std::string_view word) const {
  CheckWord(word);
  const auto it = analyses_.entries.find(std::string(word));
  if (it == analyses_.entries.end()) return stem_bpe_.SegmentWord(word);
  auto pieces = stem_bpe_.SegmentWord(it->second.stem);
  for (const auto& s : it->second.suffixes) pieces.push_back("+" + s);
  return pieces;
}

std::vector<std::string> HybridModel::Apply(std::string_view text) const {
  std::vector<std::string> pieces;
  for (const auto& word : SplitWhitespace(text)) {
    auto segmented = Segment(word);
    pieces.insert(pieces.end(), std::make_move_iterator(segmented.begin()),
                  std::make_move_iterator(segmented.end()));
  }
  return pieces;
}

HybridModel BuildHybrid(const AnalysisTable& analyses, const FrequencyTable& freq,
                        std::int64_t vocab_budget, std::uint64_t seed) {
  std::set<std::string> suffixes;
  for (const auto& [word, analysis] : analyses.entries) {
    suffixes.insert(analysis.suffixes.begin(), analysis.suffixes.end());
  }
  FrequencyTable stems;
  for (const auto& [word, count] : freq) {
    CheckWord(word);
    const auto it = analyses.entries.find(word);
    stems.Add(it == analyses.entries.end() ? word : it->second.stem, count);
  }
  for (const auto& [word, analysis] : analyses.entries) {
    if (freq.Count(word) == 0) stems.Add(analysis.stem, 1);
  }
  if (stems.empty()) throw std::invalid_argument("no stems to train on");

  std::set<std::string> alphabet;
  for (const auto& [stem, count] : stems) {
    for (auto& c : utf8::SplitChars(stem)) alphabet.insert(std::move(c));
  }
  const auto fixed = static_cast<std::int64_t>(alphabet.size() + suffixes.size());
  if (fixed >= vocab_budget) {
    throw std::invalid_argument("vocabulary budget " + std::to_string(vocab_budget) +
                                " cannot hold alphabet + suffixes (" +
                                std::to_string(fixed) + ")");
  }

  // Learn generously, then keep the longest merge prefix that fits; the
  // vocabulary only grows with more merges.
  const auto full = bpe::LearnTokenBpe(stems, 2 * vocab_budget, seed);
  const auto fits = [&](std::size_t k) {
    return static_cast<std::int64_t>(full.Truncated(k).Vocabulary().size() +
                                     suffixes.size()) < vocab_budget;
  };
  std::size_t lo = 0;
  std::size_t hi = full.merges().size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (fits(mid)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return HybridModel(full.Truncated(lo), std::move(suffixes), analyses, vocab_budget);
}

std::string Detokenize(std::span<const std::string> pieces) {
  std::string text;
  bool in_word = false;
  bool pending = false;
  for (const auto& piece : pieces) {
    if (piece.empty() || piece == kContinuation || (piece == "+" && !pending)) {
      throw FormatError("empty piece in hybrid sequence");
    }
    // After a continued piece, a leading '+' is part of the stem.
    if (piece.front() == '+' && !pending) {
      if (!in_word) throw FormatError("suffix piece without a stem: " + piece);
      text.append(piece, 1);
      continue;
    }
    if (in_word && !pending) text.push_back(' ');
    if (piece.ends_with(kContinuation)) {
      text.append(piece, 0, piece.size() - kContinuation.size());
      pending = true;
    } else {
      text.append(piece);
      pending = false;
    }
    in_word = true;
  }
  if (pending) throw FormatError("trailing continuation marker");
  return text;
}

std::string DetokenizeWord(std::span<const std::string> pieces) {
  auto word = Detokenize(pieces);
  if (word.find(' ') != std::string::npos) {
    throw FormatError("pieces do not form a single word");
  }
  return word;
}

AnalysisTable LearnFallbackAnalyzer(const FrequencyTable& freq,
                                    std::int64_t max_suffixes) {
  AnalysisTable table;
  if (freq.empty()) throw std::invalid_argument("empty frequency table");
  if (max_suffixes <= 0) return table;

  struct Score {
    std::int64_t pairs = 0;
    std::int64_t tokens = 0;
  };
  std::map<std::string, Score> scores;
  for (const auto& [word, count] : freq) {
    const auto chars = utf8::SplitChars(word);
    std::string suffix;
    for (std::size_t len = 1; len <= 5 && len < chars.size(); ++len) {
      suffix.insert(0, chars[chars.size() - len]);
      if (suffix.find('+') != std::string::npos) break;
      const std::string stem = word.substr(0, word.size() - suffix.size());
      const auto stem_count = freq.Count(stem);
      if (stem_count == 0) continue;
      auto& s = scores[suffix];
      ++s.pairs;
      s.tokens += count + stem_count;
    }
  }
  std::vector<std::tuple<std::int64_t, std::int64_t, std::string>> ranked;
  for (const auto& [suffix, s] : scores) {
    if (s.pairs >= 2) ranked.emplace_back(-s.pairs, -s.tokens, suffix);
  }
  std::sort(ranked.begin(), ranked.end());
  if (static_cast<std::int64_t>(ranked.size()) > max_suffixes) ranked.resize(max_suffixes);
  std::set<std::string> inventory;
  for (const auto& r : ranked) inventory.insert(std::get<2>(r));

  for (const auto& [word, count] : freq) {
    const auto chars = utf8::SplitChars(word);
    std::string suffix;
    std::string best;
    for (std::size_t len = 1; len <= 5 && len < chars.size(); ++len) {
      suffix.insert(0, chars[chars.size() - len]);
      if (!inventory.count(suffix)) continue;
      if (freq.Count(word.substr(0, word.size() - suffix.size())) > 0) best = suffix;
    }
    if (!best.empty()) {
      table.entries[word] = {word.substr(0, word.size() - best.size()), {best}};
    }
  }
  return table;
}

void WriteModel(const HybridModel& model, std::ostream& out) {
  out << "#subwordbench-hybrid v1 budget=" << model.vocab_budget() << '\n';
  bpe::WriteModel(model.stem_bpe(), out);
  out << "#suffixes\n";
  for (const auto& s : model.suffixes()) out << s << '\n';
  out << "#analyses\n";
  WriteAnalyses(model.analyses(), out);
}

HybridModel ReadModel(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing hybrid model header");
  const auto header = SplitWhitespace(line);
  if (header.size() != 3 || header[0] != "#subwordbench-hybrid" ||
      header[1] != "v1" || !header[2].starts_with("budget=")) {
    throw FormatError("bad hybrid model header: " + line);
  }
  std::int64_t budget = 0;
  try {
    budget = std::stoll(header[2].substr(7));
  } catch (const std::exception&) {
    throw FormatError("bad budget in header: " + line);
  }
  auto stem_bpe = bpe::ReadModel(in);
  if (!std::getline(in, line) || line != "#suffixes") {
    throw FormatError("expected #suffixes section");
  }
  std::set<std::string> suffixes;
  std::ostringstream analysis_lines;
  bool in_analyses = false;
  while (std::getline(in, line)) {
    if (!in_analyses && line == "#analyses") {
      in_analyses = true;
    } else if (in_analyses) {
      analysis_lines << line << '\n';
    } else if (!line.empty()) {
      suffixes.insert(line);
    }
  }
  if (!in_analyses) throw FormatError("expected #analyses section");
  std::istringstream analyses_in(analysis_lines.str());
  auto analyses = ReadAnalyses(analyses_in, "<hybrid model>");
  try {
    return HybridModel(std::move(stem_bpe), std::move(suffixes), std::move(analyses),
                       budget);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("inconsistent hybrid model: ") + e.what());
  }
}

void SaveModel(const HybridModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  WriteModel(model, out);
  if (!out) throw IoError("write error on " + path);
}

HybridModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return ReadModel(in);
}

}  // namespace subwordbench::hybrid
