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

#ifndef SUBWORDBENCH_CORPUS_H_
#define SUBWORDBENCH_CORPUS_H_

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace subwordbench {

using Sentence = std::vector<std::string>;

// Whitespace-tokenized text. Tokens are never empty and never contain
// ASCII whitespace.
struct TokenizedCorpus {
  std::vector<Sentence> sentences;
  bool lowercased = false;

  std::int64_t TokenCount() const;
  bool operator==(const TokenizedCorpus&) const = default;
};

// word -> positive count. Ordered so that iteration is deterministic.
class FrequencyTable {
 public:
  FrequencyTable() = default;
  FrequencyTable(std::initializer_list<std::pair<const std::string, std::int64_t>> init);

  // Adds `count` (> 0) occurrences of `word`.
  void Add(const std::string& word, std::int64_t count = 1);
  // Adds every entry of `other`; used to build joint source+target tables.
  void Merge(const FrequencyTable& other);

  std::int64_t Count(const std::string& word) const;
  std::int64_t Total() const { return total_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const std::map<std::string, std::int64_t>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  bool operator==(const FrequencyTable&) const = default;

 private:
  std::map<std::string, std::int64_t> entries_;
  std::int64_t total_ = 0;
};

using Morphs = std::vector<std::string>;

// word -> alternative reference analyses, in file order.
struct GoldSegmentations {
  std::map<std::string, std::vector<Morphs>> entries;
};

struct WordAnalysis {
  std::string stem;
  std::vector<std::string> suffixes;

  bool operator==(const WordAnalysis&) const = default;
};

// word -> stem + ordered suffixes, as produced by an external analyzer.
struct AnalysisTable {
  std::map<std::string, WordAnalysis> entries;

  bool operator==(const AnalysisTable&) const = default;
};

// Splits on ASCII whitespace, dropping empty fields.
std::vector<std::string> SplitWhitespace(std::string_view line);

// Reads one sentence per line. Throws FormatError naming the line on invalid
// UTF-8. `source` is used only in error messages.
TokenizedCorpus ReadCorpus(std::istream& in, bool lowercase,
                           std::string_view source = "<stream>");
TokenizedCorpus LoadCorpus(const std::string& path, bool lowercase);
void WriteCorpus(const TokenizedCorpus& corpus, std::ostream& out);
void SaveCorpus(const TokenizedCorpus& corpus, const std::string& path);

FrequencyTable CountFrequencies(const TokenizedCorpus& corpus);

// Gold lines: `word<TAB>morphs(, morphs)*`. Morphs are space separated;
// '+' at morph edges and Morpho Challenge `:LABEL` tags are dropped.
GoldSegmentations ReadGold(std::istream& in, std::string_view source = "<stream>");
GoldSegmentations LoadGold(const std::string& path);

// Analysis lines: `word<TAB>stem<TAB>suffix suffix ...`.
AnalysisTable ReadAnalyses(std::istream& in, std::string_view source = "<stream>");
AnalysisTable LoadAnalyses(const std::string& path);
void WriteAnalyses(const AnalysisTable& table, std::ostream& out);

}  // namespace subwordbench

#endif  // SUBWORDBENCH_CORPUS_H_
