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

#include "subwordbench/corpus.h"

#include <fstream>
#include <numeric>
#include <sstream>

#include "subwordbench/error.h"
#include "subwordbench/utf8.h"

namespace subwordbench {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
         c == '\v';
}

std::string Where(std::string_view source, std::size_t line_no) {
  std::ostringstream os;
  os << source << ":" << line_no;
  return os.str();
}

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

void StripCarriageReturn(std::string* line) {
  if (!line->empty() && line->back() == '\r') line->pop_back();
}

// Strips edge '+' markers and a trailing Morpho Challenge `:LABEL` tag.
std::string CleanMorph(std::string_view morph, bool word_has_colon) {
  if (!word_has_colon) {
    const auto colon = morph.find(':');
    if (colon != std::string_view::npos && colon > 0) morph = morph.substr(0, colon);
  }
  while (!morph.empty() && morph.front() == '+') morph.remove_prefix(1);
  while (!morph.empty() && morph.back() == '+') morph.remove_suffix(1);
  return std::string(morph);
}

}  // namespace

std::int64_t TokenizedCorpus::TokenCount() const {
  return std::accumulate(
      sentences.begin(), sentences.end(), std::int64_t{0},
      [](std::int64_t acc, const Sentence& s) {
        return acc + static_cast<std::int64_t>(s.size());
      });
}

FrequencyTable::FrequencyTable(
    std::initializer_list<std::pair<const std::string, std::int64_t>> init) {
  for (const auto& [word, count] : init) Add(word, count);
}

void FrequencyTable::Add(const std::string& word, std::int64_t count) {
  if (count <= 0) throw std::invalid_argument("frequency must be positive");
  if (word.empty()) throw std::invalid_argument("empty word");
  entries_[word] += count;
  total_ += count;
}

void FrequencyTable::Merge(const FrequencyTable& other) {
  for (const auto& [word, count] : other) Add(word, count);
}

std::int64_t FrequencyTable::Count(const std::string& word) const {
  const auto it = entries_.find(word);
  return it == entries_.end() ? 0 : it->second;
}

std::vector<std::string> SplitWhitespace(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && IsSpace(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !IsSpace(line[i])) ++i;
    if (i > start) fields.emplace_back(line.substr(start, i - start));
  }
  return fields;
}

TokenizedCorpus ReadCorpus(std::istream& in, bool lowercase,
                           std::string_view source) {
  TokenizedCorpus corpus;
  corpus.lowercased = lowercase;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!utf8::IsValid(line)) {
      throw FormatError(Where(source, line_no) + ": invalid UTF-8");
    }
    Sentence tokens = SplitWhitespace(line);
    if (lowercase) {
      for (auto& token : tokens) token = utf8::ToLower(token);
    }
    corpus.sentences.push_back(std::move(tokens));
  }
  if (in.bad()) throw IoError("read error in " + std::string(source));
  return corpus;
}

TokenizedCorpus LoadCorpus(const std::string& path, bool lowercase) {
  auto in = OpenInput(path);
  return ReadCorpus(in, lowercase, path);
}

void WriteCorpus(const TokenizedCorpus& corpus, std::ostream& out) {
  for (const auto& sentence : corpus.sentences) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      if (i > 0) out << ' ';
      out << sentence[i];
    }
    out << '\n';
  }
}

void SaveCorpus(const TokenizedCorpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  WriteCorpus(corpus, out);
  if (!out) throw IoError("write error on " + path);
}

FrequencyTable CountFrequencies(const TokenizedCorpus& corpus) {
  FrequencyTable table;
  for (const auto& sentence : corpus.sentences) {
    for (const auto& token : sentence) table.Add(token);
  }
  return table;
}

GoldSegmentations ReadGold(std::istream& in, std::string_view source) {
  GoldSegmentations gold;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCarriageReturn(&line);
    if (line.empty()) continue;
    if (!utf8::IsValid(line)) {
      throw FormatError(Where(source, line_no) + ": invalid UTF-8");
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError(Where(source, line_no) + ": missing TAB separator");
    }
    const std::string word = line.substr(0, tab);
    if (word.empty()) throw FormatError(Where(source, line_no) + ": empty word");
    const bool word_has_colon = word.find(':') != std::string::npos;

    std::vector<Morphs> alternatives;
    std::string_view rest = std::string_view(line).substr(tab + 1);
    while (true) {
      const auto sep = rest.find(", ");
      const std::string_view field = rest.substr(0, sep);
      Morphs morphs;
      for (const auto& raw : SplitWhitespace(field)) {
        std::string morph = CleanMorph(raw, word_has_colon);
        if (!morph.empty()) morphs.push_back(std::move(morph));
      }
      std::string joined;
      for (const auto& m : morphs) joined += m;
      if (morphs.empty() || joined != word) {
        throw FormatError(Where(source, line_no) + ": analysis '" +
                          std::string(field) + "' does not spell '" + word + "'");
      }
      alternatives.push_back(std::move(morphs));
      if (sep == std::string_view::npos) break;
      rest.remove_prefix(sep + 2);
    }
    auto& slot = gold.entries[word];
    for (auto& alt : alternatives) slot.push_back(std::move(alt));
  }
  return gold;
}

GoldSegmentations LoadGold(const std::string& path) {
  auto in = OpenInput(path);
  return ReadGold(in, path);
}

AnalysisTable ReadAnalyses(std::istream& in, std::string_view source) {
  AnalysisTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCarriageReturn(&line);
    if (line.empty()) continue;
    if (!utf8::IsValid(line)) {
      throw FormatError(Where(source, line_no) + ": invalid UTF-8");
    }
    const auto tab1 = line.find('\t');
    const auto tab2 =
        tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      throw FormatError(Where(source, line_no) +
                        ": expected word<TAB>stem<TAB>suffixes");
    }
    const std::string word = line.substr(0, tab1);
    WordAnalysis analysis;
    analysis.stem = line.substr(tab1 + 1, tab2 - tab1 - 1);
    for (auto& suffix : SplitWhitespace(std::string_view(line).substr(tab2 + 1))) {
      if (suffix.front() == '+') suffix.erase(0, 1);
      if (suffix.empty() || suffix.find('+') != std::string::npos) {
        throw FormatError(Where(source, line_no) + ": bad suffix for '" + word + "'");
      }
      analysis.suffixes.push_back(std::move(suffix));
    }
    std::string joined = analysis.stem;
    for (const auto& s : analysis.suffixes) joined += s;
    if (analysis.stem.empty() || joined != word) {
      throw FormatError(Where(source, line_no) + ": analysis of '" + word +
                        "' does not spell the word");
    }
    table.entries[word] = std::move(analysis);
  }
  return table;
}

AnalysisTable LoadAnalyses(const std::string& path) {
  auto in = OpenInput(path);
  return ReadAnalyses(in, path);
}

void WriteAnalyses(const AnalysisTable& table, std::ostream& out) {
  for (const auto& [word, analysis] : table.entries) {
    out << word << '\t' << analysis.stem << '\t';
    for (std::size_t i = 0; i < analysis.suffixes.size(); ++i) {
      if (i > 0) out << ' ';
      out << analysis.suffixes[i];
    }
    out << '\n';
  }
}

}  // namespace subwordbench
