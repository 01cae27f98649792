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


#include "subwordbench/cli.h"

#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "subwordbench/bayes.h"
#include "subwordbench/bpe.h"
#include "subwordbench/corpus.h"
#include "subwordbench/error.h"
#include "subwordbench/hybrid.h"
#include "subwordbench/metrics.h"
#include "subwordbench/morph.h"
#include "subwordbench/stats.h"
#include "subwordbench/utf8.h"

namespace subwordbench::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string scheme;
  std::int64_t merges = kDefaultMerges;
  std::int64_t vocab_budget = hybrid::kDefaultVocabBudget;
  std::string alpha_grid;
  std::uint64_t seed = 0;
  std::string metric;
  bool joint = false;
  bool lowercase = false;
  std::string gold;
  std::string analyses;
  std::int64_t max_suffixes = 500;
  std::string model;
  std::string input;
  std::string out;
  std::string hyp;
  std::string ref;
  std::string scores;
  std::string task;
  std::string method;
  std::string baseline = "Subword-NMT";
  int seeds = kDefaultSeeds;
  int chains = 4;
  int draws = 2000;
  int warmup = 2000;
  double max_rhat = 1.05;
  std::vector<std::string> inputs;
};

std::string Exact(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string Fixed(double value, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

std::string Pvalue(double p) { return p < 0.001 ? "<0.001" : Fixed(p, 3); }

// Left-aligned first column, right-aligned others.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void Add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  void Print(std::ostream& out) const {
    std::vector<std::size_t> width;
    for (const auto& row : rows_) {
      width.resize(std::max(width.size(), row.size()), 0);
      for (std::size_t c = 0; c < row.size(); ++c) {
        width[c] = std::max(width[c], utf8::Length(row[c]));
      }
    }
    for (const auto& row : rows_) {
      std::string line;
      for (std::size_t c = 0; c < row.size(); ++c) {
        const std::string pad(width[c] - utf8::Length(row[c]), ' ');
        if (c > 0) line += "  ";
        line += c == 0 ? row[c] + pad : pad + row[c];
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out << line << '\n';
    }
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

// Writes to a temporary file next to `path` and renames it into place on
// Commit, so failed runs leave no partial output. An empty path or "-"
// writes to `fallback`.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (path.empty() || path == "-") return;
    path_ = path;
    tmp_ = path + ".tmp." + std::to_string(::getpid());
    file_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!file_) throw IoError("cannot write " + path);
  }
  Output(const Output&) = delete;
  Output& operator=(const Output&) = delete;
  ~Output() {
    if (!tmp_.empty()) {
      file_.close();
      std::error_code ignored;
      fs::remove(tmp_, ignored);
    }
  }

  std::ostream& stream() { return path_.empty() ? fallback_ : file_; }

  void Commit() {
    if (path_.empty()) {
      fallback_.flush();
      return;
    }
    file_.close();
    if (!file_) throw IoError("write error on " + path_);
    std::error_code ec;
    fs::rename(tmp_, path_, ec);
    if (ec) throw IoError("cannot move output into " + path_ + ": " + ec.message());
    tmp_.clear();
  }

 private:
  std::ostream& fallback_;
  std::string path_;
  std::string tmp_;
  std::ofstream file_;
};

void RequireReadable(const std::string& path, std::string_view what) {
  if (path.empty()) throw UsageError(std::string(what) + " is required");
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open " + std::string(what) + " " + path);
}

void RequireWritableDir(const std::string& path) {
  if (path.empty() || path == "-") return;
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw IoError("output directory does not exist: " + parent.string());
  }
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read error in " + path);
  return ss.str();
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!utf8::IsValid(line)) {
      throw FormatError(path + ":" + std::to_string(lines.size() + 1) + ": invalid UTF-8");
    }
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw IoError("read error in " + path);
  return lines;
}

std::vector<double> ParseGrid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto fields = SplitWhitespace(field);
    if (fields.size() != 1) throw UsageError("bad --alpha-grid entry '" + field + "'");
    double value = 0.0;
    const auto* end = fields[0].data() + fields[0].size();
    const auto res = std::from_chars(fields[0].data(), end, value);
    if (res.ec != std::errc() || res.ptr != end || !(value > 0.0)) {
      throw UsageError("bad --alpha-grid entry '" + field + "'");
    }
    grid.push_back(value);
  }
  if (grid.empty()) throw UsageError("--alpha-grid is empty");
  return grid;
}

std::vector<stats::Metric> SelectMetrics(const Options& opt) {
  if (opt.metric.empty()) return {stats::Metric::kBleu, stats::Metric::kChrf3};
  try {
    return {stats::ParseMetric(opt.metric)};
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

using AnyModel = std::variant<bpe::BpeModel, morph::MdlModel, hybrid::HybridModel>;

AnyModel LoadAnyModel(const std::string& path) {
  std::istringstream in(Slurp(path));
  const std::string text = in.str();
  const auto starts = [&](std::string_view prefix) { return text.starts_with(prefix); };
  if (starts("#subwordbench-bpe ")) return bpe::ReadModel(in);
  if (starts("#subwordbench-mdl ")) return morph::ReadModel(in);
  if (starts("#subwordbench-hybrid ")) return hybrid::ReadModel(in);
  throw FormatError(path + ": not a subwordbench model file");
}

std::vector<std::string> SegmentLine(const AnyModel& model, std::string_view line) {
  return std::visit(
      [&](const auto& m) -> std::vector<std::string> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, morph::MdlModel>) {
          std::vector<std::string> pieces;
          for (const auto& word : SplitWhitespace(line)) {
            if (word.front() == '+') {
              throw std::invalid_argument("word starts with '+': " + word);
            }
            const auto morphs = m.Segment(word);
            for (auto& p : morph::RenderLmvrStyle(morphs)) pieces.push_back(std::move(p));
          }
          return pieces;
        } else {
          return m.Apply(line);
        }
      },
      model);
}

std::string DetokenizeLine(const AnyModel& model, std::string_view line) {
  const auto pieces = SplitWhitespace(line);
  return std::visit(
      [&](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, bpe::BpeModel>) {
          return bpe::Detokenize(pieces, m.mode(), m.boundary());
        } else if constexpr (std::is_same_v<T, morph::MdlModel>) {
          return morph::JoinLmvrStyle(pieces);
        } else {
          return hybrid::Detokenize(pieces);
        }
      },
      model);
}

// Line-by-line transform that preserves a missing final newline.
void StreamLines(std::istream& in, std::ostream& out, std::string_view source,
                 const std::function<std::string(std::string_view)>& transform) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!utf8::IsValid(line)) {
      throw FormatError(std::string(source) + ":" + std::to_string(number) +
                        ": invalid UTF-8");
    }
    try {
      out << transform(line);
    } catch (const FormatError& e) {
      throw FormatError(std::string(source) + ":" + std::to_string(number) + ": " +
                        e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string(source) + ":" + std::to_string(number) +
                                  ": " + e.what());
    }
    if (!in.eof()) out << '\n';
  }
  if (in.bad()) throw IoError("read error in " + std::string(source));
}

std::string JoinPieces(const std::vector<std::string>& pieces) {
  std::string line;
  for (const auto& p : pieces) {
    if (!line.empty()) line.push_back(' ');
    line += p;
  }
  return line;
}

int RunStream(const Options& opt, std::istream& stdin_stream, std::ostream& stdout_stream,
              bool segment) {
  RequireReadable(opt.model, "--model");
  if (!opt.input.empty() && opt.input != "-") RequireReadable(opt.input, "--in");
  RequireWritableDir(opt.out);
  const AnyModel model = LoadAnyModel(opt.model);
  std::ifstream file;
  std::istream* in = &stdin_stream;
  std::string source = "<stdin>";
  if (!opt.input.empty() && opt.input != "-") {
    file.open(opt.input, std::ios::binary);
    if (!file) throw IoError("cannot open " + opt.input);
    in = &file;
    source = opt.input;
  }
  Output output(opt.out, stdout_stream);
  StreamLines(*in, output.stream(), source, [&](std::string_view line) {
    return segment ? JoinPieces(SegmentLine(model, line)) : DetokenizeLine(model, line);
  });
  output.Commit();
  return kExitOk;
}

std::vector<TokenizedCorpus> LoadInputs(const Options& opt) {
  if (opt.inputs.empty()) throw UsageError("no training corpus given");
  if (opt.inputs.size() > 1 && !opt.joint) {
    throw UsageError("several corpora given; pass --joint to learn one joint model");
  }
  for (const auto& path : opt.inputs) RequireReadable(path, "corpus");
  std::vector<TokenizedCorpus> corpora;
  for (const auto& path : opt.inputs) corpora.push_back(LoadCorpus(path, opt.lowercase));
  return corpora;
}

FrequencyTable JointFrequencies(const std::vector<TokenizedCorpus>& corpora) {
  FrequencyTable freq;
  for (const auto& c : corpora) freq.Merge(CountFrequencies(c));
  if (freq.empty()) throw std::invalid_argument("training corpus is empty");
  return freq;
}

void PrintTuneRows(const morph::TuneResult& result, std::ostream& out) {
  TextTable table({"alpha", "precision", "recall", "F1"});
  for (const auto& row : result.rows) {
    const bool best = row.corpusweight == result.best_corpusweight;
    table.Add({Exact(row.corpusweight) + (best ? " *" : ""), Fixed(row.report.precision, 4),
               Fixed(row.report.recall, 4), Fixed(row.report.f1, 4)});
  }
  table.Print(out);
  out << "best alpha " << Exact(result.best_corpusweight) << ", "
      << result.best_model.lexicon().size() << " morphs\n";
}

morph::MdlModel LearnMdl(const Options& opt, const FrequencyTable& freq, std::ostream& out) {
  if (!opt.gold.empty()) {
    const auto gold = LoadGold(opt.gold);
    const std::vector<double> grid =
        opt.alpha_grid.empty()
            ? std::vector<double>(std::begin(morph::kDefaultAlphaGrid),
                                  std::end(morph::kDefaultAlphaGrid))
            : ParseGrid(opt.alpha_grid);
    auto result = morph::TuneCorpusweight(freq, gold, grid, opt.seed);
    PrintTuneRows(result, out);
    return std::move(result.best_model);
  }
  double alpha = 1.0;
  if (!opt.alpha_grid.empty()) {
    const auto grid = ParseGrid(opt.alpha_grid);
    if (grid.size() != 1) throw UsageError("several --alpha-grid values need --gold");
    alpha = grid.front();
  }
  return morph::TrainMdl(freq, alpha, opt.seed);
}

const std::vector<std::string>& Schemes() {
  static const std::vector<std::string> schemes = {"bpe-token", "bpe-sentence", "mdl",
                                                   "mdl-constrained", "hybrid"};
  return schemes;
}

int RunLearn(const Options& opt, std::ostream& out) {
  if (opt.scheme.empty()) throw UsageError("--scheme is required");
  if (opt.out.empty() || opt.out == "-") throw UsageError("-o/--out is required");
  if (opt.merges < 0) throw UsageError("--merges must be non-negative");
  if (opt.vocab_budget <= 0) throw UsageError("--vocab-budget must be positive");
  if (!opt.gold.empty()) RequireReadable(opt.gold, "--gold");
  if (!opt.analyses.empty()) RequireReadable(opt.analyses, "--analyses");
  if (!opt.gold.empty() && opt.scheme.rfind("mdl", 0) != 0) {
    throw UsageError("--gold applies to the mdl schemes only");
  }
  if (!opt.analyses.empty() && opt.scheme != "hybrid") {
    throw UsageError("--analyses applies to the hybrid scheme only");
  }
  RequireWritableDir(opt.out);
  const auto corpora = LoadInputs(opt);

  Output output(opt.out, out);
  if (opt.scheme == "bpe-token") {
    const auto model = bpe::LearnTokenBpe(JointFrequencies(corpora), opt.merges, opt.seed);
    bpe::WriteModel(model, output.stream());
    out << "learned " << model.merges().size() << " merges (" << opt.merges
        << " requested), " << model.Vocabulary().size() << " symbols\n";
  } else if (opt.scheme == "bpe-sentence") {
    TokenizedCorpus joint;
    for (const auto& c : corpora) {
      joint.sentences.insert(joint.sentences.end(), c.sentences.begin(), c.sentences.end());
    }
    if (joint.TokenCount() == 0) throw std::invalid_argument("training corpus is empty");
    const auto model = bpe::LearnSentenceBpe(joint, opt.merges, opt.seed);
    bpe::WriteModel(model, output.stream());
    out << "learned " << model.merges().size() << " merges (" << opt.merges
        << " requested), " << model.Vocabulary().size() << " symbols\n";
  } else if (opt.scheme == "mdl" || opt.scheme == "mdl-constrained") {
    auto model = LearnMdl(opt, JointFrequencies(corpora), out);
    if (opt.scheme == "mdl-constrained") model = morph::ConstrainVocab(model, opt.vocab_budget);
    morph::WriteModel(model, output.stream());
    out << "alpha " << Exact(model.corpusweight()) << ", " << model.lexicon().size()
        << " morphs\n";
  } else if (opt.scheme == "hybrid") {
    const auto freq = JointFrequencies(corpora);
    const auto analyses = opt.analyses.empty()
                              ? hybrid::LearnFallbackAnalyzer(freq, opt.max_suffixes)
                              : LoadAnalyses(opt.analyses);
    const auto model = hybrid::BuildHybrid(analyses, freq, opt.vocab_budget, opt.seed);
    hybrid::WriteModel(model, output.stream());
    out << "stem merges " << model.stem_bpe().merges().size() << ", suffixes "
        << model.suffixes().size() << ", producible symbols "
        << model.ProducibleSymbolCount() << " (budget " << opt.vocab_budget << ")\n";
  } else {
    throw UsageError("unknown scheme '" + opt.scheme + "'");
  }
  output.Commit();
  return kExitOk;
}

int RunTune(const Options& opt, std::ostream& out) {
  RequireReadable(opt.gold, "--gold");
  RequireWritableDir(opt.out);
  const auto corpora = LoadInputs(opt);
  const auto freq = JointFrequencies(corpora);
  const auto gold = LoadGold(opt.gold);
  const std::vector<double> grid =
      opt.alpha_grid.empty() ? std::vector<double>(std::begin(morph::kDefaultAlphaGrid),
                                                   std::end(morph::kDefaultAlphaGrid))
                             : ParseGrid(opt.alpha_grid);
  const auto result = morph::TuneCorpusweight(freq, gold, grid, opt.seed);
  if (!opt.out.empty() && opt.out != "-") {
    Output output(opt.out, out);
    morph::WriteModel(result.best_model, output.stream());
    output.Commit();
  }
  PrintTuneRows(result, out);
  return kExitOk;
}

int RunScore(const Options& opt, std::ostream& out) {
  RequireReadable(opt.hyp, "--hyp");
  RequireReadable(opt.ref, "--ref");
  const bool to_file = !opt.out.empty() && opt.out != "-";
  if (to_file && (opt.task.empty() || opt.method.empty())) {
    throw UsageError("--task and --method are required with -o");
  }
  RequireWritableDir(opt.out);
  const auto metrics_wanted = SelectMetrics(opt);
  metrics::EvalPair pair{ReadLines(opt.hyp), ReadLines(opt.ref)};
  stats::ScoreTable table;
  for (const auto metric : metrics_wanted) {
    const double score = metric == stats::Metric::kBleu ? metrics::CorpusBleu(pair)
                                                        : metrics::Chrf(pair);
    out << stats::MetricName(metric) << ' ' << Fixed(score) << '\n';
    table.Add({opt.task, opt.method, static_cast<std::int64_t>(opt.seed), metric, score});
  }
  if (to_file) {
    Output output(opt.out, out);
    stats::WriteScoreTable(table, output.stream());
    output.Commit();
  }
  return kExitOk;
}

stats::ScoreTable LoadScores(const Options& opt) {
  RequireReadable(opt.scores, "--scores");
  return stats::LoadScoreTable(opt.scores);
}

void WarnSeedCounts(const stats::ScoreTable& table, stats::Metric metric, const Options& opt,
                    std::ostream& err) {
  for (const auto& t : table.tasks()) {
    for (const auto& m : table.methods()) {
      const auto n = table.Scores(t, m, metric).size();
      if (n != 0 && n != static_cast<std::size_t>(opt.seeds)) {
        err << "note: " << t << '/' << m << '/' << stats::MetricName(metric) << " has " << n
            << " seeds, expected " << opt.seeds << '\n';
      }
    }
  }
}

std::vector<std::string> TasksWith(const stats::ScoreTable& table, stats::Metric metric) {
  std::vector<std::string> tasks;
  for (const auto& t : table.tasks()) {
    for (const auto& m : table.methods()) {
      if (!table.Scores(t, m, metric).empty()) {
        tasks.push_back(t);
        break;
      }
    }
  }
  return tasks;
}

std::vector<stats::DunnReport> AllDunnReports(const stats::ScoreTable& table,
                                              std::span<const stats::Metric> metrics_wanted) {
  std::vector<stats::DunnReport> reports;
  for (const auto metric : metrics_wanted) {
    for (const auto& task : TasksWith(table, metric)) {
      reports.push_back(stats::DunnsTest(table, task, metric));
    }
  }
  return reports;
}

std::vector<stats::Metric> PresentMetrics(const stats::ScoreTable& table, const Options& opt) {
  std::vector<stats::Metric> present;
  for (const auto metric : SelectMetrics(opt)) {
    if (table.Has(metric)) present.push_back(metric);
  }
  if (present.empty()) throw std::invalid_argument("no scores for the requested metric");
  return present;
}

int RunCompare(const Options& opt, std::ostream& out, std::ostream& err) {
  RequireWritableDir(opt.out);
  const auto table = LoadScores(opt);
  const auto present = PresentMetrics(table, opt);
  for (const auto metric : present) WarnSeedCounts(table, metric, opt, err);
  const auto reports = AllDunnReports(table, present);

  std::ostringstream records;
  records << "metric,task,method,mean,sd,mean_rank,z,p,best,kw_h,kw_p\n";
  for (const auto metric : present) {
    out << "Dunn's test vs best method (unadjusted p), " << stats::MetricName(metric) << '\n';
    TextTable text({"task", "method", "mean", "sd", "z", "p", ""});
    for (const auto& report : reports) {
      if (report.metric != metric) continue;
      std::vector<std::vector<double>> groups;
      for (const auto& row : report.rows) {
        groups.push_back(table.Scores(report.task, row.method, metric));
      }
      const auto kw = stats::KruskalWallis(groups);
      for (const auto& row : report.rows) {
        const bool best = row.method == report.best_method;
        text.Add({report.task, row.method, Fixed(row.mean), Fixed(row.sd),
                  best ? "-" : Fixed(row.z), best ? "-" : Pvalue(row.p), best ? "best" : ""});
        records << stats::MetricName(metric) << ',' << report.task << ',' << row.method << ','
                << Exact(row.mean) << ',' << Exact(row.sd) << ',' << Exact(row.mean_rank)
                << ',' << Exact(row.z) << ',' << Exact(row.p) << ',' << (best ? 1 : 0) << ','
                << Exact(kw.h) << ',' << Exact(kw.p) << '\n';
      }
    }
    text.Print(out);
    out << '\n';
  }
  out << "best or tied with best (p > 0.05)\n";
  TextTable counts({"method", "count", "cells"});
  for (const auto& [method, count] : stats::BestCounts(table, reports)) {
    counts.Add({method, std::to_string(count), std::to_string(reports.size())});
  }
  counts.Print(out);

  if (!opt.out.empty() && opt.out != "-") {
    Output output(opt.out, out);
    output.stream() << records.str();
    output.Commit();
  }
  return kExitOk;
}

int RunReport(const Options& opt, std::ostream& out, std::ostream& err) {
  RequireWritableDir(opt.out);
  const auto table = LoadScores(opt);
  const auto present = PresentMetrics(table, opt);
  for (const auto metric : present) WarnSeedCounts(table, metric, opt, err);
  const auto reports = AllDunnReports(table, present);

  std::ostringstream records;
  records << "metric,task,method,n,mean,sd,best_or_tied\n";
  for (const auto metric : present) {
    out << "mean (sd) over seeds, " << stats::MetricName(metric)
        << "; * = best or tied with best\n";
    std::vector<std::string> header = {"task"};
    header.insert(header.end(), table.methods().begin(), table.methods().end());
    TextTable text(header);
    for (const auto& report : reports) {
      if (report.metric != metric) continue;
      std::vector<std::string> row = {report.task};
      for (const auto& m : table.methods()) {
        const auto it = std::find_if(report.rows.begin(), report.rows.end(),
                                     [&](const auto& r) { return r.method == m; });
        if (it == report.rows.end()) {
          row.push_back("-");
          continue;
        }
        const bool top = it->method == report.best_method || it->p > 0.05;
        row.push_back(Fixed(it->mean) + " (" + Fixed(it->sd) + ")" + (top ? "*" : " "));
        records << stats::MetricName(metric) << ',' << report.task << ',' << m << ','
                << table.Scores(report.task, m, metric).size() << ',' << Exact(it->mean)
                << ',' << Exact(it->sd) << ',' << (top ? 1 : 0) << '\n';
      }
      text.Add(std::move(row));
    }
    text.Print(out);
    out << '\n';
  }
  out << "times best or tied with best\n";
  std::vector<std::string> header = {"method"};
  for (const auto metric : present) header.emplace_back(stats::MetricName(metric));
  TextTable counts(header);
  std::vector<std::vector<std::pair<std::string, int>>> per_metric;
  for (const auto metric : present) {
    std::vector<stats::DunnReport> subset;
    for (const auto& r : reports) {
      if (r.metric == metric) subset.push_back(r);
    }
    per_metric.push_back(stats::BestCounts(table, subset));
  }
  for (std::size_t m = 0; m < table.methods().size(); ++m) {
    std::vector<std::string> row = {table.methods()[m]};
    for (const auto& c : per_metric) row.push_back(std::to_string(c[m].second));
    counts.Add(std::move(row));
  }
  counts.Print(out);

  if (!opt.out.empty() && opt.out != "-") {
    Output output(opt.out, out);
    output.stream() << records.str();
    output.Commit();
  }
  return kExitOk;
}

int RunBayes(const Options& opt, std::ostream& out) {
  RequireWritableDir(opt.out);
  if (opt.chains < 2 || opt.draws < 4 || opt.warmup < 0) {
    throw UsageError("need --chains >= 2, --draws >= 4, --warmup >= 0");
  }
  const auto table = LoadScores(opt);
  const auto metric = opt.metric.empty() ? stats::Metric::kBleu : SelectMetrics(opt).front();
  stats::SamplerConfig sampler;
  sampler.chains = opt.chains;
  sampler.draws = opt.draws;
  sampler.warmup = opt.warmup;
  sampler.seed = opt.seed;
  sampler.max_rhat = opt.max_rhat;
  const auto summary =
      stats::FitBayesLinear(table, metric, stats::PriorConfig::ForMetric(metric), sampler);
  const auto diffs = stats::PairwiseTau(summary, opt.baseline);

  out << "posterior, " << stats::MetricName(metric) << ", " << summary.chains << " chains x "
      << summary.draws_per_chain << " draws\n";
  TextTable text({"parameter", "mean", "sd", "rhat", "ess"});
  std::ostringstream records;
  records << "kind,name,mean,sd,rhat,ess\n";
  const auto add = [&](std::string_view kind, const std::vector<stats::ParameterSummary>& ps) {
    for (const auto& p : ps) {
      text.Add({p.name, Fixed(p.mean), Fixed(p.sd), Fixed(p.rhat, 3), Fixed(p.ess, 0)});
      records << kind << ',' << p.name << ',' << Exact(p.mean) << ',' << Exact(p.sd) << ','
              << Exact(p.rhat) << ',' << Exact(p.ess) << '\n';
    }
  };
  add("eta", summary.eta);
  add("tau", summary.tau);
  add("eps", summary.eps);
  text.Print(out);
  out << "\npairwise tau vs " << opt.baseline << '\n';
  TextTable pairwise({"comparison", "mean", "sd"});
  for (const auto& d : diffs) {
    if (d.method == opt.baseline) continue;
    const std::string name = d.method + " - " + opt.baseline;
    pairwise.Add({name, Fixed(d.mean), Fixed(d.sd)});
    records << "pairwise," << name << ',' << Exact(d.mean) << ',' << Exact(d.sd) << ",,\n";
  }
  pairwise.Print(out);

  if (!opt.out.empty() && opt.out != "-") {
    Output output(opt.out, out);
    output.stream() << records.str();
    output.Commit();
  }
  return kExitOk;
}

// `key = value` lines; '#' starts a comment. Returns argv-style flags for
// the options of `sub`, placed before the real arguments so flags win.
std::vector<std::string> ConfigArgs(const std::string& path, const CLI::App& sub) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::vector<std::string> args;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(number) + ": expected key = value");
    }
    const auto key_fields = SplitWhitespace(line.substr(0, eq));
    const auto value_fields = SplitWhitespace(line.substr(eq + 1));
    if (key_fields.size() != 1 || value_fields.size() != 1) {
      throw UsageError(path + ":" + std::to_string(number) + ": expected key = value");
    }
    const std::string flag = "--" + key_fields[0];
    const CLI::Option* option = nullptr;
    try {
      option = sub.get_option(flag);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError(path + ":" + std::to_string(number) + ": unknown key '" +
                       key_fields[0] + "' for " + sub.get_name());
    }
    if (option->get_expected_max() == 0) {
      const std::string& v = value_fields[0];
      if (v == "true" || v == "1" || v == "yes") {
        args.push_back(flag);
      } else if (v != "false" && v != "0" && v != "no") {
        throw UsageError(path + ":" + std::to_string(number) + ": bad boolean '" + v + "'");
      }
    } else {
      args.push_back(flag);
      args.push_back(value_fields[0]);
    }
  }
  return args;
}

std::uint64_t SeedFromEnvironment() {
  const char* env = std::getenv("SUBWORDBENCH_SEED");
  if (env == nullptr || *env == '\0') return 0;
  std::uint64_t seed = 0;
  const std::string_view text(env);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw UsageError("SUBWORDBENCH_SEED is not an unsigned integer: " + std::string(text));
  }
  return seed;
}

int Dispatch(const std::vector<std::string>& raw_args, std::istream& in, std::ostream& out,
             std::ostream& err) {
  Options opt;
  opt.seed = SeedFromEnvironment();

  CLI::App app{"Subword segmentation and score analysis toolkit", "subwordbench"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");
  std::string config_path;
  app.add_option("--config", config_path, "key = value file; flags override it");

  const auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", opt.seed, "Random seed (default $SUBWORDBENCH_SEED or 0)");
  };
  const auto add_out = [&](CLI::App* sub, const std::string& help) {
    sub->add_option("-o,--out", opt.out, help);
  };

  auto* learn = app.add_subcommand("learn", "Train a segmentation model");
  learn->add_option("--scheme", opt.scheme, "Segmentation scheme")
      ->check(CLI::IsMember(Schemes()));
  learn->add_option("--merges", opt.merges, "BPE merge operations")->capture_default_str();
  learn->add_option("--vocab-budget", opt.vocab_budget, "Per-language vocabulary budget")
      ->capture_default_str();
  learn->add_option("--alpha-grid", opt.alpha_grid, "Comma-separated corpusweight values");
  learn->add_option("--gold", opt.gold, "Gold segmentations for corpusweight tuning");
  learn->add_option("--analyses", opt.analyses, "Stem/suffix analyses for the hybrid");
  learn->add_option("--max-suffixes", opt.max_suffixes,
                    "Suffix inventory size when no analyses are given")
      ->capture_default_str();
  learn->add_flag("--joint", opt.joint, "Learn one model over all corpora");
  learn->add_flag("--lowercase", opt.lowercase, "Lowercase the training text");
  learn->add_option("corpora", opt.inputs, "Training corpora")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  add_seed(learn);
  add_out(learn, "Model file");

  auto* tune = app.add_subcommand("tune", "Tune the MDL corpusweight against gold");
  tune->add_option("--gold", opt.gold, "Gold segmentations")->required();
  tune->add_option("--alpha-grid", opt.alpha_grid, "Comma-separated corpusweight values");
  tune->add_flag("--joint", opt.joint, "Tune over all corpora together");
  tune->add_flag("--lowercase", opt.lowercase, "Lowercase the training text");
  tune->add_option("corpora", opt.inputs, "Training corpora")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  add_seed(tune);
  add_out(tune, "Write the best model here");

  auto* apply = app.add_subcommand("apply", "Segment text line by line");
  auto* detok = app.add_subcommand("detok", "Undo segmentation line by line");
  for (auto* sub : {apply, detok}) {
    sub->add_option("--model", opt.model, "Model file")->required();
    sub->add_option("--in", opt.input, "Input text (default stdin)");
    add_out(sub, "Output text (default stdout)");
  }

  auto* score = app.add_subcommand("score", "Score hypotheses against references");
  score->add_option("--hyp", opt.hyp, "Hypotheses, one per line")->required();
  score->add_option("--ref", opt.ref, "References, one per line")->required();
  score->add_option("--metric", opt.metric, "BLEU or CHRF3 (default both)");
  score->add_option("--task", opt.task, "Task label for the score file");
  score->add_option("--method", opt.method, "Method label for the score file");
  add_seed(score);
  add_out(score, "Score table (CSV)");

  auto* compare = app.add_subcommand("compare", "Dunn's test against the best method");
  auto* report = app.add_subcommand("report", "Per-task summary and best counts");
  for (auto* sub : {compare, report}) {
    sub->add_option("--scores", opt.scores, "Score table (CSV)")->required();
    sub->add_option("--metric", opt.metric, "BLEU or CHRF3 (default both)");
    sub->add_option("--seeds", opt.seeds, "Expected seeds per cell")->capture_default_str();
    add_out(sub, "Machine-readable records (CSV)");
  }

  auto* bayes = app.add_subcommand("bayes", "Fit the task + method linear model");
  bayes->add_option("--scores", opt.scores, "Score table (CSV)")->required();
  bayes->add_option("--metric", opt.metric, "BLEU or CHRF3")->default_str("BLEU");
  bayes->add_option("--chains", opt.chains, "Chains")->capture_default_str();
  bayes->add_option("--draws", opt.draws, "Post-warmup draws per chain")->capture_default_str();
  bayes->add_option("--warmup", opt.warmup, "Warmup iterations per chain")
      ->capture_default_str();
  bayes->add_option("--max-rhat", opt.max_rhat, "Convergence threshold")->capture_default_str();
  bayes->add_option("--baseline", opt.baseline, "Method for pairwise differences")
      ->capture_default_str();
  add_seed(bayes);
  add_out(bayes, "Posterior summary records (CSV)");

  // The config file is expanded into flags ahead of the command line.
  std::vector<std::string> args;
  std::string config_file;
  for (std::size_t i = 0; i < raw_args.size(); ++i) {
    if (raw_args[i] == "--config") {
      if (i + 1 == raw_args.size()) throw UsageError("--config needs a path");
      config_file = raw_args[++i];
    } else if (raw_args[i].rfind("--config=", 0) == 0) {
      config_file = raw_args[i].substr(9);
    } else {
      args.push_back(raw_args[i]);
    }
  }
  if (!config_file.empty()) {
    const auto it = std::find_if(args.begin(), args.end(),
                                 [](const std::string& a) { return !a.starts_with('-'); });
    if (it == args.end()) throw UsageError("--config needs a subcommand");
    const CLI::App* sub = nullptr;
    try {
      sub = app.get_subcommand(*it);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError("unknown subcommand '" + *it + "'");
    }
    auto extra = ConfigArgs(config_file, *sub);
    args.insert(it + 1, extra.begin(), extra.end());
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (learn->parsed()) return RunLearn(opt, out);
  if (tune->parsed()) return RunTune(opt, out);
  if (apply->parsed()) return RunStream(opt, in, out, true);
  if (detok->parsed()) return RunStream(opt, in, out, false);
  if (score->parsed()) return RunScore(opt, out);
  if (compare->parsed()) return RunCompare(opt, out, err);
  if (report->parsed()) return RunReport(opt, out, err);
  if (bayes->parsed()) return RunBayes(opt, out);
  throw UsageError("no subcommand");
}

}  // namespace

int Run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  try {
    return Dispatch(args, in, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

int Main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  std::vector<std::string> args(argv + 1, argv + argc);
  return Run(args, std::cin, std::cout, std::cerr);
}

}  // namespace subwordbench::cli
