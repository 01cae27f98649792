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


#ifndef SUBWORDBENCH_TESTS_TEST_FILES_H_
#define SUBWORDBENCH_TESTS_TEST_FILES_H_

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "subwordbench/cli.h"

namespace subwordbench::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("subwordbench_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ignored;
    std::filesystem::remove_all(path_, ignored);
  }
  std::string File(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

inline CliResult RunCli(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::Run(args, in, out, err);
  return {code, out.str(), err.str()};
}

// Deterministic text of `tokens` tokens drawn from stems plus suffixes.
inline std::string SyntheticCorpus(std::size_t tokens, std::uint64_t seed) {
  static const char* kStems[] = {"walk", "talk", "jump", "play",  "start", "algebra",
                                 "nation", "slow", "cent", "open", "being", "d\xD2\x9B"};
  static const char* kSuffixes[] = {"", "", "ed", "ing", "s", "ly", "ic", "er"};
  std::mt19937_64 rng(seed);
  std::string text;
  std::size_t emitted = 0;
  while (emitted < tokens) {
    const std::size_t n = std::min<std::size_t>(1 + rng() % 12, tokens - emitted);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) text += ' ';
      text += kStems[rng() % 12];
      text += kSuffixes[rng() % 8];
    }
    text += '\n';
    emitted += n;
  }
  return text;
}

}  // namespace subwordbench::testing

#endif  // SUBWORDBENCH_TESTS_TEST_FILES_H_
