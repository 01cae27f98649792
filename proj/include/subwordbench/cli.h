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


#ifndef SUBWORDBENCH_CLI_H_
#define SUBWORDBENCH_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace subwordbench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitValidation = 3;

inline constexpr std::int64_t kDefaultMerges = 5000;
inline constexpr int kDefaultSeeds = 5;

// Runs one subcommand. `args` excludes the program name. Streams replace
// stdin/stdout/stderr so the entry point can be driven from tests.
int Run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

int Main(int argc, char** argv);

}  // namespace subwordbench::cli

#endif  // SUBWORDBENCH_CLI_H_
