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

#ifndef SUBWORDBENCH_UTF8_H_
#define SUBWORDBENCH_UTF8_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace subwordbench::utf8 {

// Returns true if `text` is well-formed UTF-8 (no overlongs, no surrogates).
bool IsValid(std::string_view text);

// Splits `text` into one string per code point. Input must be valid UTF-8.
std::vector<std::string> SplitChars(std::string_view text);

// Number of code points in valid UTF-8 `text`.
std::size_t Length(std::string_view text);

// Simple (1:1) Unicode lowercase mapping of a single code point.
char32_t ToLower(char32_t cp);

// Lowercases every code point of valid UTF-8 `text`.
std::string ToLower(std::string_view text);

std::string Encode(char32_t cp);

}  // namespace subwordbench::utf8

#endif  // SUBWORDBENCH_UTF8_H_
