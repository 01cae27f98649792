#!/usr/bin/env python3
# Copyright 2026 The subwordbench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Emits src/case_table.inc: simple (1:1) Unicode lowercase mappings."""

import sys
import unicodedata

# Code points whose full lowercase mapping expands; their simple mapping.
SIMPLE_OVERRIDES = {0x0130: 0x0069}


def main():
    pairs = []
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        if cp in SIMPLE_OVERRIDES:
            pairs.append((cp, SIMPLE_OVERRIDES[cp]))
            continue
        lower = chr(cp).lower()
        if len(lower) == 1 and ord(lower) != cp:
            pairs.append((cp, ord(lower)))
    out = sys.stdout
    with open(__file__, encoding="utf-8") as self_file:
        header = self_file.read().splitlines()[1:14]
    for line in header:
        out.write(("//" + line[1:]).rstrip() + "\n")
    out.write("\n")
    out.write("// Generated by tools/gen_case_table.py from Unicode %s. Do not edit.\n"
              % unicodedata.unidata_version)
    for src, dst in pairs:
        out.write("{0x%04X, 0x%04X},\n" % (src, dst))


if __name__ == "__main__":
    main()
