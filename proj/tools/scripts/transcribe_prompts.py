#!/usr/bin/env python3
# Copyright 2026 The judgekit Authors
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerate tests/golden/*.txt from the LaTeX prompt boxes of a source document.

Usage: transcribe_prompts.py SOURCE.md OUTDIR
"""
import re
import sys


def boxes(src):
    return re.findall(r"\\begin\{promptbox\}\[([^\]]*)\].*?\n\\small\n(.*?)\n\\end\{promptbox\}", src, re.S)


def to_text(body):
    lines = []
    for raw in body.split("\n"):
        line = raw
        if line.endswith("\\\\"):
            line = line[:-2]
        line = line.replace("\\textcolor{red}{", "\x00")  # unwrap, closing brace handled below
        line = line.replace("\\texttt{\\textbackslash boxed\\{\\}}", "\\boxed{}")
        line = line.replace("$[$", "[").replace("$]$", "]")
        line = line.replace("$<$", "<").replace("$>$", ">")
        line = line.replace("\\{", "{").replace("\\}", "}").replace("\\_", "_")
        if "\x00" in line:
            head, rest = line.split("\x00", 1)
            # drop the first '}' that closes \textcolor (after the last '.' of the red span)
            idx = rest.find(".}")
            rest = rest[: idx + 1] + rest[idx + 2:]
            line = head + rest
        lines.append(line)
    return lines


def main():
    src = open(sys.argv[1], encoding="utf-8").read()
    out = sys.argv[2]
    found = {title: to_text(body) for title, body in boxes(src)}
    s2j = found["Prompt Template for S2J"]
    obj_i = next(i for i, l in enumerate(s2j) if "For objective tasks" in l)
    subj_i = next(i for i, l in enumerate(s2j) if "For subjective tasks" in l)
    head = s2j[:obj_i]
    obj_line = s2j[obj_i + 1]
    subj_line = s2j[subj_i + 1]
    tail = s2j[subj_i + 2:]
    variants = {
        "s2j_objective": head + [obj_line] + tail,
        "s2j_subjective": head + [subj_line] + tail,
        "baseline_instruct": found["Prompt for Qwen2.5-7B-Instruct"],
        "baseline_reasoner": found["Prompt for DeepSeek-R1-Distill-Qwen-7B"],
    }
    for name, lines in variants.items():
        with open(f"{out}/{name}.txt", "w", encoding="utf-8", newline="") as f:
            f.write("\n".join(lines))


if __name__ == "__main__":
    main()
