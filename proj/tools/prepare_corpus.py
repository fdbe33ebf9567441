#!/usr/bin/env python3
# Copyright 2026 The aratok Authors
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
"""Regenerates data/corpus/ from the `quran-text` package (CC BY 4.0).

  pip install quran-text
  python3 tools/prepare_corpus.py data/corpus

Writes one verse per line in two renderings:
  quran_uthmani.txt  diacritized Uthmani script
  quran_imlaei.txt   modern (imlaei) spelling, undiacritized
"""

import json
import os
import sys

import quran_text

# The KFGQPC encoding writes sukun and the open tanwin forms with codepoints
# outside the standard harakat block; map them onto the standard marks.
TRANSCODE = str.maketrans({
    "\u06e1": "\u0652",
    "\u08f0": "\u064b",
    "\u08f1": "\u064c",
    "\u08f2": "\u064d",
})


def main(out_dir):
    data_path = os.path.join(os.path.dirname(quran_text.__file__),
                             "quran_text_data", "hafs.json")
    with open(data_path, encoding="utf-8") as f:
        data = json.load(f)
    words = data["words"]
    imlaei = data["rasm_imlai"]
    starts = data["ayah_starts"] + [len(words)]

    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "quran_uthmani.txt"), "w",
              encoding="utf-8", newline="\n") as uth, \
         open(os.path.join(out_dir, "quran_imlaei.txt"), "w",
              encoding="utf-8", newline="\n") as iml:
        for begin, end in zip(starts, starts[1:]):
            uth.write(" ".join(w.translate(TRANSCODE)
                               for w in words[begin:end] if w) + "\n")
            iml.write(" ".join(w for w in imlaei[begin:end] if w) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/corpus")
