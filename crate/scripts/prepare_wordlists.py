#!/usr/bin/env python3
"""Regenerate the vendored word lists under data/.

Inputs (fetched once from the npm / PyPI mirrors):
  word-list 4.1.0 (npm, MIT)            -> words.txt
  pyspellchecker 0.9.1 (PyPI, MIT)      -> spellchecker/resources/en.json.gz
  @stdlib/datasets-moby-dick (npm)      -> data/data.txt (public-domain text)

Usage: prepare_wordlists.py WORDS_TXT PYSPELLCHECKER_WHL MOBY_TXT OUT_DIR
"""
import gzip
import json
import re
import shutil
import sys
import zipfile

ALPHA = re.compile(r"^[a-z]+$")


def inflection_stems(word):
    """Possible lemmas if `word` were a regular inflection."""
    out = []
    if word.endswith("ies") and len(word) > 4:
        out.append(word[:-3] + "y")
    if word.endswith("es") and len(word) > 3:
        out.append(word[:-2])
    if word.endswith("s") and not word.endswith("ss") and len(word) > 3:
        out.append(word[:-1])
    if word.endswith("ied") and len(word) > 4:
        out.append(word[:-3] + "y")
    if word.endswith("ed") and len(word) > 4:
        stem = word[:-2]
        out += [stem, stem + "e"]
        if len(stem) > 2 and stem[-1] == stem[-2]:
            out.append(stem[:-1])
    if word.endswith("ing") and len(word) > 5:
        stem = word[:-3]
        out += [stem, stem + "e"]
        if len(stem) > 2 and stem[-1] == stem[-2]:
            out.append(stem[:-1])
    return out


def main():
    words_txt, whl, moby, out = sys.argv[1:5]
    with zipfile.ZipFile(whl) as z:
        freq = json.loads(gzip.decompress(z.read("spellchecker/resources/en.json.gz")))
    ranked = [w for w, _ in sorted(freq.items(), key=lambda kv: (-kv[1], kv[0])) if ALPHA.match(w)]

    # Frequency ranks; the first 1000 lines double as the common-words list.
    with open(f"{out}/word_freq.txt", "w") as f:
        f.write("\n".join(ranked[:30000]) + "\n")
    with open(f"{out}/common_words.txt", "w") as f:
        f.write("\n".join(ranked[:1000]) + "\n")

    # Key dictionary: the encipherer's full-form dictionary (inflections included).
    listed = {w.strip() for w in open(words_txt) if ALPHA.match(w.strip())}
    known = {w for w, c in freq.items() if c >= 150}
    key = sorted((listed & known) | {"a", "i"})
    with open(f"{out}/key_dictionary.txt", "w") as f:
        f.write("\n".join(key) + "\n")

    # Reference dictionary: lemma-only list of frequent words, a different source.
    top = set(ranked[:32000])
    lemmas = sorted(w for w in top if not any(s in top for s in inflection_stems(w)))
    with open(f"{out}/reference_dictionary.txt", "w") as f:
        f.write("\n".join(lemmas) + "\n")

    shutil.copy(moby, f"{out}/moby_dick.txt")
    print(f"freq {min(30000, len(ranked))} key {len(key)} reference {len(lemmas)}")


if __name__ == "__main__":
    main()
