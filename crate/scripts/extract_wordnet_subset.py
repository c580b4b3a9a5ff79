#!/usr/bin/env python3
"""Cut a self-consistent subset out of a WNDB 3.0 dictionary directory.

Usage: extract_wordnet_subset.py SRC_DICT OUT_DIR WORD...

Every index entry reachable from the given surface forms (directly, through
the exception lists, or through the detachment rules) is kept, together with
the data lines of its synsets and the index entries of each synset's first
lemma (one level deep), so that every listed offset has a data line.
"""
import os
import sys

POS = {"n": "noun", "v": "verb", "a": "adj", "r": "adv"}
RULES = {
    "n": [("s", ""), ("ses", "s"), ("ves", "f"), ("xes", "x"), ("zes", "z"),
          ("ches", "ch"), ("shes", "sh"), ("men", "man"), ("ies", "y")],
    "v": [("s", ""), ("ies", "y"), ("es", "e"), ("es", ""), ("ed", "e"),
          ("ed", ""), ("ing", "e"), ("ing", "")],
    "a": [("er", ""), ("est", ""), ("er", "e"), ("est", "e")],
    "r": [],
}


def read_lines(path):
    with open(path, encoding="latin-1") as f:
        return [l for l in f if not l.startswith("  ")]


def main():
    src, out, words = sys.argv[1], sys.argv[2], [w.lower() for w in sys.argv[3:]]
    index = {}
    data = {}
    exc = {}
    for p, name in POS.items():
        index[p] = {l.split()[0]: l for l in read_lines(os.path.join(src, "index." + name))}
        data[p] = {l.split()[0]: l for l in read_lines(os.path.join(src, "data." + name))}
        exc[p] = {}
        for l in read_lines(os.path.join(src, name + ".exc")):
            exc[p].setdefault(l.split()[0], l)

    keep_index = {p: set() for p in POS}
    keep_exc = {p: set() for p in POS}
    for w in words:
        for p in POS:
            cands = [w]
            if w in exc[p]:
                keep_exc[p].add(w)
                cands += exc[p][w].split()[1:]
            for suf, rep in RULES[p]:
                if w.endswith(suf):
                    cands.append(w[: len(w) - len(suf)] + rep)
            for c in cands:
                if c in index[p]:
                    keep_index[p].add(c)

    keep_data = {p: set() for p in POS}

    def add_offsets(p, lemma):
        line = index[p][lemma].split()
        cnt = int(line[2])
        keep_data[p].update(line[-cnt:])

    # One level of first-lemma closure: every synset of a directly reached
    # lemma can render its display name, and every listed offset has data.
    for p in POS:
        for lemma in list(keep_index[p]):
            add_offsets(p, lemma)
        for off in list(keep_data[p]):
            first = data[p][off].split()[4].lower()
            if "(" in first:
                first = first[: first.index("(")]
            if first in index[p]:
                keep_index[p].add(first)
        for lemma in list(keep_index[p]):
            add_offsets(p, lemma)

    os.makedirs(out, exist_ok=True)
    for p, name in POS.items():
        with open(os.path.join(out, "index." + name), "w", encoding="latin-1") as f:
            f.write("  1 WordNet 3.0 subset. See LICENSE in this directory.  \n")
            for lemma in sorted(keep_index[p]):
                f.write(index[p][lemma])
        with open(os.path.join(out, "data." + name), "w", encoding="latin-1") as f:
            f.write("  1 WordNet 3.0 subset. See LICENSE in this directory.  \n")
            for off in sorted(keep_data[p]):
                f.write(data[p][off])
        with open(os.path.join(out, name + ".exc"), "w", encoding="latin-1") as f:
            for w in sorted(keep_exc[p]):
                f.write(exc[p][w])


if __name__ == "__main__":
    main()
