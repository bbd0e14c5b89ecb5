#!/usr/bin/env python3
"""Regenerate crates/core/data/lexicon_tr.tsv.

Takes the most frequent Turkish words from the `wordfreq` package (pip
install wordfreq), keeps those spelled only with Turkish lowercase letters,
and adds the hand-curated review words listed in curated_words.txt. Words in
curated_misspellings.txt are removed, as is any ASCII-only spelling whose
Turkish-letter form is at least DEGRADED_RATIO times more frequent (degil for
değil). Counts are wordfreq frequencies scaled to occurrences per 10^8 words,
at least 1.
"""

import argparse
from pathlib import Path

from wordfreq import top_n_list, word_frequency

LETTERS = set("abcçdefgğhıijklmnoöprsştuüvyz")
ASCII_OF = str.maketrans("çğıöşü", "cgiosu")
DEGRADED_RATIO = 10
DATA = Path(__file__).resolve().parent.parent / "crates" / "core" / "data"


def count(word: str) -> int:
    return max(1, round(word_frequency(word, "tr") * 1e8))


def read_list(path: Path) -> list[str]:
    lines = (w.strip() for w in path.read_text(encoding="utf-8").splitlines())
    return [w for w in lines if w and not w.startswith("#")]


def drop_degraded(words: set[str]) -> set[str]:
    best: dict[str, int] = {}
    for w in words:
        if w.translate(ASCII_OF) != w:
            key = w.translate(ASCII_OF)
            best[key] = max(best.get(key, 0), count(w))
    return {w for w in words if count(w) * DEGRADED_RATIO > best.get(w, 0)}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--top", type=int, default=20000, help="frequency-ranked words to take")
    parser.add_argument("--curated", type=Path, default=DATA / "curated_words.txt")
    parser.add_argument("--misspellings", type=Path, default=DATA / "curated_misspellings.txt")
    parser.add_argument("--out", type=Path, default=DATA / "lexicon_tr.tsv")
    args = parser.parse_args()

    words = {w for w in top_n_list("tr", args.top) if w and set(w) <= LETTERS}
    words = drop_degraded(words)
    words.update(read_list(args.curated))
    words.difference_update(read_list(args.misspellings))
    bad = sorted(w for w in words if not set(w) <= LETTERS)
    if bad:
        raise SystemExit(f"curated words outside the alphabet: {bad}")
    lines = [f"{w}\t{count(w)}\n" for w in sorted(words)]
    args.out.write_text("".join(lines), encoding="utf-8")
    print(f"wrote {len(lines)} words to {args.out}")


if __name__ == "__main__":
    main()
