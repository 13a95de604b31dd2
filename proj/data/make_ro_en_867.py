#!/usr/bin/env python3
# Copyright 2026 The pseudoref Authors
# SPDX-License-Identifier: Apache-2.0
"""Regenerates ro-en-867.tsv, a synthetic 867-segment RO-EN evaluation set,
and prints the mock failure-injection rate that fails exactly 461 ids."""
import random

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK = (1 << 64) - 1

SUBJECTS = [("Copilul", "The child"), ("Profesorul", "The teacher"), ("Medicul", "The doctor"),
            ("Vecinul meu", "My neighbour"), ("Sora mea", "My sister"), ("Primarul", "The mayor")]
VERBS = [("citește", "reads"), ("cumpără", "buys"), ("vede", "sees"), ("repară", "repairs"),
         ("caută", "is looking for"), ("vinde", "sells")]
OBJECTS = [("o carte", "a book"), ("o mașină", "a car"), ("un ziar", "a newspaper"),
           ("o casă", "a house"), ("un telefon", "a phone"), ("o bicicletă", "a bicycle")]
PLACES = [("în oraș", "in the city"), ("la piață", "at the market"), ("acasă", "at home"),
          ("la școală", "at school"), ("în parc", "in the park"), ("la birou", "at the office")]


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & MASK
    return h


def main():
    rng = random.Random(20260101)
    rows = []
    for i in range(1, 868):
        s, v, o, p = (rng.choice(SUBJECTS), rng.choice(VERBS), rng.choice(OBJECTS), rng.choice(PLACES))
        src = f"{s[0]} {v[0]} {o[0]} {p[0]}."
        words = [s[1], v[1], o[1], p[1]]
        quality = rng.random()
        if quality < 0.3:
            rng.shuffle(words)
        elif quality < 0.5:
            words[2] = rng.choice(OBJECTS)[1]
        mt = " ".join(words) + "."
        human = round(30 + 65 * quality + rng.uniform(-8, 8), 1)
        rows.append((f"ro-en-{i:04d}", "ro-en", src, mt, human, "synthetic"))
    with open("ro-en-867.tsv", "w", encoding="utf-8") as f:
        f.write("id\tlp\tsrc\tmt\thuman_score\tsystem\n")
        for r in rows:
            f.write("\t".join(str(x) for x in r) + "\n")
    buckets = sorted(fnv1a64(r[0].encode()) % 10**6 for r in rows)
    lo, hi = buckets[460], buckets[461]
    assert lo < hi
    rate = (lo + hi) / 2 / 1e6
    failed = sum(1 for b in buckets if b < rate * 1e6)
    print(f"461st bucket={lo} 462nd bucket={hi} rate={rate!r} failed={failed}")


if __name__ == "__main__":
    main()
