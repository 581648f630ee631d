#!/usr/bin/env python3
"""Regenerates tests/fixtures/synthetic200.libsvm (deterministic)."""
import math
import random
import sys

rng = random.Random(20240611)
dim = 8
w = [rng.gauss(0, 1) for _ in range(dim)]
lines = []
for _ in range(200):
    x = {j + 1: round(rng.gauss(0, 1), 6) for j in range(dim) if rng.random() < 0.75}
    margin = sum(w[j - 1] * v for j, v in x.items())
    p = 1 / (1 + math.exp(-2 * margin))
    label = 1 if rng.random() < p else 0
    feats = " ".join(f"{j}:{v:g}" for j, v in sorted(x.items()))
    lines.append(f"{label} {feats}".rstrip())
out = sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/synthetic200.libsvm"
with open(out, "w") as f:
    f.write("\n".join(lines) + "\n")
