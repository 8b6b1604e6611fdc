"""Generate high-precision Welch t-test reference values.

Run from the repository root:

    python3 tools/make_ttest_reference.py > tests/data/ttest_reference.json

Everything here is computed with mpmath at 50 decimal digits, using its
own mean/variance arithmetic and the incomplete-beta form of the t-tail,
so the file is an independent check on the library implementation.
"""
from __future__ import annotations

import json
import sys

import mpmath as mp

mp.mp.dps = 50

CASES = [
    ("spec_small", [2, 4, 6], [1, 2, 3]),
    ("reversed_means", [1, 2, 3], [2, 4, 6]),
    ("near_equal", [1.0, 1.1, 0.9, 1.05], [1.02, 0.98, 1.01, 1.0]),
    ("unequal_sizes", [5.2, 4.8, 5.1, 5.3, 4.9, 5.0, 5.2], [4.0, 4.4]),
    ("twenty_runs", [0.123, 0.118, 0.131, 0.125, 0.119, 0.127, 0.122,
                     0.129, 0.124, 0.121, 0.126, 0.120, 0.128, 0.123,
                     0.125, 0.122, 0.127, 0.124, 0.126, 0.121],
                    [0.021, 0.019, 0.024, 0.020, 0.022, 0.023, 0.018,
                     0.025, 0.021, 0.020, 0.022, 0.019, 0.023, 0.021,
                     0.024, 0.020, 0.022, 0.021, 0.019, 0.023]),
    ("tiny_effect", [0.5, 0.6, 0.4, 0.55, 0.45], [0.48, 0.58, 0.42, 0.53, 0.47]),
    ("big_negative_t", [0.0, 0.1, 0.05], [10.0, 10.2, 9.8, 10.1]),
    ("wide_vs_narrow", [3.0, -1.0, 5.0, 0.0, 4.0, -2.0, 6.0, 1.0],
                       [1.45, 1.55, 1.5, 1.52, 1.48]),
    ("kl_like_pair", [0.0412, 0.0388, 0.0421, 0.0395, 0.0407, 0.0399,
                      0.0415, 0.0391, 0.0404, 0.0410],
                     [0.0123, 0.0131, 0.0119, 0.0127, 0.0125, 0.0122,
                      0.0129, 0.0121, 0.0126, 0.0124]),
    ("two_by_two", [0.9, 1.3], [1.0, 1.1]),
]


def welch(sample_a, sample_b):
    a = [mp.mpf(v) for v in sample_a]
    b = [mp.mpf(v) for v in sample_b]
    na, nb = len(a), len(b)
    ma = mp.fsum(a) / na
    mb = mp.fsum(b) / nb
    va = mp.fsum((x - ma) ** 2 for x in a) / (na - 1)
    vb = mp.fsum((x - mb) ** 2 for x in b) / (nb - 1)
    se2 = va / na + vb / nb
    t = (ma - mb) / mp.sqrt(se2)
    df = se2 ** 2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    x = df / (df + t ** 2)
    tail = mp.betainc(df / 2, mp.mpf(1) / 2, 0, x, regularized=True) / 2
    p = tail if t >= 0 else 1 - tail
    return t, df, p


def main() -> None:
    out = []
    for name, a, b in CASES:
        t, df, p = welch(a, b)
        out.append({
            "name": name,
            "a": a,
            "b": b,
            "t": float(t),
            "df": float(df),
            "p": float(p),
        })
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
