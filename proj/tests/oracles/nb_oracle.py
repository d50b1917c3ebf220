#!/usr/bin/env python3
"""Exact multinomial Naive Bayes on the 5-row toy dataset, in rationals.

Writes priors, smoothed per-class feature probabilities and the posterior of
the probe vector computed directly (products, no logs). Also writes the
posteriors of a two-row set under alpha 1 and 2, where the argmax changes.

Usage: nb_oracle.py OUT.txt
"""
import sys
from fractions import Fraction

FEATURES = 50
ALPHA = Fraction(1)

# (label, {feature index: count}); must match the toy set in the tests.
TOY = [
    (2, {0: 2}),
    (2, {0: 1, 1: 1}),
    (4, {1: 3, 2: 1}),
    (4, {2: 2}),
    (3, {0: 1, 2: 1, 49: 4}),
]
PROBE = {0: 1, 1: 2, 2: 1, 49: 1}

SCALED = [(2, {1: 1}), (4, {0: 3})]
SCALED_PROBE = {0: 1, 1: 2}


def posteriors(rows, probe, alpha):
    classes = sorted({label for label, _ in rows})
    joint = {}
    for c in classes:
        sums = [0] * FEATURES
        for l, counts in rows:
            if l == c:
                for j, n in counts.items():
                    sums[j] += n
        total = sum(sums)
        p = Fraction(sum(1 for l, _ in rows if l == c), len(rows))
        for j, n in probe.items():
            p *= ((sums[j] + alpha) / (total + FEATURES * alpha)) ** n
        joint[c] = p
    evidence = sum(joint.values())
    return {c: joint[c] / evidence for c in classes}


def main():
    classes = sorted({label for label, _ in TOY})
    prior = {c: Fraction(sum(1 for l, _ in TOY if l == c), len(TOY)) for c in classes}
    prob = {}
    for c in classes:
        sums = [0] * FEATURES
        for l, counts in TOY:
            if l == c:
                for j, n in counts.items():
                    sums[j] += n
        total = sum(sums)
        prob[c] = [(sums[j] + ALPHA) / (total + FEATURES * ALPHA) for j in range(FEATURES)]
    joint = {}
    for c in classes:
        p = prior[c]
        for j, n in PROBE.items():
            p *= prob[c][j] ** n
        joint[c] = p
    evidence = sum(joint.values())
    with open(sys.argv[1], "w") as f:
        f.write("# kind level [feature] value  (exact rationals printed to 17 significant digits)\n")
        for c in classes:
            f.write(f"prior {c} {float(prior[c]):.17g}\n")
        for c in classes:
            for j in range(FEATURES):
                f.write(f"p {c} {j} {float(prob[c][j]):.17g}\n")
        for c in classes:
            f.write(f"posterior {c} {float(joint[c] / evidence):.17g}\n")
        for alpha in (1, 2):
            for c, p in posteriors(SCALED, SCALED_PROBE, Fraction(alpha)).items():
                f.write(f"scaled {c} {alpha} {float(p):.17g}\n")


if __name__ == "__main__":
    main()
