#!/usr/bin/env python3
"""Brute-force reference values frozen into the C++ test suites.

Uses exact rational arithmetic where possible and mpmath for roots, with no
shared code path with the library. Run: python3 tests/oracle/hand_values.py
"""
from fractions import Fraction as F
from itertools import combinations
import mpmath as mp

mp.mp.dps = 40


def mpq(q):
    return mp.mpf(q.numerator) / q.denominator


def mean(xs):
    return sum(xs, F(0)) / len(xs)


def mad(xs):
    m = mean(xs)
    return sum((abs(x - m) for x in xs), F(0)) / len(xs)


def sd(xs):
    m = mean(xs)
    return mp.sqrt(mpq(sum(((x - m) ** 2 for x in xs), F(0)) / len(xs)))


def minkowski(xs, rho):
    m = mean(xs)
    s = sum((abs(x - m) ** rho for x in xs), F(0)) / len(xs)
    return mp.root(mpq(s), rho)


def avg_ranks(xs):
    # O(n^2) rank assignment: rank = 1 + #less + (#equal - 1) / 2
    return [F(1) + sum(1 for y in xs if y < x) + F(sum(1 for y in xs if y == x) - 1, 2) for x in xs]


def pearson(x, y):
    mx, my = mean(x), mean(y)
    cov = sum(((a - mx) * (b - my) for a, b in zip(x, y)), F(0))
    vx = sum(((a - mx) ** 2 for a in x), F(0))
    vy = sum(((b - my) ** 2 for b in y), F(0))
    return mpq(cov) / mp.sqrt(mpq(vx) * mpq(vy))


xs = [F(0), F(0), F(1)]
print("mean [0,0,1]          =", mp.nstr(mp.mpf(1) / 3, 17))
print("mad  [0,0,1]          =", mad(xs), "=", mp.nstr(mp.mpf(4) / 9, 17))
print("sd   [0,0,1]          =", mp.nstr(sd(xs), 17))
print("dd(0.5) [0,0,1]       =", mp.nstr((sd(xs) + mp.mpf(4) / 9) / 2, 17))
print("mink rho=3 [0,0,1]    =", mp.nstr(minkowski(xs, 3), 17))
print("sd  [0,1]             =", mp.nstr(sd([F(0), F(1)]), 17))
print("mad [0,1]             =", mad([F(0), F(1)]))
print("wmean [2,4] w=[1,3]   =", (F(2) * 1 + F(4) * 3) / 4)
print("gms g=1,0 c=0.0026    =", mp.nstr(mp.mpf('0.0026') / mp.mpf('1.0026'), 17))
print("gray (255,0,0)        =", F(299, 1000) * 255)
x, y = [F(1), F(2), F(2), F(3)], [F(1), F(2), F(3), F(4)]
print("spearman ties         =", mp.nstr(pearson(avg_ranks(x), avg_ranks(y)), 17))
print("pearson [0,1,2]/[0,1,3] =", mp.nstr(pearson([F(0), F(1), F(2)], [F(0), F(1), F(3)]), 17))
print("rmse [0,0] vs [3,4]   =", mp.nstr(mp.sqrt(mp.mpf(25) / 2), 17))
print("weighted avg 0.8/1.0 w 1/3 =", (F(8, 10) * 1 + F(1) * 3) / 4)
