"""Seeded sample generators for exact and numeric checks."""
from __future__ import annotations

import cmath
import math
import random
from fractions import Fraction

DEFAULT_SEED = 20240
MIN_SEPARATION = 0.05


def rng(seed):
    return random.Random(seed)


def random_rational(r, num=60, den=17):
    return Fraction(r.randint(-num, num), r.randint(1, den))


def rational_points(r, n):
    """n pairwise distinct rationals."""
    pts = []
    while len(pts) < n:
        z = random_rational(r)
        if z not in pts:
            pts.append(z)
    return pts


def rational_matrix(r, n, num=9, den=5):
    return [[random_rational(r, num, den) for _ in range(n)] for _ in range(n)]


def disc_point(r, radius):
    """Uniform point in the closed disc of the given radius."""
    rad = radius * math.sqrt(r.random())
    return cmath.rect(rad, 2 * math.pi * r.random())


def complex_points(r, n, radius, min_separation=MIN_SEPARATION):
    """n points in a disc, rejecting configurations with a pair closer than ``min_separation``."""
    while True:
        pts = [disc_point(r, radius) for _ in range(n)]
        if all(abs(pts[i] - pts[j]) >= min_separation for i in range(n) for j in range(i)):
            return pts


def genus1_samples(seed, n, count, z_radius=0.4, q_radius=0.1, min_separation=MIN_SEPARATION):
    """``(points, q)`` pairs; pairwise separations are at most ``2 * z_radius``."""
    r = rng(seed)
    return [(complex_points(r, n, z_radius, min_separation), disc_point(r, q_radius)) for _ in range(count)]


def pde_samples(seed, count, z_radius=0.5, q_radius=0.1, min_separation=MIN_SEPARATION):
    """``(x, y, q)`` triples with x, y and x - y kept at least ``min_separation`` from 0."""
    r = rng(seed)
    out = []
    while len(out) < count:
        x, y = disc_point(r, z_radius), disc_point(r, z_radius)
        if min(abs(x), abs(y), abs(x - y)) < min_separation:
            continue
        out.append((x, y, disc_point(r, q_radius)))
    return out
