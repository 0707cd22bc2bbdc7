"""D2Q9 velocity set.

Direction numbering::

    6   2   5
      \\ | /
    3 - 0 - 1
      / | \\
    7   4   8
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

_VELOCITIES = (
    (0, 0),
    (1, 0), (0, 1), (-1, 0), (0, -1),
    (1, 1), (-1, 1), (-1, -1), (1, -1),
)
_WEIGHTS = (
    Fraction(4, 9),
    Fraction(1, 9), Fraction(1, 9), Fraction(1, 9), Fraction(1, 9),
    Fraction(1, 36), Fraction(1, 36), Fraction(1, 36), Fraction(1, 36),
)


@dataclass(frozen=True)
class LatticeD2Q9:
    """Immutable D2Q9 constants in lattice units (dx = dt = 1)."""

    exact_weights: tuple = _WEIGHTS
    c: np.ndarray = field(init=False, repr=False)
    w: np.ndarray = field(init=False, repr=False)
    opposite: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        c = np.array(_VELOCITIES, dtype=np.int64)
        w = np.array([float(x) for x in self.exact_weights])
        opp = np.array([_VELOCITIES.index((-cx, -cy)) for cx, cy in _VELOCITIES])
        for a in (c, w, opp):
            a.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "opposite", opp)

    q = 9
    b2 = 1.0 / 3.0

    @property
    def b(self):
        return np.sqrt(self.b2)

    def opposite_index(self, i):
        if not 0 <= i < self.q:
            raise IndexError(f"direction index {i} outside 0..8")
        return int(self.opposite[i])


D2Q9 = LatticeD2Q9()


def _delta(*idx):
    return 1.0 if all(a == idx[0] for a in idx) else 0.0


def _iso4(a, b, g, k):
    d = lambda x, y: 1.0 if x == y else 0.0
    return d(a, b) * d(g, k) + d(a, g) * d(b, k) + d(a, k) * d(b, g)


def _iso6(a, b, g, k, t, p):
    d = lambda x, y: 1.0 if x == y else 0.0
    return (d(a, b) * _iso4(g, k, t, p) + d(a, g) * _iso4(b, k, t, p)
            + d(a, k) * _iso4(b, g, t, p) + d(a, t) * _iso4(b, g, k, p)
            + d(a, p) * _iso4(b, g, k, t))


def check_isotropy(lattice=D2Q9, weights=None):
    """Largest deviation of the weighted velocity moments from their targets.

    Targets for orders 0, 2, 4 are the isotropic tensors ``1``, ``b^2 delta``
    and ``b^4 Delta4``; the sixth order carries the regular-lattice deficit
    ``b^6 (Delta6 - 6 delta_{abgktp})``.  Returns ``{order: max |residual|}``.
    """
    w = lattice.w if weights is None else np.asarray(weights, dtype=float)
    c = lattice.c.astype(float)
    b2 = lattice.b2
    report = {0: abs(w.sum() - 1.0)}
    targets = {
        2: lambda ix: b2 * _delta(*ix),
        4: lambda ix: b2**2 * _iso4(*ix),
        6: lambda ix: b2**3 * (_iso6(*ix) - 6.0 * _delta(*ix)),
    }
    for order, target in targets.items():
        worst = 0.0
        for ix in product(range(2), repeat=order):
            moment = np.sum(w * np.prod(c[:, list(ix)], axis=1))
            worst = max(worst, abs(moment - target(ix)))
        report[order] = worst
    return report
