"""The exact relations tying the four lattice statistics together.

Everything in this module is plain algebra: the three closed forms mapping
the looping constant to the sandpile density, unicycle ratio and mean
cycle length, and the triangular system mapping the descendant-count law
at the origin to the height law there.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class TheoremValues:
    """tau, zeta, lambda as functions of the looping constant xi in Z^d."""

    xi: object
    d: int
    tau: object
    zeta: object
    lam: object


def theorem_values(xi, d: int) -> TheoremValues:
    """Evaluate tau = (xi-1)/2, zeta = d + (xi-1)/2, lambda = (2d-2)/(xi-1).

    Exact when xi is exact (int/Fraction); float in, float out.  Requires
    xi > 1 (lambda is undefined at xi = 1) and d >= 2.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if isinstance(xi, (int, Fraction)):
        xi = Fraction(xi)
    if not xi > 1:
        raise ValueError("xi must exceed 1")
    tau = (xi - 1) / 2
    zeta = d + (xi - 1) / 2
    lam = (2 * d - 2) / (xi - 1)
    # internal consistency: lambda * tau == d - 1 identically
    check = lam * tau - (d - 1)
    assert abs(float(check)) < 1e-9
    return TheoremValues(xi=xi, d=d, tau=tau, zeta=zeta, lam=lam)


def pq_transform(p, d: int):
    """Map the descendant-count law at the origin to the height law.

    p[j] is the probability of j descendant neighbors (j = 0..2d-1); the
    height law is the triangular system q[k] = sum_{j<=k} p[j] / (2d - j).
    Returns (q, expected_height) and checks the closed form
    E height = (E descendants + 2d - 1) / 2.
    """
    two_d = 2 * d
    if len(p) != two_d:
        raise ValueError(f"need {two_d} probabilities")
    exact = all(isinstance(v, (int, Fraction)) for v in p)
    vals = [Fraction(v) for v in p] if exact else [float(v) for v in p]
    if any(v < 0 for v in vals):
        raise ValueError("probabilities must be nonnegative")
    total = sum(vals)
    if exact:
        if total != 1:
            raise ValueError("probabilities must sum to 1")
    elif abs(total - 1.0) > 1e-9:
        raise ValueError("probabilities must sum to 1")

    q = []
    acc = Fraction(0) if exact else 0.0
    for k in range(two_d):
        acc = acc + vals[k] / (Fraction(two_d - k) if exact else (two_d - k))
        q.append(acc)
    e_height = sum(k * qk for k, qk in enumerate(q))
    e_desc = sum(j * pj for j, pj in enumerate(vals))
    closed = (e_desc + two_d - 1) / (Fraction(2) if exact else 2)
    if exact:
        assert e_height == closed
    else:
        assert abs(e_height - closed) < 1e-9
    return q, e_height


def square_lattice_height_probabilities() -> tuple[float, float, float, float]:
    """The proven closed forms for the height law of the square lattice.

    p0 = 2/pi^2 - 4/pi^3, and the companion expressions for p1, p2, p3;
    they sum to one and give mean 17/8.
    """
    from math import pi

    p0 = 2 / pi**2 - 4 / pi**3
    p1 = 0.25 - 1 / (2 * pi) - 3 / pi**2 + 12 / pi**3
    p2 = 0.375 + 1 / pi - 12 / pi**3
    p3 = 0.375 - 1 / (2 * pi) + 1 / pi**2 + 4 / pi**3
    return (p0, p1, p2, p3)
