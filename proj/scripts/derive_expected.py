#!/usr/bin/env python3
"""Exact-rational derivation of the expected values asserted by the fixture
manifests. Every multiplier below solves a small linear stationarity system

    r_p * grad_p f_p(x) = sum_j L_j * grad_p G_j(x)    (one row per player)

at a fixed point x with a fixed active set, using fractions.Fraction, so the
printed values are exact. Run it before touching a manifest:

    python3 scripts/derive_expected.py
"""

from fractions import Fraction as F


def solve2(a11, a12, a21, a22, b1, b2):
    """Solve a 2x2 linear system exactly."""
    det = a11 * a22 - a12 * a21
    assert det != 0
    return ((b1 * a22 - b2 * a12) / det, (a11 * b2 - a21 * b1) / det)


def main():
    rows = []

    # -- Instance family with G1 = 1-x1-x2, G2 = x1-x2, G3 = x2 --------------
    # Gradients: G1 -> (-1,-1), G2 -> (1,-1), G3 -> (0,1).

    # ex3 (objectives -x1, -x2), point (1/2,1/2), active {G1,G2}, r=(1,2):
    # player 1: -r1 = -L1 + L2 ; player 2: -r2 = -L1 - L2.
    r1, r2 = F(1), F(2)
    l1, l2 = solve2(-1, 1, -1, -1, -r1, -r2)
    rows.append(("ex3 (1/2,1/2) r=(1,2): L1, L2", (l1, l2)))

    r1, r2 = F(2), F(1)
    l1, l2 = solve2(-1, 1, -1, -1, -r1, -r2)
    rows.append(("ex3 (1/2,1/2) r=(2,1): L1, L2 (sign fails)", (l1, l2)))

    # ex4_perturbed (objectives -x + (e/2)x^2, -x + e x^2), active {G1}:
    # stationarity forces x1 = 2*x2 and x1+x2 = 1.
    for e in (F(1, 10), F(1, 100)):
        x2 = F(1, 3)
        x1 = F(2, 3)
        L1 = -(-1 + e * x1)  # r1 = 1
        assert L1 == -(-1 + 2 * e * x2)
        rows.append((f"ex4_perturbed eps={e}: x, L1", ((x1, x2), L1)))
        # ND3 reduced value with basis w = (-1, 1) of the kernel of (-1,-1):
        # w^T diag(e r1, 2 e r2) w = e r1 + 2 e r2.
        rows.append((f"ex4_perturbed eps={e}: nd3 value", e * 1 + 2 * e * 1))

    # -- ex5 (objectives -x1+x1*x2, -x2+x1*x2/2), same constraints -----------
    # d f1/d x1 = -1 + x2 ; d f2/d x2 = -1 + x1/2.

    # Point (1,0), active {G1,G3}: p1: r1(-1+x2) = -L1 ; p2: r2(-1+x1/2) = -L1 + L3.
    for (r1, r2) in ((F(1), F(1)), (F(2), F(1))):
        L1 = r1 * (1 - 0)
        L3 = L1 + r2 * (-1 + F(1, 2))
        rows.append((f"ex5 (1,0) r=({r1},{r2}): L1, L3", (L1, L3)))

    # Point (1/2,1/2), active {G1,G2}: p1: r1(-1/2) = -L1+L2 ; p2: r2(-3/4) = -L1-L2.
    for (r1, r2) in ((F(1), F(1)), (F(2, 5), F(1))):
        l1, l2 = solve2(-1, 1, -1, -1, -r1 * F(1, 2), -r2 * F(3, 4))
        rows.append((f"ex5 (1/2,1/2) r=({r1},{r2}): L1, L2", (l1, l2)))

    # Interior family point at ratio rho: t = (rho - 1/2)/(rho + 1/2),
    # x = (1-t, t), active {G1}, L1 = (1-t) r1.
    for rho in (F(3, 4), F(1), F(5, 4)):
        t = (rho - F(1, 2)) / (rho + F(1, 2))
        rows.append((f"ex5 interior rho={rho}: t, x, L1 (r=(rho,1))",
                     (t, (1 - t, t), (1 - t) * rho)))

    # ND3 reduced value on the interior family, r=(1,1):
    # w = (-1,1), J_L = [[0, r1], [r2/2, 0]]  ->  w^T J_L w = -r1 - r2/2.
    r1, r2 = F(1), F(1)
    w = (F(-1), F(1))
    JL = ((F(0), r1), (r2 / 2, F(0)))
    val = sum(w[i] * JL[i][j] * w[j] for i in range(2) for j in range(2))
    rows.append(("ex5 interior r=(1,1): nd3 value", val))

    # C3 sample value, r=(1,1): symmetric part of [[0, r1],[r2/2, 0]] has
    # eigenvalues +/- (r1 + r2/2)/2.
    rows.append(("ex5 r=(1,1): min eigenvalue of sym part", -(r1 + r2 / 2) / 2))

    # -- ex2 (objectives (x1-x2)^2, -x2; G1 = x1-2x2 active at the origin) ---
    # p1: d f1/d x1 = 0 = L * 1 ; p2: d f2/d x2 = -1 = L * (-2).
    rows.append(("ex2 (0,0): per-player multipliers for G1", (F(0), F(1, 2))))

    # -- ex1 gradients at the origin -----------------------------------------
    # G1 = 1-(x11-x2)^2-(x12-(1-2 x2))^2, G2 = 1-x11^2-(x2+1)^2.
    # dG1 = (-2(x11-x2), -2(x12-1+2 x2), 2(x11-x2)-4(x12-1+2 x2))
    x11, x12, x2 = F(0), F(0), F(0)
    dG1 = (-2 * (x11 - x2), -2 * (x12 - 1 + 2 * x2),
           2 * (x11 - x2) - 4 * (x12 - 1 + 2 * x2))
    dG2 = (-2 * x11, F(0), -2 * (x2 + 1))
    rows.append(("ex1 origin: full gradients of G1, G2", (dG1, dG2)))

    # trivial_1p: f = -x1, g1 = 1-x1 active at x=1: -r = -lambda.
    rows.append(("trivial_1p x=1 r=1: lambda1", F(1)))

    # -- three players sharing one resource ----------------------------------
    # f_p = -x_p + x_p^2, G1 = 1 - x1 - x2 - x3 active:
    # r_p (2 x_p - 1) = -L  ->  x_p = (1 - L/r_p)/2, sum x_p = 1
    # =>  L = 1 / sum(1/r_p).
    for r in ((F(1), F(1), F(1)), (F(1), F(2), F(4))):
        L = 1 / sum(1 / rp for rp in r)
        x = tuple((1 - L / rp) / 2 for rp in r)
        assert sum(x) == 1
        rows.append((f"three-player r={r}: L, x", (L, x)))
        # Per-player multipliers for the ratio-consistency witness:
        # grad_p f_p = -1 + 2 x_p = -(per-player multiplier).
        rows.append((f"three-player r={r}: per-player multipliers",
                     tuple(1 - 2 * xp for xp in x)))

    for label, value in rows:
        print(f"{label}: {value}")


if __name__ == "__main__":
    main()
