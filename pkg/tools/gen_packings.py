"""Regenerate the circle-packing witness table in src/aos_swarm/_packings.py.

Maximizes the minimum pairwise distance of n points in the unit disk with
multistart SLSQP, then rescales so the minimum distance is exactly 1.
"""
import sys

import numpy as np
from scipy.optimize import minimize


def solve(n, starts=200, seed=0):
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    best = None
    for _ in range(starts):
        r = np.sqrt(rng.random(n))
        a = rng.random(n) * 2 * np.pi
        x0 = np.concatenate([np.c_[r * np.cos(a), r * np.sin(a)].ravel(), [0.01]])

        def neg_t(x):
            return -x[-1]

        def pair(x):
            p = x[:-1].reshape(n, 2)
            d = p[:, None, :] - p[None, :, :]
            return (d ** 2).sum(-1)[iu] - x[-1]

        def disk(x):
            p = x[:-1].reshape(n, 2)
            return 1.0 - (p ** 2).sum(1)

        res = minimize(neg_t, x0, method="SLSQP",
                       constraints=[{"type": "ineq", "fun": pair},
                                    {"type": "ineq", "fun": disk}],
                       options={"maxiter": 2000, "ftol": 1e-15})
        p = res.x[:-1].reshape(n, 2)
        d = np.sqrt(((p[:, None] - p[None]) ** 2).sum(-1))[iu].min()
        rho = np.sqrt((p ** 2).sum(1)).max()
        ratio = 1.0 + 2.0 * rho / d
        if best is None or ratio < best[0]:
            best = (ratio, p / d)
    return best


def main():
    rows = ["# generated by tools/gen_packings.py; do not edit", "WITNESSES = {"]
    ratios = {1: (1.0, np.zeros((1, 2)))}
    for n in range(2, 21):
        ratios[n] = solve(n)
        print(n, repr(ratios[n][0]), file=sys.stderr)
    for n in range(1, 21):
        pts = ratios[n][1]
        body = ", ".join(f"({float(x)!r}, {float(y)!r})" for x, y in pts)
        rows.append(f"    {n}: ({float(ratios[n][0])!r}, [{body}]),")
    rows.append("}")
    print("\n".join(rows))


if __name__ == "__main__":
    main()
