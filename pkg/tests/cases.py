"""Shared fixtures: hand-evaluated height-inequality cases.

Each row is (g, delta, omega_sq, d_P, h_K, rhs, holds) with
rhs = (2g - 1)(d_P + delta) - omega_sq worked out by hand.
"""

HEIGHT_CASES = [
    (2, 0, 0, "0", "0", "0", False),
    (2, 0, 0, "0", "-1", "0", True),
    (2, 3, 4, "1", "7", "8", True),
    (2, 3, 4, "1", "8", "8", False),
    (2, 3, 4, "1", "7999/1000", "8", True),
    (2, 3, 4, "1", "8001/1000", "8", False),
    (3, 5, 10, "2/3", "55/3", "55/3", False),
    (3, 5, 10, "2/3", "18", "55/3", True),
    (3, 5, 10, "2/3", "19", "55/3", False),
    (4, 12, 20, "1/2", "67", "135/2", True),
    (4, 12, 20, "1/2", "135/2", "135/2", False),
    (2, 1, 0, "-1/3", "2/3", "2", True),
    (2, 1, 0, "-1/3", "2", "2", False),
    (5, 0, 30, "10/3", "0", "0", False),
    (5, 0, 30, "10/3", "-1/7", "0", True),
    (10, 100, 500, "0", "1399", "1400", True),
    (10, 100, 500, "0", "1400", "1400", False),
    (2, 7, -3, "2", "30", "30", False),
    (2, 7, -3, "2", "59/2", "30", True),
    (6, 4, 11, "5/11", "75/2", "38", True),
]


def projective_plane(q: int) -> list[tuple[int, ...]]:
    """Lines of PG(2, q) for prime q, as sets of point indices."""
    pts = []
    for a in range(q):
        for b in range(q):
            pts.append((a, b, 1))
        pts.append((a, 1, 0))
    pts.append((1, 0, 0))
    return [tuple(k for k, p in enumerate(pts) if sum(u * v for u, v in zip(line, p)) % q == 0) for line in pts]
