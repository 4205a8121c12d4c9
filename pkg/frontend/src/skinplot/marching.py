"""Contour extraction on a rectangular grid by marching squares.

Kept local to this package so the numerical core stays free of any
plotting or geometry dependencies.
"""

import math

# edge ids: 0 bottom, 1 right, 2 top, 3 left
_TABLE = {
    0: [],
    1: [(3, 0)],
    2: [(0, 1)],
    3: [(3, 1)],
    4: [(1, 2)],
    6: [(0, 2)],
    7: [(3, 2)],
    8: [(2, 3)],
    9: [(0, 2)],
    11: [(1, 2)],
    12: [(1, 3)],
    13: [(0, 1)],
    14: [(0, 3)],
    15: [],
}


def _interp(xa, ya, va, xb, yb, vb, level):
    if va == vb:
        t = 0.5
    else:
        t = (level - va) / (vb - va)
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    return (xa + t * (xb - xa), ya + t * (yb - ya))


def _cell_segments(xs, ys, grid, ix, iy, level):
    x0, x1 = xs[ix], xs[ix + 1]
    y0, y1 = ys[iy], ys[iy + 1]
    v00 = grid[iy][ix]
    v10 = grid[iy][ix + 1]
    v01 = grid[iy + 1][ix]
    v11 = grid[iy + 1][ix + 1]
    vals = (v00, v10, v11, v01)
    if any(math.isnan(v) for v in vals):
        return []
    case = 0
    if v00 >= level:
        case |= 1
    if v10 >= level:
        case |= 2
    if v11 >= level:
        case |= 4
    if v01 >= level:
        case |= 8
    if case == 0 or case == 15:
        return []
    if case == 5 or case == 10:
        center = 0.25 * (v00 + v10 + v01 + v11)
        inside = center >= level
        if case == 5:
            pairs = [(0, 1), (2, 3)] if inside else [(3, 0), (1, 2)]
        else:
            pairs = [(3, 0), (1, 2)] if inside else [(0, 1), (2, 3)]
    else:
        pairs = _TABLE[case]

    def point(edge):
        if edge == 0:
            return _interp(x0, y0, v00, x1, y0, v10, level)
        if edge == 1:
            return _interp(x1, y0, v10, x1, y1, v11, level)
        if edge == 2:
            return _interp(x0, y1, v01, x1, y1, v11, level)
        return _interp(x0, y0, v00, x0, y1, v01, level)

    return [(point(a), point(b)) for a, b in pairs]


def contour_lines(xs, ys, grid, level):
    """Level set of grid[iy][ix] sampled at (xs[ix], ys[iy]).

    Returns a list of polylines, each a list of (x, y) tuples. A
    polyline whose ends coincide is a closed loop.
    """
    nx, ny = len(xs), len(ys)
    # nudge values equal to the level so the contour never passes exactly
    # through a grid node; otherwise coincident segment ends fragment loops
    scale = max((abs(v) for row in grid for v in row if not math.isnan(v)),
                default=1.0)
    eps = (scale or 1.0) * 1e-12
    work = [[(v + eps if v == level else v) for v in row] for row in grid]
    segs = []
    for iy in range(ny - 1):
        for ix in range(nx - 1):
            segs.extend(_cell_segments(xs, ys, work, ix, iy, level))
    if not segs:
        return []

    span = max(xs[-1] - xs[0], ys[-1] - ys[0], 1e-300)
    q = span * 1e-9

    def key(p):
        return (round(p[0] / q), round(p[1] / q))

    # a contour grazing a grid node leaves sliver segments in the adjacent
    # cells; they quantize to zero length and would split loops at the node
    segs = [s for s in segs if key(s[0]) != key(s[1])]
    if not segs:
        return []

    ends = {}
    for i, (a, b) in enumerate(segs):
        ends.setdefault(key(a), []).append((i, 0))
        ends.setdefault(key(b), []).append((i, 1))

    used = [False] * len(segs)
    lines = []
    for start in range(len(segs)):
        if used[start]:
            continue
        used[start] = True
        a, b = segs[start]
        chain = [a, b]
        for _ in range(2):
            # extend from the tail; after reversing, from the other end
            while True:
                k = key(chain[-1])
                nxt = None
                for i, end in ends.get(k, ()):
                    if not used[i]:
                        nxt = (i, end)
                        break
                if nxt is None:
                    break
                i, end = nxt
                used[i] = True
                pa, pb = segs[i]
                chain.append(pb if end == 0 else pa)
                if key(chain[-1]) == key(chain[0]):
                    break
            if key(chain[-1]) == key(chain[0]):
                break
            chain.reverse()
        lines.append(chain)
    return lines


def is_closed(line, tol=1e-9):
    if len(line) < 3:
        return False
    dx = line[0][0] - line[-1][0]
    dy = line[0][1] - line[-1][1]
    return math.hypot(dx, dy) <= tol * max(1.0, abs(line[0][0]), abs(line[0][1]))
