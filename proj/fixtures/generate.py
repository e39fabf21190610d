"""Regenerates the bundled 50 m x 50 m scenarios (deterministic)."""
import json
import random
from pathlib import Path

import numpy as np
from matplotlib.path import Path as MplPath

SIZE = 50
RES = 0.1
HERE = Path(__file__).parent


def raster(rects, polys):
    n = int(SIZE / RES)
    c = (np.arange(n) + 0.5) * RES
    xx, yy = np.meshgrid(c, c)
    occ = np.zeros((n, n), bool)
    for x, y, w, h in rects:
        occ |= (xx >= x) & (xx < x + w) & (yy >= y) & (yy < y + h)
    pts = np.stack([xx.ravel(), yy.ravel()], 1)
    for p in polys:
        occ |= MplPath(p).contains_points(pts).reshape(n, n)
    return occ


def connected(occ):
    from scipy.ndimage import label
    lab, k = label(~occ)
    return k == 1


def boxes_of(rects, polys):
    out = [(x, y, x + w, y + h) for x, y, w, h in rects]
    for p in polys:
        xs = [v[0] for v in p]
        ys = [v[1] for v in p]
        out.append((min(xs), min(ys), max(xs), max(ys)))
    return out


def gap_ok(box, placed, gap):
    x0, y0, x1, y1 = box
    if x0 < 0 or y0 < 0 or x1 > SIZE or y1 > SIZE:
        return False
    if x0 < 3 and y0 < 3:  # keep the start corner open
        return False
    for a in placed:
        if x0 < a[2] + gap and a[0] < x1 + gap and y0 < a[3] + gap and a[1] < y1 + gap:
            return False
    for lo, hi in ((x0, x1), (y0, y1)):
        if 0 < lo < gap or SIZE - gap < hi < SIZE:
            return False
    return True


def shape(kind, rng):
    """Obstacle parts (rects, polys) at the origin; integer coordinates."""
    if kind == "block":
        return [(0, 0, rng.randint(2, 7), rng.randint(2, 7))], []
    if kind == "wall_h":
        return [(0, 0, rng.randint(8, 18), 1)], []
    if kind == "wall_v":
        return [(0, 0, 1, rng.randint(8, 18))], []
    if kind == "u":
        w, h = rng.randint(6, 10), rng.randint(6, 10)
        t = 1
        parts = {
            "up": [(0, 0, w, t), (0, 0, t, h), (w - t, 0, t, h)],
            "down": [(0, h - t, w, t), (0, 0, t, h), (w - t, 0, t, h)],
            "left": [(0, 0, t, h), (0, 0, w, t), (0, h - t, w, t)],
            "right": [(w - t, 0, t, h), (0, 0, w, t), (0, h - t, w, t)],
        }[rng.choice(["up", "down", "left", "right"])]
        return parts, []
    if kind == "l":
        a, b = rng.randint(5, 10), rng.randint(5, 10)
        return [(0, 0, a, 1), (0, 0, 1, b)], []
    if kind == "tri":
        a = rng.randint(4, 8)
        return [], [[[0, 0], [a, 0], [0, 2 * a // 2 + 2]]]
    if kind == "diamond":
        r = rng.randint(2, 4)
        return [], [[[r, 0], [2 * r, r], [r, 2 * r], [0, r]]]
    if kind == "hex":
        r = rng.randint(2, 3)
        return [], [[[r, 0], [3 * r, 0], [4 * r, 2 * r], [3 * r, 4 * r], [r, 4 * r], [0, 2 * r]]]
    raise ValueError(kind)


def place(kinds, rng, count, gap=2):
    rects, polys, placed = [], [], []
    tries = 0
    while len(placed) < count and tries < 5000:
        tries += 1
        kind = rng.choice(kinds)
        r, p = shape(kind, rng)
        dx, dy = rng.randint(0, SIZE), rng.randint(0, SIZE)
        r = [(x + dx, y + dy, w, h) for x, y, w, h in r]
        p = [[[vx + dx, vy + dy] for vx, vy in poly] for poly in p]
        bs = boxes_of(r, p)
        box = (min(b[0] for b in bs), min(b[1] for b in bs), max(b[2] for b in bs), max(b[3] for b in bs))
        if not gap_ok(box, placed, gap):
            continue
        rects += r
        polys += p
        placed.append(box)
    return rects, polys


def rooms(rng):
    # Two interior walls each way with door gaps.
    rects = []
    for x in (16, 33):
        doors = sorted(rng.sample(range(3, 45, 4), 2))
        y = 0
        for d in doors:
            rects.append((x, y, 1, d - y))
            y = d + 3
        rects.append((x, y, 1, SIZE - y))
    for y in (17, 34):
        for x0, x1 in ((0, 16), (17, 33), (34, 50)):
            d = rng.randint(x0 + 2, x1 - 5)
            if d - x0 > 0:
                rects.append((x0, y, d - x0, 1))
            if x1 - (d + 3) > 0:
                rects.append((d + 3, y, x1 - (d + 3), 1))
    return rects, []


def serpentine(rng):
    rects = []
    for k, y in enumerate(range(8, 48, 8)):
        if k % 2 == 0:
            rects.append((0, y, 46, 1))
        else:
            rects.append((4, y, 46, 1))
    return rects, []


SPECS = [
    ("f01_islands", ["block"], 14),
    ("f02_rooms", None, rooms),
    ("f03_u_pockets", ["u"], 6),
    ("f04_polygons", ["tri", "diamond", "hex"], 10),
    ("f05_serpentine", None, serpentine),
    ("f06_walls", ["wall_h", "wall_v"], 8),
    ("f07_l_shapes", ["l", "block"], 10),
    ("f08_mixed", ["block", "u", "tri"], 9),
    ("f09_mixed", ["wall_h", "u", "diamond"], 9),
    ("f10_dense_islands", ["block"], 22),
    ("f11_u_and_walls", ["u", "wall_v"], 8),
    ("f12_mixed", ["hex", "l", "block"], 10),
    ("f13_sparse", ["block", "diamond"], 5),
    ("f14_mixed", ["u", "l", "tri", "block"], 11),
    ("f15_walls_dense", ["wall_h", "wall_v", "block"], 12),
    ("f16_mixed", ["u", "hex", "wall_h"], 8),
    ("f17_pockets", ["u", "u", "block"], 9),
    ("f18_mixed", ["tri", "l", "wall_v"], 10),
    ("f19_mixed", ["diamond", "u", "block", "wall_h"], 12),
    ("f20_mixed", ["block", "l", "u", "hex", "tri"], 13),
]


def main():
    for idx, (name, kinds, arg) in enumerate(SPECS):
        seed = 1000 + idx
        while True:
            rng = random.Random(seed)
            if kinds is None:
                rects, polys = arg(rng)
            else:
                rects, polys = place(kinds, rng, arg)
            if connected(raster(rects, polys)):
                break
            seed += 100
        doc = {
            "width_m": SIZE,
            "height_m": SIZE,
            "obstacles": [{"rect": list(r)} for r in rects] + [{"poly": p} for p in polys],
            "start": [0.5, 0.5],
        }
        (HERE / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")


if __name__ == "__main__":
    main()
