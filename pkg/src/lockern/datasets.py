"""Synthetic dataset generators and CSV I/O for the experiment harness.

Every generator is a pure function of (parameters, seed); the CLI exposes
them through ``gen-data``.  CSV layouts per kind:

    uniform_sphere   x1..x_{Q+1}
    great_circle     x1..x_{Q+1}
    example10_1      x, component          (component: 0..4 mixture part)
    three_moons      x, y, label           (label: arc id 0..2)
    circle_ellipse   x, y, label           (label: 0 circle, 1 ellipse)
"""

import csv
import hashlib
import io

import numpy as np


def substream(master_seed, label):
    """Independent generator for a named subtask of a master seed.

    PCG64 seeded through SeedSequence with a stable hash of the label as the
    spawn key, so parallel subtasks cannot perturb each other's draws.
    """
    digest = hashlib.sha256(label.encode()).digest()
    key = int.from_bytes(digest[:8], "little")
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed,
                                                        spawn_key=(key,)))


def uniform_sphere(rng, M, ambient_dim=2):
    """M points uniform on S^Q via normalized Gaussians, shape (M, Q+1)."""
    if M == 0:
        return np.zeros((0, ambient_dim + 1))
    p = rng.normal(size=(M, ambient_dim + 1))
    return p / np.linalg.norm(p, axis=1, keepdims=True)


def great_circle(rng, M, ambient_dim=2):
    """M points uniform on the equatorial circle of S^Q."""
    th = rng.uniform(0.0, 2.0 * np.pi, M)
    pts = np.zeros((M, ambient_dim + 1))
    pts[:, 0] = np.cos(th)
    pts[:, 1] = np.sin(th)
    return pts


def great_circle_points(theta, ambient_dim=2):
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    pts = np.zeros((len(theta), ambient_dim + 1))
    pts[:, 0] = np.cos(theta)
    pts[:, 1] = np.sin(theta)
    return pts


def example10_1(rng):
    """Five-part mixture on the line: 1200 uniform on [-0.6, -0.4], 2400
    normal(0.05, var 0.04), and atoms at -2 (60), 0.4 (120), 1.5 (120).

    Returns (x, component) with components numbered as listed.
    """
    parts = [
        (rng.uniform(-0.6, -0.4, 1200), 0),
        (rng.normal(0.05, 0.2, 2400), 1),
        (np.full(60, -2.0), 2),
        (np.full(120, 0.4), 3),
        (np.full(120, 1.5), 4),
    ]
    x = np.concatenate([p for p, _ in parts])
    comp = np.concatenate([np.full(len(p), c) for p, c in parts])
    return x, comp


# three interleaved crescents; gaps verified numerically in the test suite
_MOON_CENTERS = ((0.0, 0.0), (1.5, 0.45), (3.0, 0.0))
_MOON_UPPER = (True, False, True)


def three_moons(rng, per_arc=400, noise=0.06):
    """Three disjoint crescents with additive coordinate noise."""
    pts = []
    labels = []
    for k, ((cx, cy), upper) in enumerate(zip(_MOON_CENTERS, _MOON_UPPER)):
        t = rng.uniform(0.0, np.pi, per_arc)
        th = t if upper else t + np.pi
        x = cx + np.cos(th)
        y = cy + np.sin(th)
        pts.append(np.stack([x, y], axis=1))
        labels.append(np.full(per_arc, k))
    pts = np.concatenate(pts)
    labels = np.concatenate(labels)
    pts = pts + rng.normal(0.0, noise, size=pts.shape)
    return pts, labels


def moon_arc_gap():
    """Smallest distance between distinct noise-free arcs (dense scan)."""
    t = np.linspace(0.0, np.pi, 2000)
    arcs = []
    for (cx, cy), upper in zip(_MOON_CENTERS, _MOON_UPPER):
        th = t if upper else t + np.pi
        arcs.append(np.stack([cx + np.cos(th), cy + np.sin(th)], axis=1))
    best = np.inf
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            diff = arcs[i][:, None, :] - arcs[j][None, :, :]
            best = min(best, float(np.sqrt((diff ** 2).sum(axis=2)).min()))
    return best


def _ellipse_arclength_param(a, b, count, rng):
    """Angles drawn uniform in arclength on the ellipse (a cos t, b sin t)."""
    t = np.linspace(0.0, 2.0 * np.pi, 4096, endpoint=False)
    speed = np.sqrt((a * np.sin(t)) ** 2 + (b * np.cos(t)) ** 2)
    arcl = np.concatenate([[0.0], np.cumsum(speed)])
    arcl = arcl / arcl[-1]
    u = rng.uniform(0.0, 1.0, count)
    return np.interp(u, arcl, np.concatenate([t, [2.0 * np.pi]]))


def circle_ellipse(rng, n_each=1000, eccentricity=0.79, noise=0.05,
                   circle_radius=1.0, ellipse_major=1.2):
    """Unit-ish circle and an intersecting ellipse, sampled by arclength,
    with independent coordinate noise; labels 0 (circle) and 1 (ellipse)."""
    th = rng.uniform(0.0, 2.0 * np.pi, n_each)
    circ = circle_radius * np.stack([np.cos(th), np.sin(th)], axis=1)
    b = ellipse_major * np.sqrt(1.0 - eccentricity ** 2)
    te = _ellipse_arclength_param(ellipse_major, b, n_each, rng)
    ell = np.stack([ellipse_major * np.cos(te), b * np.sin(te)], axis=1)
    pts = np.concatenate([circ, ell])
    pts = pts + rng.normal(0.0, noise, size=pts.shape)
    labels = np.concatenate([np.zeros(n_each, dtype=int), np.ones(n_each, dtype=int)])
    return pts, labels


# ---------------------------------------------------------------------------
# CSV plumbing
# ---------------------------------------------------------------------------

GEN_KINDS = ("uniform_sphere", "great_circle", "example10_1", "three_moons",
             "circle_ellipse")


def gen_data(kind, params, seed):
    """Generate one dataset as (header, rows); deterministic given the seed."""
    rng = substream(seed, f"gen-data/{kind}")
    p = dict(params or {})
    if kind == "uniform_sphere":
        Q = int(p.get("ambient_dim", 2))
        pts = uniform_sphere(rng, int(p.get("m", 1000)), Q)
        header = [f"x{i+1}" for i in range(Q + 1)]
        return header, pts.tolist()
    if kind == "great_circle":
        Q = int(p.get("ambient_dim", 2))
        pts = great_circle(rng, int(p.get("m", 1000)), Q)
        header = [f"x{i+1}" for i in range(Q + 1)]
        return header, pts.tolist()
    if kind == "example10_1":
        x, comp = example10_1(rng)
        return ["x", "component"], [[float(a), int(c)] for a, c in zip(x, comp)]
    if kind == "three_moons":
        pts, labels = three_moons(rng, int(p.get("per_arc", 400)),
                                  float(p.get("noise", 0.06)))
        return ["x", "y", "label"], [[float(a), float(b), int(c)]
                                     for (a, b), c in zip(pts, labels)]
    if kind == "circle_ellipse":
        pts, labels = circle_ellipse(rng, int(p.get("n_each", 1000)),
                                     float(p.get("eccentricity", 0.79)),
                                     float(p.get("noise", 0.05)))
        return ["x", "y", "label"], [[float(a), float(b), int(c)]
                                     for (a, b), c in zip(pts, labels)]
    raise ValueError(f"unknown dataset kind {kind!r}; choose from {GEN_KINDS}")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def read_csv(path):
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [[float(v) for v in row] for row in r if row]
    return header, np.asarray(rows, dtype=float).reshape(-1, len(header))
