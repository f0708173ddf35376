"""Figures for reports: a transverse section of the cones and the growth of an orbit.

Floats appear only here, after all verification is done.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from k3cone import _linalg as la  # noqa: E402
from k3cone.conegeom import RatCone  # noqa: E402
from k3cone.quadlat import LatVec, pair  # noqa: E402


def _section_map(cone: RatCone, ample: LatVec):
    """Send a ray to the point where it meets the hyperplane q(., ample) = 1, in plane coordinates."""
    lat = cone.lattice
    g = lat.gram_matrix()
    normal = la.matvec(g, ample.coords)
    u1, u2 = la.nullspace([list(normal)], lat.rank)[:2]

    def to_xy(v: LatVec):
        s = pair(lat, v, ample)
        if s <= 0:
            raise ValueError(f"{v} does not meet the section")
        w = [c / s for c in v.coords]
        return float(la.dot(w, u1)), float(la.dot(w, u2))

    return to_xy


def _polygon(ax, pts, **kw):
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    pts = sorted(pts, key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
    xs, ys = zip(*(pts + pts[:1]))
    ax.plot(xs, ys, **kw)
    return pts


def plot_cone_section(mori: RatCone, ample_rays, path, j_cones=None, title="Transverse section of the Mori cone"):
    """Mori cone section with labelled rays, ample classes along the facets, and optional subcones."""
    interior = ample_rays[0]
    for a in ample_rays[1:]:
        interior = interior + a
    to_xy = _section_map(mori, interior)
    fig, ax = plt.subplots(figsize=(6.4, 5.6))
    pts = [to_xy(r) for r in mori.rays]
    _polygon(ax, pts, color="black", lw=1.6, label="Mori cone")
    for r, (x, y) in zip(mori.rays, pts):
        ax.plot(x, y, "ko", ms=4)
        ax.annotate(str(r), (x, y), textcoords="offset points", xytext=(5, 5), fontsize=8)
    if j_cones is not None:
        for cone, color, name in ((j_cones.J1, "tab:blue", "J1"), (j_cones.J2, "tab:orange", "J2")):
            jp = _polygon(ax, [to_xy(r) for r in cone.rays], color=color, lw=1.0, ls="--", label=name)
            xs, ys = zip(*jp)
            ax.fill(xs, ys, color=color, alpha=0.12)
    for a in ample_rays:
        tight = [to_xy(r) for r in mori.rays if pair(mori.lattice, a, r) == 0]
        if len(tight) == 2:
            (x0, y0), (x1, y1) = tight
            ax.annotate(str(a.primitive()), ((x0 + x1) / 2, (y0 + y1) / 2), fontsize=7, color="tab:green",
                        ha="center", va="center")
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    ax.set_xticks([])
    ax.set_yticks([])
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_orbit_growth(record, radius_lo, radius_hi, path, title="Orbit growth"):
    """log10 of pairings along the orbit, against the line of slope log10(spectral radius)."""
    steps = [s for s in record.steps if s.pairing > 0]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if steps:
        ms = [s.m for s in steps]
        logs = [math.log10(s.pairing) for s in steps]
        ax.plot(ms, logs, "o-", ms=3, label=f"log10 q(f^m seed, {record.ample})")
        rho = (float(radius_lo) + float(radius_hi)) / 2
        m0, l0 = ms[-1], logs[-1]
        ax.plot(ms, [l0 + (m - m0) * math.log10(rho) for m in ms], "--", color="gray",
                label=f"slope log10({rho:.5f})")
    ax.set_xlabel("m")
    ax.set_ylabel("log10 pairing")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
