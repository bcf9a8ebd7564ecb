"""SVG frames of lattice sets and matplotlib summary figures."""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

from .lattice import as_set, effective_boundary, parity

FILL = {"even": "#2f6db5", "odd": "#d9822b"}
STROKE = "#111111"


def svg_frame(cells: Iterable, margin: float = 1.0, scale: float = 12.0, title: str = "") -> str:
    """One unit square per cell; y is flipped so that i2 grows upwards."""
    s = as_set(cells)
    edge = effective_boundary(s) if s.parity in ("even", "odd") else frozenset()
    if s:
        x0, x1, y0, y1 = s.bbox
    else:
        x0 = x1 = y0 = y1 = 0
    vx, vy = x0 - 0.5 - margin, -(y1 + 0.5) - margin
    w, h = x1 - x0 + 1 + 2 * margin, y1 - y0 + 1 + 2 * margin
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vx:g} {vy:g} {w:g} {h:g}" '
        f'width="{w * scale:g}" height="{h * scale:g}">',
        "<style>"
        f".even{{fill:{FILL['even']}}}.odd{{fill:{FILL['odd']}}}"
        f".edge{{stroke:{STROKE};stroke-width:0.12}}"
        "</style>",
    ]
    if title:
        out.append(f"<title>{title}</title>")
    for p in sorted(s):
        cls = parity(p) + (" edge" if p in edge else "")
        out.append(f'<rect x="{p[0] - 0.5:g}" y="{-(p[1] + 0.5):g}" width="1" height="1" class="{cls}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_frames(frames: Sequence[Iterable], out_dir: Path, prefix: str = "frame") -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, cells in enumerate(frames):
        path = out_dir / f"{prefix}_{k:03d}.svg"
        path.write_text(svg_frame(cells, title=f"step {k}"))
        paths.append(path)
    return paths


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_trace(trace, path: Path) -> Path:
    """Last step of an evolution next to cell count and energy per step."""
    plt = _pyplot()
    ks = [s.k for s in trace.steps]
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4.5))
    last = trace.steps[-1].cells
    for p in sorted(last):
        ax0.add_patch(plt.Rectangle((p[0] - 0.5, p[1] - 0.5), 1, 1, color=FILL[parity(p)], lw=0))
    if last:
        x0, x1, y0, y1 = last.bbox
        ax0.set_xlim(x0 - 1.5, x1 + 1.5)
        ax0.set_ylim(y0 - 1.5, y1 + 1.5)
    ax0.set_aspect("equal")
    ax0.set_title(f"step {ks[-1]}")
    ax1.plot(ks, [len(s.cells) for s in trace.steps], "o-", label="cells")
    ax1.plot(ks, [float(s.energy.total) for s in trace.steps], "s--", label="step energy")
    ax1.set_xlabel("k")
    ax1.legend(frameon=False)
    fig.suptitle(f"{trace.norm}, alpha = {trace.alpha}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def plot_limit(vertices: Sequence, path: Path, cells: Iterable = (), eps: float = 1.0,
               boundary=None) -> Path:
    """Limit set outline, optionally over rescaled cells or a sampled ball boundary."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 5))
    for p in sorted(as_set(cells)):
        ax.add_patch(plt.Rectangle(((p[0] - 0.5) * eps, (p[1] - 0.5) * eps), eps, eps,
                                   color=FILL[parity(p)], alpha=0.5, lw=0))
    if boundary is not None:
        xs, ys = list(boundary[:, 0]), list(boundary[:, 1])
    else:
        xs = [float(v[0]) for v in vertices]
        ys = [float(v[1]) for v in vertices]
    ax.plot(xs + xs[:1], ys + ys[:1], "k-", lw=1.5)
    ax.set_aspect("equal")
    ax.autoscale()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)
