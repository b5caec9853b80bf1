"""Figure assembly from exported sweep records.

Marker and cell semantics are fixed here rather than inferred from the
data, so the same CSV always produces the same picture:

* A grid cell is *non-rational* when strictly fewer than half of its
  replicate rows end with ``final_kind == "rational"``. Ties count as
  rational.
* Rational cells plot the mean of ``mean_alpha`` over the rational rows.
* fig1 and fig2 draw non-rational cells as open circles on the alpha = 0
  line; fig3 leaves them blank (white); fig4 ignores kind and averages
  ``welfare_norm`` over every replicate of the cell.
* Missing grid points are rendered as gaps, never interpolated over.

SVG output is reproducible byte for byte: the element-id hash salt is
pinned and the creation date is stripped from the metadata.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .records import Row, read_rows

FIGURES = ("fig1", "fig2", "fig3", "fig4")

_HASHSALT = "figrender"
_SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                  "#8c564b", "#e377c2")
_OPEN_GID = "nonrational-open"
_FILLED_GID = "rational-filled"
_MESH_GID = "alpha-cells"


@dataclass(frozen=True)
class FigureSpec:
    figure: str
    csv_in: str
    image_out: str

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ValueError(f"figure must be one of {FIGURES}, "
                             f"got {self.figure!r}")


@dataclass(frozen=True)
class CellStat:
    """Aggregate of all replicate rows sharing one grid coordinate."""

    n: int
    n_rational: int
    alpha: float  # mean over rational rows; nan when none
    welfare_norm: float  # mean over all rows with a defined value

    @property
    def nonrational(self) -> bool:
        return 2 * self.n_rational < self.n


def group_cells(rows: list[Row], key: Callable[[Row], tuple]) -> dict:
    buckets: dict[tuple, list[Row]] = {}
    for row in rows:
        buckets.setdefault(key(row), []).append(row)
    out = {}
    for k, members in buckets.items():
        alphas = [r.mean_alpha for r in members
                  if r.final_kind == "rational" and not math.isnan(r.mean_alpha)]
        welfares = [r.welfare_norm for r in members
                    if not math.isnan(r.welfare_norm)]
        out[k] = CellStat(
            n=len(members),
            n_rational=sum(1 for r in members if r.final_kind == "rational"),
            alpha=(sum(alphas) / len(alphas)) if alphas else math.nan,
            welfare_norm=(sum(welfares) / len(welfares)) if welfares
            else math.nan,
        )
    return out


def fig3_matrix(rows: list[Row]):
    """(kappa1 grid, p grid, masked alpha matrix) for the heatmap.

    Matrix shape is (len(p), len(kappa1)) so p runs along the vertical
    axis. Non-rational cells and absent grid points are masked; masked
    cells render white.
    """
    cells = group_cells(rows, lambda r: (r.kappa1, r.p))
    k1s = sorted({k for k, _ in cells})
    ps = sorted({p for _, p in cells})
    data = np.full((len(ps), len(k1s)), np.nan)
    for (k1, p), stat in cells.items():
        if stat.nonrational:
            continue
        data[ps.index(p), k1s.index(k1)] = stat.alpha
    return k1s, ps, np.ma.masked_invalid(data)


def _split_series(cells: dict, xs: list) -> tuple[list, list, list]:
    """x/y arrays for the filled (rational) points plus open-marker xs.

    The filled y-array carries nan at open or missing grid points so a
    connecting line breaks there instead of bridging the gap.
    """
    filled_y = []
    open_x = []
    for x in xs:
        stat = cells.get(x)
        if stat is None:
            filled_y.append(math.nan)
        elif stat.nonrational:
            filled_y.append(math.nan)
            open_x.append(x)
        else:
            filled_y.append(stat.alpha)
    return xs, filled_y, open_x


def _scatter_open(ax, xs, ys, color: str, gid: Optional[str] = None):
    sc = ax.scatter(xs, ys, s=55, facecolors="none", edgecolors=color,
                    linewidths=1.4, zorder=3)
    if gid is not None:
        sc.set_gid(gid)
    return sc


def _render_fig1(ax, rows):
    cells = group_cells(rows, lambda r: (r.kappa1,))
    xs = sorted(k[0] for k in cells)
    stats = {k[0]: v for k, v in cells.items()}
    filled_x = [x for x in xs if not stats[x].nonrational]
    filled_y = [stats[x].alpha for x in filled_x]
    open_x = [x for x in xs if stats[x].nonrational]
    if filled_x:
        sc = ax.scatter(filled_x, filled_y, s=30, color=_SERIES_COLORS[0],
                        zorder=3)
        sc.set_gid(_FILLED_GID)
    if open_x:
        _scatter_open(ax, open_x, [0.0] * len(open_x), _SERIES_COLORS[0],
                      _OPEN_GID)
    ax.axhline(0.0, color="0.8", lw=0.6, zorder=1)
    ax.set_xlabel(r"$\kappa_1$")
    ax.set_ylabel(r"$\alpha$")


def _render_fig2(ax, rows):
    cells = group_cells(rows, lambda r: (r.kappa1, r.kappa2, r.p))
    pairs = sorted({(k1, k2) for k1, k2, _ in cells})
    open_total_x: list[float] = []
    open_total_y: list[float] = []
    for idx, (k1, k2) in enumerate(pairs):
        color = _SERIES_COLORS[idx % len(_SERIES_COLORS)]
        sub = {p: v for (a, b, p), v in cells.items()
               if (a, b) == (k1, k2)}
        xs = sorted(sub)
        xs, ys, open_x = _split_series(sub, xs)
        ax.plot(xs, ys, marker="o", ms=4, color=color,
                label=f"$\\kappa_1$={k1:g}, $\\kappa_2$={k2:g}")
        for x in open_x:
            open_total_x.append(x)
            open_total_y.append(0.0)
    if open_total_x:
        _scatter_open(ax, open_total_x, open_total_y, "0.25", _OPEN_GID)
    ax.axhline(0.0, color="0.8", lw=0.6, zorder=1)
    ax.set_xlabel("$p$")
    ax.set_ylabel(r"$\alpha$")
    ax.legend(frameon=False, fontsize=8)


def _render_fig3(fig, ax, rows):
    k1s, ps, data = fig3_matrix(rows)
    cmap = matplotlib.colormaps["viridis"].copy()
    cmap.set_bad("white")
    mesh = ax.pcolormesh(
        np.arange(len(k1s) + 1) - 0.5,
        np.arange(len(ps) + 1) - 0.5,
        data, cmap=cmap, shading="flat")
    mesh.set_gid(_MESH_GID)
    ax.set_xticks(range(len(k1s)))
    ax.set_xticklabels([f"{v:g}" for v in k1s], rotation=90, fontsize=7)
    ax.set_yticks(range(len(ps)))
    ax.set_yticklabels([f"{v:g}" for v in ps], fontsize=7)
    ax.set_xlabel(r"$\kappa_1$")
    ax.set_ylabel("$p$")
    fig.colorbar(mesh, ax=ax, label=r"$\alpha$")


def _render_fig4(ax, rows):
    cells = group_cells(rows, lambda r: (r.p, r.eps_p))
    p_values = sorted({p for p, _ in cells})
    for idx, p in enumerate(p_values):
        color = _SERIES_COLORS[idx % len(_SERIES_COLORS)]
        sub = {e: v for (q, e), v in cells.items() if q == p}
        xs = sorted(sub)
        ys = [sub[e].welfare_norm for e in xs]
        (line,) = ax.plot(xs, ys, marker="o", ms=3, color=color,
                          label=f"$p$={p:g}")
        line.set_gid(f"welfare-curve-{idx}")
    ax.set_xlabel(r"$\epsilon_P$")
    ax.set_ylabel("normalized welfare")
    ax.legend(frameon=False, fontsize=8)


def render(spec: FigureSpec) -> int:
    """Render one figure; returns the number of data rows consumed.

    Zero rows still writes an axes-only picture so CI artifacts show
    which figure was attempted; the caller decides how loudly to warn.
    """
    rows = read_rows(spec.csv_in)
    with plt.rc_context({"svg.hashsalt": _HASHSALT}):
        fig, ax = plt.subplots(figsize=(6.4, 4.4), dpi=100)
        try:
            if rows:
                if spec.figure == "fig1":
                    _render_fig1(ax, rows)
                elif spec.figure == "fig2":
                    _render_fig2(ax, rows)
                elif spec.figure == "fig3":
                    _render_fig3(fig, ax, rows)
                else:
                    _render_fig4(ax, rows)
            else:
                ax.set_xlabel("")
                ax.set_ylabel("")
                ax.set_title(f"{spec.figure}: no data")
            fig.tight_layout()
            kwargs = {}
            if spec.image_out.endswith(".svg"):
                # strip the creation timestamp so re-rendering the same
                # CSV is byte-identical
                kwargs["metadata"] = {"Date": None}
            fig.savefig(spec.image_out, **kwargs)
        finally:
            plt.close(fig)
    return len(rows)
