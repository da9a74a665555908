"""Figure rendering for result tables.

The CLI report path optionally renders each scenario's table to a PNG next
to the CSV.  Plots are deliberately generic: the first numeric column is the
abscissa, every other numeric column becomes one trace; integer-valued
traces are drawn as steps so index jumps are visible.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def _as_float(cell: str):
    try:
        return float(cell)
    except ValueError:
        return None


def render_table(headers, rows, path: str, title: str = "") -> bool:
    """Render a rectangular string table; returns False when nothing plottable."""
    if not rows:
        return False
    cols = list(zip(*rows))
    numeric = []
    for name, col in zip(headers, cols):
        vals = [_as_float(c) for c in col]
        if all(v is not None for v in vals):
            numeric.append((name, vals))
    if len(numeric) < 2 or len(rows) < 2:
        return False
    xname, xs = numeric[0]
    fig, ax = plt.subplots(figsize=(7.0, 4.4))
    for name, ys in numeric[1:]:
        integral = all(abs(v - round(v)) < 1e-12 for v in ys)
        if integral and len(set(ys)) > 1:
            ax.step(xs, ys, where="mid", label=name, lw=1.6)
        else:
            ax.plot(xs, ys, marker="o", ms=3.5, lw=1.2, label=name)
    ax.set_xlabel(xname)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=9)
    if title:
        ax.set_title(title, fontsize=11)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return True
