"""Figure construction from validated sweep rows."""

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .loader import SchemaError, SweepRow, load_rows, select_scenario

_SCHEME_STYLE = {
    "bm1": dict(color="#d62728", marker="s", label="static baseline"),
    "bm2": dict(color="#ff9f40", marker="^", label="dominant-bin adjust"),
    "proposed": dict(color="#1f77b4", marker="o", label="multi-bin adjust"),
    "perfect": dict(color="#2ca02c", marker="d", label="perfect knowledge"),
}


@dataclass(frozen=True)
class PanelSpec:
    metric: str
    schemes: tuple[str, ...]
    y_label: str
    log_y: bool = False


@dataclass(frozen=True)
class FigureSpec:
    """One output image: a scenario, an x-axis parameter, its panels,
    and where the image goes."""

    name: str
    scenario: str
    x_param: str
    x_label: str
    panels: tuple[PanelSpec, ...]
    out_path: str


def build_spec(name: str, out_path: str) -> FigureSpec:
    mp_schemes = ("bm1", "bm2", "proposed")
    if name == "fig2":
        return FigureSpec(
            name=name,
            scenario="multipath-power",
            x_param="tx_power_dbm",
            x_label="transmit power (dBm)",
            panels=(
                PanelSpec("nmse", mp_schemes, "NMSE", log_y=True),
                PanelSpec("rate_ratio", mp_schemes, "rate / perfect-knowledge rate"),
            ),
            out_path=out_path,
        )
    if name == "fig3":
        return FigureSpec(
            name=name,
            scenario="multipath-eta",
            x_param="eta",
            x_label="non-dominant tap power ratio",
            panels=(
                PanelSpec("nmse", mp_schemes, "NMSE", log_y=True),
                PanelSpec(
                    "rate_bpshz",
                    mp_schemes + ("perfect",),
                    "achievable rate (bit/s/Hz)",
                ),
            ),
            out_path=out_path,
        )
    if name == "fig4":
        return FigureSpec(
            name=name,
            scenario="singlepath-m",
            x_param="m",
            x_label="sub-surfaces",
            panels=(
                PanelSpec(
                    "rate_bpshz",
                    ("proposed", "perfect"),
                    "achievable rate (bit/s/Hz)",
                ),
                PanelSpec("latency_symbols", ("proposed",), "pilot symbols"),
            ),
            out_path=out_path,
        )
    raise ValueError(f"unknown figure spec {name}, expected fig2|fig3|fig4")


def _series(rows: list[SweepRow], scheme: str, metric: str):
    cells = [r for r in rows if r.scheme == scheme and r.metric == metric]
    cells.sort(key=lambda r: r.value)
    return (
        [r.value for r in cells],
        [r.mean for r in cells],
        [r.stderr for r in cells],
    )


def build_figure(rows: list[SweepRow], spec: FigureSpec):
    """Assemble the matplotlib figure; separate from file output so tests
    can inspect the axes."""
    rows = select_scenario(rows, spec.scenario)
    for panel in spec.panels:
        if not any(r.metric == panel.metric for r in rows):
            raise SchemaError(
                f"metric {panel.metric} not present in scenario {spec.scenario}"
            )
    fig, axes = plt.subplots(
        1, len(spec.panels), figsize=(5.0 * len(spec.panels), 3.8)
    )
    if len(spec.panels) == 1:
        axes = [axes]
    for ax, panel in zip(axes, spec.panels):
        for scheme in panel.schemes:
            x, y, err = _series(rows, scheme, panel.metric)
            if not x:
                continue
            ax.errorbar(x, y, yerr=err, capsize=3.0, **_SCHEME_STYLE[scheme])
        if panel.log_y:
            ax.set_yscale("log")
        ax.set_xlabel(spec.x_label)
        ax.set_ylabel(panel.y_label)
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
    fig.tight_layout()
    return fig, axes


# savefig metadata that would make re-renders differ, per format
_VOLATILE_METADATA = {
    "png": {"Software": None},
    "pdf": {"Creator": None, "Producer": None, "CreationDate": None},
    "svg": {"Date": None},
}


def render(csv_path: str, spec: FigureSpec) -> str:
    """Render one image from a sweep CSV; returns the output path.

    Re-rendering the same inputs writes identical bytes (no timestamps
    or version strings are embedded for png, pdf, or svg output).
    """
    rows = load_rows(csv_path)
    fig, _ = build_figure(rows, spec)
    ext = spec.out_path.rsplit(".", 1)[-1].lower()
    try:
        fig.savefig(
            spec.out_path, dpi=120, metadata=_VOLATILE_METADATA.get(ext)
        )
    finally:
        plt.close(fig)
    return spec.out_path
