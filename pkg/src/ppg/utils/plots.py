"""Figure helpers on the headless Agg backend."""

from pathlib import Path
from typing import Tuple, Union

import matplotlib as mpl

mpl.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .file_ops import ensure_directory_exists  # noqa: E402

mpl.rcParams.update(
    {
        "axes.labelsize": 10,
        "font.size": 10,
        "legend.fontsize": 8,
        "xtick.labelsize": 8,
        "ytick.labelsize": 8,
        "savefig.dpi": 150,
    }
)


def new_figure(nrows: int = 1, ncols: int = 1, width: float = 6.4, height: float = 4.0) -> Tuple:
    return plt.subplots(nrows=nrows, ncols=ncols, figsize=(width, height))


def save_figure(fig, path: Union[str, Path]) -> Path:
    target = Path(path)
    ensure_directory_exists(str(target.parent))
    fig.savefig(target, bbox_inches="tight")
    plt.close(fig)
    return target
