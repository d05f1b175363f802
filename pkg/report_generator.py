"""
Report Generator - Writes result tables as CSV and emits plotting scripts
Scripts are plain text for matplotlib; they are never executed here
"""

import io
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.15g"


class UnrecognizedCsv(ValueError):
    """CSV header matches none of the known result schemas."""


SCHEMAS: Dict[str, Tuple[str, ...]] = {
    "norms": ("n", "monomial_norm"),
    "scheme-run": ("input", "n", "error_norm", "image_norm", "lower_opnorm", "upper_opnorm", "tag"),
    "lebesgue": ("n", "L_n"),
    "embed": ("check", "parameter", "value", "bound", "flag"),
    "hb-gram": ("j", "k", "re", "im"),
}


class ReportGenerator:
    """CSV writer and plot-script emitter for experiment tables."""

    def __init__(self, float_format: str = FLOAT_FORMAT):
        self.float_format = float_format

    def to_csv_text(self, frame: pd.DataFrame) -> str:
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False, float_format=self.float_format, na_rep="", lineterminator="\n")
        return buffer.getvalue()

    def write_csv(self, frame: pd.DataFrame, path: Optional[str] = None) -> None:
        """Write to path, or to stdout when path is None."""
        text = self.to_csv_text(frame)
        if path is None:
            sys.stdout.write(text)
            return
        Path(path).write_text(text)
        logger.info("Wrote %d rows to %s", len(frame), path)

    def detect_schema(self, csv_path: str) -> Optional[str]:
        """Schema name for the file, or None for a zero-byte file."""
        path = Path(csv_path)
        if path.stat().st_size == 0:
            return None
        header = tuple(col.strip() for col in path.read_text().splitlines()[0].split(","))
        for name, columns in SCHEMAS.items():
            if header == columns:
                return name
        raise UnrecognizedCsv(f"header {','.join(header)!r} matches no known result schema")

    def generate_plot_script(self, csv_path: str) -> str:
        schema = self.detect_schema(csv_path)
        if schema is None:
            logger.warning("%s is empty; emitting an empty plot", csv_path)
            return self._script(csv_path, [
                "# WARNING: the CSV file was empty, nothing to plot",
                "fig, ax = plt.subplots()",
                "ax.set_title('empty result')",
            ], read=False)
        builders = {
            "norms": self._norms_body,
            "scheme-run": self._scheme_run_body,
            "lebesgue": self._lebesgue_body,
            "embed": self._embed_body,
            "hb-gram": self._hb_gram_body,
        }
        return self._script(csv_path, builders[schema]())

    # ---------- script bodies ----------

    def _script(self, csv_path: str, body: List[str], read: bool = True) -> str:
        lines = [
            '"""Generated plotting script; run with python to render the figure."""',
            "",
            "import matplotlib.pyplot as plt",
        ]
        if read:
            lines += ["import numpy as np", "import pandas as pd", "", f"df = pd.read_csv({str(csv_path)!r})"]
        lines += [""] + body + ["", "fig.tight_layout()", "plt.show()", ""]
        return "\n".join(lines)

    def _norms_body(self) -> List[str]:
        return [
            "fig, ax = plt.subplots()",
            "ax.loglog(df['n'] + 1, df['monomial_norm'], marker='.')",
            "ax.set_xlabel('n + 1')",
            "ax.set_ylabel('||z^n||')",
        ]

    def _scheme_run_body(self) -> List[str]:
        return [
            "fig, (ax_err, ax_img) = plt.subplots(1, 2, figsize=(11, 4))",
            "for name, group in df.groupby('input', sort=False):",
            "    tag = group['tag'].iloc[0]",
            "    ax_err.semilogy(group['n'], group['error_norm'].clip(lower=1e-17), label=f'{name} ({tag})')",
            "    ax_img.plot(group['n'], group['image_norm'], label=name)",
            "ax_err.set_xlabel('n')",
            "ax_err.set_ylabel('||T_n f - f||')",
            "ax_img.set_xlabel('n')",
            "ax_img.set_ylabel('||T_n f||')",
            "ax_err.legend()",
        ]

    def _lebesgue_body(self) -> List[str]:
        return [
            "fig, ax = plt.subplots()",
            "n = df['n'].to_numpy(dtype=float)",
            "ax.semilogx(n + 1, df['L_n'], 'o', label='L_n')",
            "if len(n) >= 2:",
            "    slope, intercept = np.polyfit(np.log(n + 1), df['L_n'], 1)",
            "    grid = np.linspace(n.min(), n.max(), 200) + 1",
            "    ax.semilogx(grid, intercept + slope * np.log(grid), '--', label=f'{slope:.3f} log(n+1) + {intercept:.3f}')",
            "ax.set_xlabel('n + 1')",
            "ax.legend()",
        ]

    def _embed_body(self) -> List[str]:
        return [
            "fig, ax = plt.subplots(figsize=(9, 4))",
            "labels = df['check'] + ' @ ' + df['parameter'].astype(str)",
            "x = np.arange(len(df))",
            "ax.bar(x - 0.2, df['value'], width=0.4, label='value')",
            "ax.bar(x + 0.2, df['bound'], width=0.4, label='bound')",
            "ax.set_xticks(x, labels, rotation=45, ha='right')",
            "ax.set_yscale('symlog', linthresh=1e-12)",
            "ax.legend()",
        ]

    def _hb_gram_body(self) -> List[str]:
        return [
            "size = int(df['j'].max()) + 1",
            "G = np.zeros((size, size), dtype=complex)",
            "G[df['j'], df['k']] = df['re'] + 1j * df['im']",
            "fig, ax = plt.subplots()",
            "image = ax.imshow(np.abs(G), cmap='viridis')",
            "fig.colorbar(image, ax=ax, label='|G[j, k]|')",
            "ax.set_xlabel('k')",
            "ax.set_ylabel('j')",
        ]
