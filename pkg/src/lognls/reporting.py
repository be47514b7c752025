"""Artifact emission: records.csv, manifests, SVG plots, gnuplot script.

The CSV is the canonical, byte-reproducible output: 17 significant digits,
'.' decimal separator, '\n' line endings, rows sorted by (eps, a, seed_id).
Manifests are written before computation starts and finalized afterwards so
interrupted runs are detectable.  Plots are presentation only.
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path

__all__ = [
    "records_header",
    "write_records_csv",
    "git_blob_sha1",
    "start_manifest",
    "finalize_manifest",
    "write_plots",
    "write_gnuplot_script",
]


def records_header(dim: int) -> str:
    bary = "bary_x" if dim == 1 else "bary_x,bary_y"
    return f"eps,a,seed_id,{'lambda'},energy,{bary},dist_to_M,v_at_max,converged"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_records_csv(records, path, dim: int):
    lines = [records_header(dim)]
    for r in records:
        bary = ",".join(_fmt(c) for c in r.bary)
        lines.append(",".join([
            _fmt(r.eps), _fmt(r.a), r.seed_id, _fmt(r.lam), _fmt(r.energy),
            bary, _fmt(r.dist_to_m), _fmt(r.v_at_max),
            "true" if r.converged else "false",
        ]))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def git_blob_sha1(data) -> str:
    """Content hash the way git hashes a blob: sha1(b'blob <len>\\0' + data)."""
    if isinstance(data, str):
        data = data.encode()
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def start_manifest(outdir: Path, command: str, config) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "manifest.json"
    payload = {
        "status": "running",
        "command": command,
        "started_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "config_echo": dict(sorted(config.entries.items())),
        "config_hash": git_blob_sha1(config.raw_text),
        "outputs": [],
    }
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path


def finalize_manifest(path: Path, outputs):
    payload = json.loads(path.read_text())
    payload["status"] = "complete"
    payload["finished_at"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    payload["outputs"] = sorted(str(o) for o in outputs)
    path.write_text(json.dumps(payload, indent=2) + "\n")


def write_gnuplot_script(outdir: Path) -> Path:
    path = outdir / "plot.gp"
    path.write_text(
        "# gnuplot companion for records.csv (presentation only)\n"
        "set datafile separator \",\"\n"
        "set key autotitle columnhead\n"
        "set xlabel \"eps\"\n"
        "set terminal svg size 800,600\n"
        "set output \"records_energy.svg\"\n"
        "plot \"records.csv\" using 1:5 with linespoints title \"energy\"\n"
        "set output \"records_v_at_max.svg\"\n"
        "plot \"records.csv\" using 1:($8) with linespoints title \"V at max\"\n",
    )
    return path


def write_plots(outdir: Path, records=None, levels=None) -> list:
    """SVG line charts: energy vs eps, V-at-max vs eps, levels vs mu."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    made = []
    if records:
        by_eps = {}
        for r in records:
            by_eps.setdefault(r.eps, []).append(r)
        eps = sorted(by_eps)
        if len(eps) >= 1:
            best = [min(by_eps[e], key=lambda r: r.energy) for e in eps]
            for attr, fname, label in (
                ("energy", "energy_vs_eps.svg", "lowest energy"),
                ("v_at_max", "v_at_max_vs_eps.svg", "V at the maximum node"),
            ):
                fig, ax = plt.subplots(figsize=(5, 3.5))
                ax.plot(eps, [getattr(b, attr) for b in best], "o-")
                ax.set_xlabel("eps")
                ax.set_ylabel(label)
                fig.tight_layout()
                p = outdir / fname
                fig.savefig(p)
                plt.close(fig)
                made.append(p)
    if levels:
        by_a = {}
        for (mu, a), val in levels.items():
            by_a.setdefault(a, []).append((mu, val))
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for a, pairs in sorted(by_a.items()):
            pairs.sort()
            ax.plot([p[0] for p in pairs], [p[1] for p in pairs], "o-", label=f"a={a:g}")
        ax.set_xlabel("mu")
        ax.set_ylabel("measured level")
        ax.legend()
        fig.tight_layout()
        p = outdir / "levels_vs_mu.svg"
        fig.savefig(p)
        plt.close(fig)
        made.append(p)
    return made
