"""CSV and JSON writers. Reals are written with 17 significant digits."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from firmdyn.bifurcation import feigenbaum_ratios


def fmt(x):
    return format(float(x), ".17g")


def dumps(obj, indent=2):
    """JSON text with every float at 17 significant digits; non-finite -> null."""
    return _encode(obj, indent, 0) + "\n"


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return _string(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_string(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _string(s):
    return json.dumps(s)


def write_json(obj, path):
    Path(path).write_text(dumps(obj))


def write_rows(path, header, rows):
    """Write a CSV with a header line; floats formatted by :func:`fmt`."""
    with Path(path).open("w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def write_diagram_csv(diagram, path):
    with Path(path).open("w", newline="") as fh:
        fh.write("lambda,x\n")
        for lam, samples in zip(diagram.lambdas, diagram.samples):
            lam_s = fmt(lam)
            fh.write("".join(f"{lam_s},{fmt(x)}\n" for x in samples))


def diagram_summary(diagram, calibration=None):
    cfg = diagram.config
    summary = {
        "sweep": {
            "lambda_min": cfg.lambda_min,
            "lambda_max": cfg.lambda_max,
            "grid_points": cfg.grid_points,
            "transient_len": cfg.transient_len,
            "sample_len": cfg.sample_len,
            "x0": cfg.x0,
        },
        "doubling_points": list(diagram.doubling_points),
        "feigenbaum_ratios": feigenbaum_ratios(diagram.doubling_points),
        "accumulation_estimate": diagram.accumulation_estimate,
        "crises": [
            {
                "lambda": c.lam,
                "width_before": c.width_before,
                "width_after": c.width_after,
                "ratio": c.ratio,
            }
            for c in diagram.crises
        ],
    }
    if calibration is not None:
        # forcing amplitude at which each landmark is reached
        summary["forcing_amplitude_at"] = {
            "doubling_points": [calibration.to_amplitude(p) for p in diagram.doubling_points],
            "accumulation": (
                None
                if diagram.accumulation_estimate is None
                else calibration.to_amplitude(diagram.accumulation_estimate)
            ),
            "crises": [calibration.to_amplitude(c.lam) for c in diagram.crises],
        }
    return summary


def write_density_csv(diagram, path, bins):
    edges, counts = diagram.density(bins)
    with Path(path).open("w", newline="") as fh:
        fh.write("lambda,bin_lo,bin_hi,count\n")
        for lam, row in zip(diagram.lambdas, counts):
            lam_s = fmt(lam)
            for k in np.nonzero(row)[0]:
                fh.write(f"{lam_s},{fmt(edges[k])},{fmt(edges[k + 1])},{row[k]}\n")


def write_diagram(diagram, prefix, calibration=None, density_bins=None):
    """Write ``<prefix>.csv`` and ``<prefix>.summary.json``; returns the paths."""
    prefix = str(prefix)
    paths = [Path(prefix + ".csv"), Path(prefix + ".summary.json")]
    write_diagram_csv(diagram, paths[0])
    write_json(diagram_summary(diagram, calibration), paths[1])
    if density_bins:
        paths.append(Path(prefix + ".density.csv"))
        write_density_csv(diagram, paths[2], density_bins)
    return paths
