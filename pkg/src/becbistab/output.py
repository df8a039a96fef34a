"""CSV and manifest writers.

Every CSV starts with a ``# manifest_sha256=...`` comment line followed by the
header row.  Floats are written with ``repr`` (shortest round-trip form), so
identical runs give byte-identical files.
"""

import csv
import hashlib
import json
import os

import numpy as np

from . import __version__
from .params import derived


def fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_jsonable)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def file_sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def build_manifest(command, options, params, input_hash=None, params_source=None):
    return {
        "tool": "becbistab",
        "version": __version__,
        "command": command,
        "options": options,
        "params_source": params_source,
        "params": params.as_dict(),
        "derived": derived(params).as_dict(),
        "input_hash": input_hash,
    }


def manifest_hash(manifest):
    return hashlib.sha256(canonical_json(manifest).encode()).hexdigest()


def write_manifest(out_dir, manifest, name="manifest.json"):
    path = os.path.join(out_dir, name)
    with open(path, "w", newline="\n") as fh:
        fh.write(json.dumps(manifest, sort_keys=True, indent=2, default=_jsonable))
        fh.write("\n")
    return path


def write_csv(path, header, rows, digest):
    with open(path, "w", newline="") as fh:
        fh.write(f"# manifest_sha256={digest}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def branch_rows(result, axis_scale=1.0):
    """(axis values..., n_s, q_s, Q_s, P_s, stability, residual) per branch.

    Axis values are divided by ``axis_scale`` (pass kappa for ratio columns).
    """
    for i, branches in enumerate(result.branches):
        point = [v / axis_scale for v in result.point(i)]
        for b in branches or ():
            yield (*point, b.n_s, b.q_s, b.Q_s, b.P_s, b.stability.value, b.residual)


def trace_rows(result, axis_scale=1.0):
    shape = result.shape
    for direction, trace in (("up", result.up_trace), ("down", result.down_trace)):
        flat = np.asarray(trace).reshape(-1)
        for i in range(int(np.prod(shape))):
            yield (*(v / axis_scale for v in result.point(i)), flat[i], direction)


def trajectory_rows(traj):
    for t, row, n in zip(traj.times, traj.mech, traj.photon_number):
        yield (t, *row, n)


def write_sidecar(path, meta):
    with open(path, "w", newline="\n") as fh:
        fh.write(json.dumps(meta, sort_keys=True, indent=2, default=_jsonable))
        fh.write("\n")
    return path
