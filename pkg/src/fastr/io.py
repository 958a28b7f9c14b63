"""File formats: FTRT binary tensors, response/prediction CSVs, the JSON
model document, and run manifests.

FTRT layout: magic "FTRT", u32 version (1), u32 order M, M u64 dims, then
prod(dims) little-endian float64 values in row-major order. A dataset file
is a single FTRT record whose leading dimension is the sample count. A
factor-set file concatenates one FTRT record per factor vector.
"""

import json
import struct

import numpy as np

MAGIC = b"FTRT"
FORMAT_VERSION = 1
MODEL_FORMAT = "fastr-model"
MODEL_VERSION = 1


class FormatError(ValueError):
    """Malformed or unsupported on-disk data."""


def _write_record(fh, arr):
    arr = np.ascontiguousarray(arr, dtype="<f8")
    fh.write(MAGIC)
    fh.write(struct.pack("<II", FORMAT_VERSION, arr.ndim))
    fh.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
    fh.write(arr.tobytes())


def _read_record(fh):
    magic = fh.read(4)
    if magic == b"":
        return None
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    head = fh.read(8)
    if len(head) != 8:
        raise FormatError("truncated header")
    version, order = struct.unpack("<II", head)
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported version {version}")
    if order < 1:
        raise FormatError("tensor order must be >= 1")
    raw = fh.read(8 * order)
    if len(raw) != 8 * order:
        raise FormatError("truncated dims")
    dims = struct.unpack(f"<{order}Q", raw)
    count = int(np.prod(dims))
    payload = fh.read(8 * count)
    if len(payload) != 8 * count:
        raise FormatError("truncated payload")
    return np.frombuffer(payload, dtype="<f8").reshape(dims).copy()


def write_tensor(path, arr):
    with open(path, "wb") as fh:
        _write_record(fh, arr)


def read_tensor(path):
    with open(path, "rb") as fh:
        arr = _read_record(fh)
        if arr is None:
            raise FormatError(f"{path}: empty file")
        if fh.read(1):
            raise FormatError(f"{path}: trailing bytes after tensor record")
    return arr


def write_factors(path, factors):
    with open(path, "wb") as fh:
        for f in factors:
            _write_record(fh, np.asarray(f, dtype=np.float64).reshape(-1))


def read_factors(path):
    factors = []
    with open(path, "rb") as fh:
        while True:
            rec = _read_record(fh)
            if rec is None:
                break
            factors.append(rec.reshape(-1))
    if not factors:
        raise FormatError(f"{path}: no factor records")
    return factors


def write_vector_csv(path, values):
    with open(path, "w", encoding="utf-8") as fh:
        for v in np.asarray(values, dtype=np.float64):
            fh.write(f"{float(v)!r}\n")


def read_vector_csv(path):
    values = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                try:
                    values.append(float(line))
                except ValueError as exc:
                    raise FormatError(f"{path}: bad value {line!r}") from exc
    if not values:
        raise FormatError(f"{path}: empty vector")
    return np.array(values, dtype=np.float64)


def save_model(path, report, cfg):
    """Persist fitted factors, config, and convergence trace as JSON.

    Floats are serialized with shortest round-trip repr, so loading is
    bitwise exact.
    """
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "order": len(report.factors),
        "dims": [int(f.size) for f in report.factors],
        "factors": [[float(v) for v in f] for f in report.factors],
        "config": {
            "lambda": cfg.lam,
            "epsilon": cfg.epsilon,
            "max_iter": cfg.max_iter,
            "tol": cfg.tol,
            "seed": cfg.seed,
            "rescale": cfg.rescale,
            "anneal": cfg.anneal,
        },
        "trace": {
            "iterations": report.iterations,
            "converged": report.converged,
            "rel_change": [float(v) for v in report.rel_change_trace],
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON") from exc
    if doc.get("format") != MODEL_FORMAT or doc.get("version") != MODEL_VERSION:
        raise FormatError(f"{path}: not a version-{MODEL_VERSION} model document")
    factors = [np.array(f, dtype=np.float64) for f in doc["factors"]]
    if [f.size for f in factors] != list(doc["dims"]):
        raise FormatError(f"{path}: factor lengths disagree with dims")
    return factors, doc


def write_manifest(path, manifest):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, default=str)
        fh.write("\n")
