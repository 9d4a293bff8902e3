"""Problem and report files.

Both are JSON with complex numbers stored as [re, im] pairs. Floats are
written with Python's round-trip repr, so save -> load is exact to the
bit for finite values, and key order is fixed, so identical content means
identical bytes. Writes go through a temp file plus rename.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import FileFormatError
from .model import IndexSet, SampleSet, Uniform

SCHEMA_VERSION = "dynspec-1"


def complex_to_pairs(values) -> list:
    arr = np.asarray(values, dtype=np.complex128).ravel()
    return [[float(z.real), float(z.imag)] for z in arr]


def pairs_to_complex(pairs, name: str = "value list") -> np.ndarray:
    try:
        return np.array([complex(float(re), float(im)) for re, im in pairs],
                        dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"{name}: expected a list of [re, im] pairs") from exc


def atomic_write_json(path: str, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path} is not valid JSON: {exc}") from exc


def _sampler_to_json(sampler):
    if isinstance(sampler, Uniform):
        return {"type": "uniform", "m": sampler.m}
    return {"type": "indices", "omega": [int(i) for i in sampler.omega]}


def _sampler_from_json(obj):
    if not isinstance(obj, dict) or "type" not in obj:
        raise FileFormatError("sampler must be an object with a 'type' field")
    if obj["type"] == "uniform":
        return Uniform(int(obj["m"]))
    if obj["type"] == "indices":
        return IndexSet(tuple(int(i) for i in obj["omega"]))
    raise FileFormatError(f"unknown sampler type {obj['type']!r}")


@dataclass(frozen=True, eq=False)
class Problem:
    """A loaded problem file: the sample set plus optional ground truth."""

    sample_set: SampleSet
    truth_taps: np.ndarray | None = None
    truth_signal: np.ndarray | None = None

    @property
    def has_truth(self) -> bool:
        return self.truth_taps is not None or self.truth_signal is not None


def save_problem(path: str, samples: SampleSet,
                 truth_taps=None, truth_signal=None) -> None:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "d": samples.d,
        "sampler": _sampler_to_json(samples.sampler),
        "L_total": samples.L_total,
        "samples": [complex_to_pairs(level) for level in samples.samples],
    }
    truth = {}
    if truth_taps is not None:
        truth["filter"] = complex_to_pairs(truth_taps)
    if truth_signal is not None:
        truth["signal"] = complex_to_pairs(truth_signal)
    if truth:
        payload["ground_truth"] = truth
    atomic_write_json(path, payload)


def load_problem(path: str) -> Problem:
    obj = _load_json(path)
    if not isinstance(obj, dict):
        raise FileFormatError(f"{path}: problem file must be a JSON object")
    if obj.get("schema_version") != SCHEMA_VERSION:
        raise FileFormatError(
            f"{path}: schema_version {obj.get('schema_version')!r}, expected {SCHEMA_VERSION!r}")
    for key in ("d", "sampler", "L_total", "samples"):
        if key not in obj:
            raise FileFormatError(f"{path}: missing field {key!r}")
    d = int(obj["d"])
    sampler = _sampler_from_json(obj["sampler"])
    levels = obj["samples"]
    if not isinstance(levels, list) or len(levels) != int(obj["L_total"]):
        raise FileFormatError(f"{path}: samples length does not match L_total")
    try:
        data = np.array([pairs_to_complex(level, "sample level") for level in levels],
                        dtype=np.complex128)
    except ValueError as exc:
        raise FileFormatError(f"{path}: ragged sample levels") from exc
    try:
        sample_set = SampleSet(d, sampler, data)
    except Exception as exc:
        raise FileFormatError(f"{path}: {exc}") from exc
    truth = obj.get("ground_truth", {})
    if not isinstance(truth, dict):
        raise FileFormatError(f"{path}: ground_truth must be an object")
    taps = pairs_to_complex(truth["filter"], "ground-truth filter") if "filter" in truth else None
    signal = pairs_to_complex(truth["signal"], "ground-truth signal") if "signal" in truth else None
    if taps is not None and taps.size != d:
        raise FileFormatError(f"{path}: ground-truth filter has length {taps.size}, expected {d}")
    if signal is not None and signal.size != d:
        raise FileFormatError(f"{path}: ground-truth signal has length {signal.size}, expected {d}")
    return Problem(sample_set, taps, signal)


def save_report(path: str, report: dict) -> None:
    atomic_write_json(path, report)


def load_report(path: str) -> dict:
    obj = _load_json(path)
    if not isinstance(obj, dict):
        raise FileFormatError(f"{path}: report file must be a JSON object")
    if obj.get("schema_version") != SCHEMA_VERSION:
        raise FileFormatError(
            f"{path}: schema_version {obj.get('schema_version')!r}, expected {SCHEMA_VERSION!r}")
    if "mode" not in obj:
        raise FileFormatError(f"{path}: missing field 'mode'")
    return obj
