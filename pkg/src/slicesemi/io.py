"""JSON and CSV formats for elements, operators, spectra and traces.

Elements:   ``{"algebra": "H", "coeffs": [a, b, c, d]}``
Operators:  ``{"algebra": "H", "m": 2, "entries": [[[...], [...]], [[...], [...]]]}``
Vectors:    ``{"algebra": "H", "m": 2, "coeffs": [[...], [...]]}`` (an element counts as ``m = 1``)
Spectra:    CSV rows ``a,b,multiplicity``
Traces:     CSV with header ``t,c0,c1,...`` holding the flattened coefficients of ``T(t) x`` or ``T(t)``
"""

from __future__ import annotations

import csv
import io as _io
import json
import sys
from pathlib import Path

import numpy as np

from .algebra import AlgebraDescriptor, AlgebraElement, algebra
from .operators import OperatorMatrix, Sphere, SphereSpectrum


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys, shortest round-trip floats)."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def read_json(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_text(path: str | Path | None, text: str) -> None:
    """Write to ``path`` or to stdout when ``path`` is None or ``"-"``."""
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def element_from_json(data: dict) -> AlgebraElement:
    return AlgebraElement.from_dict(data)


def element_to_json(x: AlgebraElement) -> dict:
    return x.to_dict()


def load_element(spec: str, desc: AlgebraDescriptor | None = None) -> AlgebraElement:
    """Read an element from a JSON file, or parse it as text like ``"1+2k"``."""
    if Path(spec).is_file():
        x = element_from_json(read_json(spec))
        if desc is not None and x.desc != desc:
            raise ValueError(f"{spec} holds a {x.desc.name} element, expected {desc.name}")
        return x
    if desc is None:
        raise ValueError(f"{spec!r} is not a file; pass --algebra to parse it as an element")
    return desc.parse_element(spec)


def operator_from_json(data: dict) -> OperatorMatrix:
    return OperatorMatrix.from_dict(data)


def operator_to_json(A: OperatorMatrix) -> dict:
    return A.to_dict()


def load_operator(path: str | Path) -> OperatorMatrix:
    return operator_from_json(read_json(path))


def vector_from_json(data: dict) -> tuple[AlgebraDescriptor, np.ndarray]:
    desc = algebra(data["algebra"])
    coeffs = np.asarray(data["coeffs"], dtype=float)
    if coeffs.ndim == 1:
        coeffs = coeffs[None, :]
    if coeffs.ndim != 2 or coeffs.shape[1] != desc.dim:
        raise ValueError(f"vector coefficients must have shape (m, {desc.dim})")
    if "m" in data and int(data["m"]) != coeffs.shape[0]:
        raise ValueError("declared m does not match the coefficients")
    return desc, coeffs


def vector_to_json(desc: AlgebraDescriptor, x: np.ndarray) -> dict:
    x = np.asarray(x, dtype=float)
    return {"algebra": desc.name, "m": int(x.shape[0]), "coeffs": [[float(c) for c in row] for row in x]}


def spectrum_to_csv(spec: SphereSpectrum) -> str:
    return spec.to_csv()


def spectrum_from_csv(text: str) -> SphereSpectrum:
    spheres = []
    for row in csv.reader(_io.StringIO(text)):
        if row:
            spheres.append(Sphere(float(row[0]), float(row[1]), int(row[2])))
    return SphereSpectrum(tuple(spheres))


def trace_to_csv(times: np.ndarray, values: np.ndarray) -> str:
    """``values`` has shape ``(len(times), ...)``; each row is flattened."""
    values = np.asarray(values, dtype=float).reshape(len(times), -1)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [f"c{k}" for k in range(values.shape[1])])
    for t, row in zip(times, values):
        w.writerow([repr(float(t))] + [repr(float(v)) for v in row])
    return buf.getvalue()


def trace_from_csv(text: str) -> tuple[np.ndarray, np.ndarray]:
    rows = list(csv.reader(_io.StringIO(text)))
    data = np.array([[float(v) for v in row] for row in rows[1:] if row])
    return data[:, 0], data[:, 1:]


def table_from_csv(text: str) -> tuple[list[str], list[list[str]]]:
    """Parse the multiplication-table CSV into basis names and signed cells."""
    rows = list(csv.reader(_io.StringIO(text)))
    names = rows[0][1:]
    return names, [row[1:] for row in rows[1:] if row]
