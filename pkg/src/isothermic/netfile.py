"""Net file format: canonical JSON with deterministic float rendering.

Lifts (not derived 3-space points) are the source of truth.  Floats are
rendered with 17 significant digits, which round-trips doubles exactly, so
loading a canonical file and saving it again is byte-stable.
"""

from __future__ import annotations

import json

import numpy as np

from .conserved import ConservedQuantity
from .errors import DimensionMismatch, ParseError
from .grids import EdgeFunction, GridDomain, VertexField
from .nets import IsothermicNet

FORMAT_NAME = "isothermic-net"
FORMAT_VERSION = 1


def format_float(x: float) -> str:
    """Canonical 17-significant-digit decimal rendering (round-trips doubles)."""
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError("non-finite value cannot be serialized")
    if x == 0.0:  # canonicalize -0.0
        return "0"
    return format(float(x), ".17g")


def _render(obj, out: list, indent: int):
    pad = "  " * indent
    if isinstance(obj, dict):
        out.append("{\n")
        for idx, (key, value) in enumerate(obj.items()):
            out.append(pad + "  " + json.dumps(key) + ": ")
            _render(value, out, indent + 1)
            out.append(",\n" if idx < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else list(obj)
        if _is_number_vector(seq):
            out.append("[" + ", ".join(_fmt_number(x) for x in seq) + "]")
        else:
            out.append("[\n")
            for idx, value in enumerate(seq):
                out.append(pad + "  ")
                _render(value, out, indent + 1)
                out.append(",\n" if idx < len(seq) - 1 else "\n")
            out.append(pad + "]")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif obj is None:
        out.append("null")
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def _is_number_vector(seq) -> bool:
    return all(isinstance(x, (int, float, np.integer, np.floating))
               and not isinstance(x, bool) for x in seq) and len(seq) > 0


def _fmt_number(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format_float(float(x))


def canonical_json(obj) -> str:
    out: list[str] = []
    _render(obj, out, 0)
    out.append("\n")
    return "".join(out)


def net_to_document(net: IsothermicNet, quantities=(), metadata=None) -> dict:
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "rows": net.domain.rows,
        "cols": net.domain.cols,
        "lifts": net.lifts.data,
        "a_u": net.weights.u,
        "a_v": net.weights.v,
    }
    if quantities:
        doc["conserved_quantities"] = [
            {"degree": cq.degree, "coeffs": cq.coeffs} for cq in quantities
        ]
    if metadata:
        doc["metadata"] = metadata
    return doc


def save_net(path, net: IsothermicNet, quantities=(), metadata=None) -> None:
    text = canonical_json(net_to_document(net, quantities, metadata))
    with open(path, "w", encoding="ascii") as fh:
        fh.write(text)


def _require(doc, key, path):
    if key not in doc:
        raise ParseError(f"{path}: missing field '{key}'")
    return doc[key]


def load_net(path):
    """Load (net, quantities, metadata) from a net file.

    Raises
    ------
    ParseError
        On malformed JSON (with line diagnostics) or missing fields.
    DimensionMismatch
        When array shapes disagree with the declared grid size.
    """
    try:
        with open(path, "r", encoding="ascii") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc

    if _require(doc, "format", path) != FORMAT_NAME:
        raise ParseError(f"{path}: not an {FORMAT_NAME} file")
    if _require(doc, "version", path) != FORMAT_VERSION:
        raise ParseError(f"{path}: unsupported version {doc['version']}")
    rows = int(_require(doc, "rows", path))
    cols = int(_require(doc, "cols", path))
    if rows < 1 or cols < 1:
        raise ParseError(f"{path}: grid size must be positive")
    domain = GridDomain(0, rows - 1, 0, cols - 1)

    def array_field(key, shape):
        raw = _require(doc, key, path)
        try:
            arr = np.asarray(raw, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{path}: field '{key}' is not numeric") from exc
        if arr.shape != shape:
            raise DimensionMismatch(
                f"{path}: field '{key}' has shape {arr.shape}, expected {shape}")
        return arr

    lifts = array_field("lifts", (rows, cols, 5))
    a_u = array_field("a_u", (rows - 1,))
    a_v = array_field("a_v", (cols - 1,))
    net = IsothermicNet(domain, VertexField(domain, lifts),
                        EdgeFunction(domain, a_u, a_v))

    quantities = []
    for idx, item in enumerate(doc.get("conserved_quantities", [])):
        degree = item.get("degree")
        coeffs = np.asarray(item.get("coeffs"), dtype=float)
        if degree is None or coeffs.shape != (rows, cols, int(degree) + 1, 5):
            raise DimensionMismatch(
                f"{path}: conserved_quantities[{idx}] has inconsistent shape")
        quantities.append(ConservedQuantity(net, coeffs, check=False))
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ParseError(f"{path}: metadata must be an object")
    return net, quantities, metadata
