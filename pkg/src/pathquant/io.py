"""Bit-exact storage of sections and kernels: a JSON header next to a raw
little-endian complex128 sidecar (row-major)."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .grid import GridSection, GridSpec
from .quantizer import OperatorKernel

FORMAT_VERSION = 1
_DTYPE = np.dtype("<c16")


def _save(path, kind, spec, hbar, values, extra=None):
    path = Path(path)
    sidecar = path.with_suffix(".bin")
    header = {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "half_width": float(spec.half_width).hex(),
        "n": int(spec.n),
        "hbar": float(hbar).hex(),
        "shape": list(values.shape),
        "dtype": "complex128-le",
        "order": "row-major",
        "data": sidecar.name,
    }
    if extra:
        header.update(extra)
    np.ascontiguousarray(values, dtype=_DTYPE).tofile(sidecar)
    path.write_text(json.dumps(header, indent=2) + "\n", encoding="utf-8")
    return path


def _load(path, kind):
    path = Path(path)
    header = json.loads(path.read_text(encoding="utf-8"))
    if header.get("format_version") != FORMAT_VERSION or header.get("kind") != kind:
        raise ValueError(f"{path} is not a {kind} file of version {FORMAT_VERSION}")
    spec = GridSpec(float.fromhex(header["half_width"]), header["n"])
    hbar = float.fromhex(header["hbar"])
    raw = np.fromfile(path.parent / header["data"], dtype=_DTYPE)
    shape = tuple(header["shape"])
    if raw.size != int(np.prod(shape)):
        raise ValueError("sidecar size does not match header")
    return spec, hbar, raw.reshape(shape)


def save_section(section, path):
    """Write ``section`` to ``path`` (JSON) and ``path.bin``; values are
    indexed ``[i_p, j_q]``."""
    return _save(path, "section", section.spec, section.hbar, section.values)


def load_section(path):
    spec, hbar, values = _load(path, "section")
    return GridSection(spec, values, hbar)


def save_kernel(kernel, path):
    """Write a kernel; entry ``[a, b]`` is ``K(u1, u0)`` with ``u1`` the row
    (output point) and ``u0`` the column, both flattened as ``i_p * n + j_q``."""
    return _save(path, "kernel", kernel.spec, kernel.hbar, kernel.values,
                 {"index_order": "[u1, u0], u = i_p * n + j_q"})


def load_kernel(path):
    spec, hbar, values = _load(path, "kernel")
    return OperatorKernel(spec, values, hbar)
