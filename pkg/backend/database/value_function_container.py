"""
Binary container for solved value functions.

Layout: the magic line ``CBVF1``, a text header of ``key value`` lines,
a blank line, then every slice as little-endian 64-bit floats, slices in
stored-time order and each row-major with the last dimension fastest::

    CBVF1
    ndim 2
    dim 0 -1.0 5.0 161 0
    dim 1 -2.0 2.0 161 0
    gamma 0.2
    model double_integrator
    request u=-0.5:0.5;d=-0.2:0.2;cfl=0.5;time_scheme=tvd_rk3;stationary_tol=1e-06;max_steps=100000
    slices 3
    times 0.0 -2.5 -5.0

    <payload>

The ``request`` line is optional.
Header floats are written with ``repr``, which round-trips exactly.
"""

from __future__ import annotations

import os

import numpy as np

from backend.cbvf_solver import ValueFunction
from backend.state_grid import MAX_DIMENSIONS, GridSpec, GridSpecError, ScalarField, build_grid

MAGIC = b"CBVF1\n"
MAGIC_PREFIX = b"CBVF"
PAYLOAD_DTYPE = np.dtype("<f8")


class ContainerFormatError(ValueError):
    """The data is not a well-formed value-function container."""

    code = 10


class ContainerVersionError(ContainerFormatError):
    """The container was written by an unsupported format version."""

    code = 11


class ContainerTruncatedError(ContainerFormatError):
    """The payload is shorter than its header promises."""

    code = 12

    def __init__(self, expected: int, found: int) -> None:
        super().__init__(
            f"Container payload truncated: expected {expected} bytes, found {found}."
        )
        self.expected = expected
        self.found = found


class ContainerDimensionError(ContainerFormatError):
    """The header's dimensions are inconsistent or unsupported."""

    code = 13


def dump_value_function(vf: ValueFunction) -> bytes:
    """Encode ``vf`` as container bytes."""
    spec = vf.grid.spec
    lines = [f"ndim {spec.ndim}"]
    for i in range(spec.ndim):
        lines.append(
            f"dim {i} {spec.lo[i]!r} {spec.hi[i]!r} {spec.n[i]} {int(spec.periodic[i])}"
        )
    model_name = vf.model_name or "unknown"
    if any(ch.isspace() for ch in model_name):
        raise ValueError(f"Model name {model_name!r} may not contain whitespace.")
    lines.append(f"gamma {vf.gamma!r}")
    lines.append(f"model {model_name}")
    if vf.request is not None:
        if not vf.request or any(ch.isspace() for ch in vf.request):
            raise ValueError(f"Solve request {vf.request!r} must be non-empty without whitespace.")
        lines.append(f"request {vf.request}")
    lines.append(f"slices {len(vf.slices)}")
    lines.append("times " + " ".join(repr(float(t)) for t in vf.times))
    header = ("\n".join(lines) + "\n\n").encode("ascii")
    payload = b"".join(
        np.ascontiguousarray(field.values, dtype=PAYLOAD_DTYPE).tobytes()
        for field in vf.slices
    )
    return MAGIC + header + payload


def _parse_header(text: str) -> dict:
    """
    INTERNAL USE:

    Parse the header lines into ``{'ndim', 'dims', 'gamma', 'model',
    'slices', 'times'}`` and, if present, ``'request'``.
    """
    fields = {"dims": {}}
    for number, line in enumerate(text.split("\n"), start=2):
        key, _, rest = line.partition(" ")
        parts = rest.split()
        try:
            if key == "ndim":
                fields["ndim"] = int(rest)
            elif key == "dim":
                index = int(parts[0])
                fields["dims"][index] = (
                    float(parts[1]),
                    float(parts[2]),
                    int(parts[3]),
                    parts[4] == "1",
                )
            elif key == "gamma":
                fields["gamma"] = float(rest)
            elif key == "model":
                fields["model"] = rest.strip()
            elif key == "request":
                fields["request"] = rest.strip()
            elif key == "slices":
                fields["slices"] = int(rest)
            elif key == "times":
                fields["times"] = [float(v) for v in parts]
            else:
                raise ContainerFormatError(f"Unknown header key {key!r} on line {number}.")
        except (ValueError, IndexError) as e:
            if isinstance(e, ContainerFormatError):
                raise
            raise ContainerFormatError(f"Malformed header line {number}: {line!r}.") from e
    for required in ("ndim", "gamma", "model", "slices", "times"):
        if required not in fields:
            raise ContainerFormatError(f"Header is missing {required!r}.")
    return fields


def load_value_function(data: bytes) -> ValueFunction:
    """
    Decode container bytes.

    :raise ContainerFormatError: (or one of its subclasses) if the data
     is malformed.
    """
    if not data.startswith(MAGIC):
        if data.startswith(MAGIC_PREFIX):
            version = data[len(MAGIC_PREFIX) : data.find(b"\n")].decode("ascii", "replace")
            raise ContainerVersionError(f"Unsupported container version {version!r}.")
        raise ContainerFormatError("Not a value-function container (bad magic bytes).")
    end = data.find(b"\n\n", len(MAGIC))
    if end < 0:
        raise ContainerFormatError("Container header is not terminated.")
    try:
        text = data[len(MAGIC) : end].decode("ascii")
    except UnicodeDecodeError as e:
        raise ContainerFormatError("Container header is not ASCII text.") from e
    header = _parse_header(text)

    ndim = header["ndim"]
    if not 1 <= ndim <= MAX_DIMENSIONS:
        raise ContainerDimensionError(f"Unsupported dimension count {ndim}.")
    if sorted(header["dims"]) != list(range(ndim)):
        raise ContainerDimensionError(
            f"Header declares {ndim} dimensions but describes {sorted(header['dims'])}."
        )
    dims = [header["dims"][i] for i in range(ndim)]
    try:
        grid = build_grid(
            GridSpec(
                lo=[d[0] for d in dims],
                hi=[d[1] for d in dims],
                n=[d[2] for d in dims],
                periodic=[d[3] for d in dims],
            )
        )
    except GridSpecError as e:
        raise ContainerDimensionError(f"Invalid grid in header: {e}") from e
    n_slices = header["slices"]
    if n_slices < 1 or len(header["times"]) != n_slices:
        raise ContainerDimensionError(
            f"Header lists {len(header['times'])} times for {n_slices} slices."
        )

    payload = data[end + 2 :]
    expected = n_slices * grid.size * PAYLOAD_DTYPE.itemsize
    if len(payload) < expected:
        raise ContainerTruncatedError(expected, len(payload))
    if len(payload) > expected:
        raise ContainerFormatError(
            f"Container has {len(payload) - expected} unexpected trailing bytes."
        )
    flat = np.frombuffer(payload, dtype=PAYLOAD_DTYPE).astype(float)
    try:
        slices = [
            ScalarField(grid, chunk) for chunk in flat.reshape(n_slices, grid.size)
        ]
        return ValueFunction(
            grid,
            header["times"],
            slices,
            header["gamma"],
            header["model"],
            request=header.get("request"),
        )
    except ValueError as e:
        raise ContainerFormatError(f"Invalid container contents: {e}") from e


def export_value_function(vf: ValueFunction, path: str | os.PathLike) -> None:
    """Write ``vf`` to ``path``."""
    with open(path, "wb") as f:
        f.write(dump_value_function(vf))


def import_value_function(path: str | os.PathLike) -> ValueFunction:
    """
    Read a value function written by ``export_value_function``.

    :raise OSError: if the file cannot be read.
    :raise ContainerFormatError: if it is malformed.
    """
    with open(path, "rb") as f:
        return load_value_function(f.read())


__all__ = [
    "MAGIC",
    "ContainerFormatError",
    "ContainerVersionError",
    "ContainerTruncatedError",
    "ContainerDimensionError",
    "dump_value_function",
    "load_value_function",
    "export_value_function",
    "import_value_function",
]
