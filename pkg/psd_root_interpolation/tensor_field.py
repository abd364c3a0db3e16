"""Tensor fields on regular 3-D grids: file format and upsampling along geodesics.

A field file is a JSON object::

    {"dims": [nx, ny, nz], "spacing": [dx, dy, dz], "tensors": [[xx, xy, xz, yy, yz, zz], ...]}

with the voxels in x-fastest order. A single tensor is stored as the bare 6-array.
"""

import json
import logging

from dataclasses import dataclass
from enum import Enum
from io import StringIO
from pathlib import Path
from typing import Tuple

import numpy as np
import pandas as pd

from .exceptions import ParseError, PsdRootInterpolationError, ValidationError
from .geodesics import GeodesicSpec, path_point
from .linalg_core import is_psd
from .metrics import MetricKind


logger = logging.getLogger(__name__)

COMPONENTS = ("xx", "xy", "xz", "yy", "yz", "zz")
_UPPER = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
CSV_FLOAT_FORMAT = "%.17g"


class OutputFormat(Enum):
    """Formats of written tensors, fields and reports."""

    JSON = "json"
    CSV = "csv"


def components_to_tensor(components):
    """Symmetric 3x3 matrix from its upper triangle ``(xx, xy, xz, yy, yz, zz)``."""
    c = np.asarray(components, dtype=float)
    D = np.empty((3, 3))
    for value, (i, j) in zip(c, _UPPER):
        D[i, j] = D[j, i] = value
    return D


def tensor_to_components(D):
    """Upper triangle ``(xx, xy, xz, yy, yz, zz)`` of a 3x3 matrix."""
    return [float(D[i, j]) for i, j in _UPPER]


@dataclass(eq=False)
class TensorField:
    """Symmetric 3x3 tensors on a regular grid.

    Parameters
    ----------
    dims: tuple of int
        Grid size ``(nx, ny, nz)``.
    spacing: tuple of float
        Grid step along each axis.
    tensors: numpy.ndarray
        Array of shape ``(nx * ny * nz, 3, 3)`` in x-fastest voxel order.

    """

    dims: Tuple[int, int, int]
    spacing: Tuple[float, float, float]
    tensors: np.ndarray

    def __post_init__(self):
        """Coerce the fields and validate the grid."""
        self.dims = tuple(int(n) for n in self.dims)
        self.spacing = tuple(float(h) for h in self.spacing)
        self.tensors = np.asarray(self.tensors, dtype=float)
        if len(self.dims) != 3 or any(n < 1 for n in self.dims):
            raise ValidationError(f"dims must be three positive integers, got {self.dims}")
        if len(self.spacing) != 3 or not all(np.isfinite(h) and h > 0 for h in self.spacing):
            raise ValidationError(f"spacing must be three positive reals, got {self.spacing}")
        n_voxels = int(np.prod(self.dims))
        if self.tensors.shape != (n_voxels, 3, 3):
            raise ValidationError(
                f"dims {self.dims} need {n_voxels} tensors, got array of shape {self.tensors.shape}"
            )
        if not np.all(np.isfinite(self.tensors)):
            bad = np.flatnonzero(~np.isfinite(self.tensors).all(axis=(1, 2)))
            raise ValidationError(f"non-finite tensor at voxel {self.voxel(bad[0])}")

    def __len__(self):
        return len(self.tensors)

    def voxel(self, index):
        """Grid coordinates ``(i, j, k)`` of the voxel at flat ``index``."""
        nx, ny, _ = self.dims
        return (int(index % nx), int(index // nx % ny), int(index // (nx * ny)))

    def tensor_at(self, i, j, k):
        """Tensor at grid coordinates ``(i, j, k)``."""
        nx, ny, _ = self.dims
        return self.tensors[i + nx * (j + ny * k)]

    def psd_violations(self):
        """Grid coordinates of all tensors that are not PSD within tolerance."""
        return [self.voxel(n) for n, D in enumerate(self.tensors) if not is_psd(D)]

    def equals(self, other):
        """Exact equality of grid, spacing and all tensors."""
        return (
            self.dims == other.dims
            and self.spacing == other.spacing
            and np.array_equal(self.tensors, other.tensors)
        )


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as err:
        raise ParseError(f"{path}: not valid JSON ({err})") from err


def _parse_components(row, where):
    if not isinstance(row, list) or len(row) != 6:
        raise ParseError(f"{where}: expected an array of 6 numbers")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in row):
        raise ParseError(f"{where}: tensor components must be numbers")
    return components_to_tensor(row)


def field_from_record(record, source="field"):
    """Build a validated field from the decoded JSON object of a field file."""
    if not isinstance(record, dict):
        raise ParseError(f"{source}: expected a JSON object")
    missing = {"dims", "spacing", "tensors"} - set(record)
    if missing:
        raise ParseError(f"{source}: missing keys {sorted(missing)}")
    rows = record["tensors"]
    if not isinstance(rows, list):
        raise ParseError(f"{source}: 'tensors' must be an array")
    tensors = np.array(
        [_parse_components(row, f"{source}: tensor {n}") for n, row in enumerate(rows)]
    ).reshape(-1, 3, 3)
    try:
        dims = [int(n) for n in record["dims"]]
        spacing = [float(h) for h in record["spacing"]]
    except (TypeError, ValueError) as err:
        raise ParseError(f"{source}: malformed 'dims' or 'spacing' ({err})") from err
    return TensorField(dims=dims, spacing=spacing, tensors=tensors)


def load_field(path, strict=False):
    """Read a tensor field file.

    Parameters
    ----------
    path: str or pathlike
        JSON field file.
    strict: bool
        Raise instead of warn if tensors are not PSD.

    Returns
    -------
    TensorField

    Raises
    ------
    ParseError
        If the file is not a well-formed field file.
    ValidationError
        If the tensor count does not match the dims, an entry is not finite, or (with
        ``strict``) a tensor is not PSD.

    """
    field = field_from_record(_read_json(path), source=str(path))
    violations = field.psd_violations()
    if violations:
        message = f"{path}: {len(violations)} tensors are not PSD, first at voxel {violations[0]}"
        if strict:
            raise ValidationError(message)
        logger.warning(message)
    logger.info("read %d tensors on a %s grid from %s", len(field), field.dims, path)
    return field


def format_field(field, fmt=OutputFormat.JSON):
    """Field as JSON text, or as CSV with one row per voxel (``i, j, k`` and components)."""
    fmt = OutputFormat(fmt)
    if fmt is OutputFormat.JSON:
        return json.dumps(
            {
                "dims": list(field.dims),
                "spacing": list(field.spacing),
                "tensors": [tensor_to_components(D) for D in field.tensors],
            }
        )
    coords = np.array([field.voxel(n) for n in range(len(field))])
    frame = pd.DataFrame(coords, columns=["i", "j", "k"])
    components = np.array([tensor_to_components(D) for D in field.tensors])
    for name, column in zip(COMPONENTS, components.T):
        frame[name] = column
    return _to_csv(frame, index=False)


def save_field(field, path, fmt=OutputFormat.JSON):
    """Write a field file, see :func:`format_field`."""
    Path(path).write_text(format_field(field, fmt))
    logger.info("wrote %d tensors to %s", len(field), path)


def load_tensor(path):
    """Read a single-tensor file (a bare 6-array) as a symmetric 3x3 matrix."""
    D = _parse_components(_read_json(path), str(path))
    if not np.all(np.isfinite(D)):
        raise ValidationError(f"{path}: non-finite tensor component")
    return D


def format_tensor(D, fmt=OutputFormat.JSON):
    """Single tensor as a JSON 6-array or a one-row CSV table."""
    fmt = OutputFormat(fmt)
    components = tensor_to_components(D)
    if fmt is OutputFormat.JSON:
        return json.dumps(components)
    return _to_csv(pd.DataFrame([components], columns=list(COMPONENTS)), index=False)


def save_tensor(D, path, fmt=OutputFormat.JSON):
    """Write a single-tensor file."""
    Path(path).write_text(format_tensor(D, fmt))
    logger.info("wrote tensor to %s", path)


def _to_csv(frame, **kwargs):
    buffer = StringIO()
    frame.to_csv(buffer, float_format=CSV_FLOAT_FORMAT, **kwargs)
    return buffer.getvalue()


def _upsample_axis(grid, axis, factor, metric):
    """Insert ``factor - 1`` path points between neighbours along one axis of a ``(z, y, x)`` grid."""
    g = np.moveaxis(grid, axis, 0)
    n = g.shape[0]
    out = np.empty(((n - 1) * factor + 1,) + g.shape[1:])
    out[::factor] = g
    for i in range(n - 1):
        for idx in np.ndindex(g.shape[1:3]):
            try:
                spec = GeodesicSpec(metric, g[i][idx], g[i + 1][idx])
                for s in range(1, factor):
                    out[i * factor + s][idx] = path_point(spec, 1.0 - s / factor)
            except PsdRootInterpolationError as err:
                zyx = list(idx)
                zyx.insert(axis, i)
                raise type(err)(f"voxel {tuple(zyx[::-1])}: {err}") from err
    return np.moveaxis(out, 0, axis)


def upsample(field, factor, metric=MetricKind.PROCRUSTES):
    """Refine a field by inserting path points between neighbouring voxels.

    The axes are refined one after the other, x first, then y, then z. Between two
    neighbours ``a`` (lower index) and ``b`` the new tensor at fraction ``t`` of the way
    is ``path_point(GeodesicSpec(metric, a, b), 1 - t)``. Original tensors are copied
    unchanged to their new positions.

    Parameters
    ----------
    field: TensorField
        Input field.
    factor: int
        Refinement factor, at least 2. Each axis with ``n`` voxels gets
        ``factor * (n - 1) + 1``.
    metric: MetricKind or str
        Geodesic used between neighbours. Defaults to Procrustes.

    Returns
    -------
    TensorField
        Refined field with the spacing divided by ``factor``.

    Raises
    ------
    NotPSDError, SingularInputError
        From the paths, with the voxel coordinates (in the partially refined grid) of
        the lower neighbour prepended to the message.

    """
    if int(factor) != factor or factor < 2:
        raise ValueError(f"factor must be an integer of at least 2, got {factor}")
    factor = int(factor)
    metric = MetricKind(metric)
    nx, ny, nz = field.dims
    grid = field.tensors.reshape(nz, ny, nx, 3, 3)
    for axis in (2, 1, 0):
        grid = _upsample_axis(grid, axis, factor, metric)
    dims = tuple((n - 1) * factor + 1 for n in field.dims)
    logger.info("upsampled %s grid to %s along %s paths", field.dims, dims, metric.value)
    return TensorField(
        dims=dims,
        spacing=tuple(h / factor for h in field.spacing),
        tensors=grid.reshape(-1, 3, 3),
    )
