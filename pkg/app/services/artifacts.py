"""
Artifact I/O for meshes, curves, profiles and reports.

File formats:
- OBJ: ASCII ``v``/``f`` records with 1-based indices; curves as a ``v`` list plus one ``l`` element
- Curve CSV: ``s,x,y,z,kappa,tau``
- Profile CSV: ``u,r,z,w``
- Vertex CSV: ``vertex_index,H,K_defect``
- Flow trace CSV: ``iter,maxH,maxdisp,area``
All floats are written with 17 significant digits.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import numpy as np
from pydantic import BaseModel

from app.config.settings import Settings, get_settings
from app.core.exceptions import MeshError, PreconditionError
from app.schemas.geometry import DelaunayProfile, SampledCurve, TriMesh
from app.schemas.reports import CheckRow, FlowTrace
from app.services.discrete_geometry import DiscreteGeometryService, sample_closed_curve

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
PathLike = Union[str, Path]


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, BaseModel):
        return obj.model_dump(mode="json", by_alias=True)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    return obj


def canonical_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, compact separators."""
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"))


def spec_hash(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def check_row(
    name: str, expected: float, computed: float, tolerance: float, relative: bool = True
) -> CheckRow:
    """Compare computed against expected, relative to |expected| unless told otherwise."""
    scale = max(abs(expected), 1e-300) if relative else 1.0
    passed = bool(np.isfinite(computed)) and abs(computed - expected) <= tolerance * scale
    return CheckRow(
        name=name, expected=expected, computed=computed, tolerance=tolerance, passed=passed
    )


# ----------------------------------------------------------------------
# OBJ
# ----------------------------------------------------------------------


def write_obj(mesh: TriMesh, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for x, y, z in mesh.vertices:
            fh.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
        for a, b, c in mesh.faces + 1:
            fh.write(f"f {a} {b} {c}\n")
    logger.debug(f"Wrote mesh {path} ({mesh.n_vertices} vertices)")
    return path


def read_obj(path: PathLike) -> TriMesh:
    """
    Read an ASCII OBJ mesh; boundary loops are extracted and fixed.

    Polygon faces are fan-triangulated; ``v/vt/vn`` index forms are accepted.

    Raises:
        MeshError: If the file has no faces or an index is out of range.
    """
    vertices: List[List[float]] = []
    faces: List[List[int]] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                vertices.append([float(c) for c in parts[1:4]])
            elif parts[0] == "f":
                idx = [int(p.split("/")[0]) for p in parts[1:]]
                idx = [i - 1 if i > 0 else len(vertices) + i for i in idx]
                for k in range(1, len(idx) - 1):
                    faces.append([idx[0], idx[k], idx[k + 1]])
    if not faces:
        raise MeshError(f"{path}: no faces")
    f = np.asarray(faces, dtype=np.int64)
    if f.min() < 0 or f.max() >= len(vertices):
        raise MeshError(f"{path}: face index out of range")
    return TriMesh.from_arrays(np.asarray(vertices, dtype=float), f)


def write_curve_obj(curve: SampledCurve, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pts = curve.loop_points()
    with path.open("w", encoding="utf-8") as fh:
        for x, y, z in pts:
            fh.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
        indices = list(range(1, len(pts) + 1))
        if curve.closed:
            indices.append(1)
        fh.write("l " + " ".join(str(i) for i in indices) + "\n")
    return path


# ----------------------------------------------------------------------
# CSV
# ----------------------------------------------------------------------


def _write_csv(
    path: PathLike, header: str, columns: Iterable[np.ndarray], fmt: Any = FLOAT_FORMAT
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.column_stack(list(columns))
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt=fmt)
    return path


def write_curve_csv(curve: SampledCurve, path: PathLike) -> Path:
    p = curve.points
    columns = [curve.s, p[:, 0], p[:, 1], p[:, 2], curve.kappa, curve.tau]
    return _write_csv(path, "s,x,y,z,kappa,tau", columns)


def read_curve_csv(path: PathLike, n_samples: Optional[int] = None) -> SampledCurve:
    """
    Load a boundary curve written by ``write_curve_csv``.

    The polyline is resampled uniformly in arclength (to ``n_samples`` when given)
    and its Frenet data recomputed.
    """
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] < 4:
        raise PreconditionError(f"{path}: expected columns s,x,y,z[,kappa,tau]")
    return sample_closed_curve(data[:, 1:4], n_samples)


def write_profile_csv(profile: DelaunayProfile, path: PathLike) -> Path:
    return _write_csv(path, "u,r,z,w", [profile.u, profile.r, profile.z, profile.w])


def write_vertex_csv(
    mesh: TriMesh, path: PathLike, geometry: Optional[DiscreteGeometryService] = None
) -> Path:
    geometry = geometry or DiscreteGeometryService()
    H = geometry.vertex_mean_curvature(mesh)
    K = geometry.vertex_gaussian_curvature(mesh)
    index = np.arange(mesh.n_vertices)
    fmt = ["%d", FLOAT_FORMAT, FLOAT_FORMAT]
    return _write_csv(path, "vertex_index,H,K_defect", [index, H, K], fmt=fmt)


def write_trace_csv(trace: FlowTrace, path: PathLike) -> Path:
    return _write_csv(
        path,
        "iter,maxH,maxdisp,area",
        [trace.iterations, trace.max_h, trace.max_displacement, trace.area],
        fmt=["%d", FLOAT_FORMAT, FLOAT_FORMAT, FLOAT_FORMAT],
    )


# ----------------------------------------------------------------------
# JSON
# ----------------------------------------------------------------------


def write_json(obj: Any, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


class ArtifactWriter:
    """Writes artifacts under one output directory."""

    def __init__(
        self, output_dir: Optional[PathLike] = None, settings: Optional[Settings] = None
    ) -> None:
        self.settings = settings or get_settings()
        self.output_dir = Path(output_dir if output_dir is not None else self.settings.output_dir)
        self.written: List[Path] = []

    def path(self, name: str) -> Path:
        return self.output_dir / name

    def _track(self, path: Path) -> Path:
        self.written.append(path)
        logger.info(f"Wrote {path}")
        return path

    def mesh(self, mesh: TriMesh, name: str) -> Path:
        return self._track(write_obj(mesh, self.path(name)))

    def curve(self, curve: SampledCurve, stem: str) -> List[Path]:
        return [
            self._track(write_curve_csv(curve, self.path(f"{stem}.csv"))),
            self._track(write_curve_obj(curve, self.path(f"{stem}.obj"))),
        ]

    def profile(self, profile: DelaunayProfile, name: str) -> Path:
        return self._track(write_profile_csv(profile, self.path(name)))

    def vertices(self, mesh: TriMesh, name: str) -> Path:
        return self._track(write_vertex_csv(mesh, self.path(name)))

    def trace(self, trace: FlowTrace, name: str) -> Path:
        return self._track(write_trace_csv(trace, self.path(name)))

    def json(self, obj: Any, name: str) -> Path:
        return self._track(write_json(obj, self.path(name)))

    def summary(
        self, target: str, rows: List[CheckRow], spec: Dict[str, Any], version: str
    ) -> Path:
        """Reproduction summary with provenance and per-value pass/fail."""
        payload = {
            "target": target,
            "version": version,
            "spec_sha256": spec_hash(spec),
            "spec": spec,
            "rows": rows,
            "passed": all(r.passed for r in rows),
        }
        return self.json(payload, "summary.json")
