"""Scene files: JSON description of posed objects plus a queue to place.

Format (see docs/scene_format.md)::

    {
      "schema": 1,
      "gravity": [0, 0, -9.81],
      "objects": [{"name": "floor", "mesh": {"box": [6, 6, 0.2]},
                   "pose": {"quaternion": [0, 0, 0, 1], "translation": [0, 0, -0.1]},
                   "mu": 0.6, "fixed": true}, ...],
      "queue": [{"name": "cube", "mesh": {"box": [0.2, 0.2, 0.2]}, "mass": 1.0, "mu": 0.5}]
    }

Meshes are referenced (``{"file": "part.obj"}`` relative to the scene file)
or generated from a primitive spec, never embedded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from errors import InvalidMesh, SceneError
from geometry.mesh import PolyMesh, load_obj, mesh_mass_properties
from geometry.primitives import Pose
from geometry.shapes import bowl, box, frustum, icosphere, prism
from scene.assembly import DEFAULT_GRAVITY, Assembly, PolyObject

SCHEMA_VERSION = 1
QUATERNION_TOL = 1e-6
DEFAULT_MU = 0.5

_ALLOWED_KEYS = {"name", "mesh", "pose", "mass", "com", "density", "mu", "fixed"}


@dataclass
class ObjectSpec:
    name: str
    mesh: Dict[str, Any]
    quaternion: List[float] = field(default_factory=lambda: [0.0, 0.0, 0.0, 1.0])
    translation: List[float] = field(default_factory=lambda: [0.0, 0.0, 0.0])
    mass: float | None = None
    com: List[float] | None = None
    density: float | None = None
    mu: float = DEFAULT_MU
    fixed: bool = False

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "name": self.name,
            "mesh": self.mesh,
            "pose": {"quaternion": list(self.quaternion), "translation": list(self.translation)},
            "mu": self.mu,
            "fixed": self.fixed,
        }
        if self.mass is not None:
            data["mass"] = self.mass
        if self.com is not None:
            data["com"] = list(self.com)
        if self.density is not None:
            data["density"] = self.density
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ObjectSpec":
        if not isinstance(data, dict):
            raise SceneError("object entry must be a JSON object")
        unknown = set(data) - _ALLOWED_KEYS
        if unknown:
            raise SceneError(f"unknown object keys: {', '.join(sorted(unknown))}")
        name = data.get("name")
        if not isinstance(name, str) or not name:
            raise SceneError("object needs a non-empty name")
        if not isinstance(data.get("mesh"), dict):
            raise SceneError(f"object {name!r}: mesh must be a JSON object")
        pose = data.get("pose", {})
        spec = cls(
            name=name,
            mesh=data["mesh"],
            quaternion=_floats(pose.get("quaternion", [0.0, 0.0, 0.0, 1.0]), 4, f"{name}.pose.quaternion"),
            translation=_floats(pose.get("translation", [0.0, 0.0, 0.0]), 3, f"{name}.pose.translation"),
            mass=_number(data.get("mass"), f"{name}.mass"),
            com=None if data.get("com") is None else _floats(data["com"], 3, f"{name}.com"),
            density=_number(data.get("density"), f"{name}.density"),
            mu=_number(data.get("mu", DEFAULT_MU), f"{name}.mu"),
            fixed=bool(data.get("fixed", False)),
        )
        spec.validate()
        return spec

    def validate(self) -> None:
        norm = float(np.linalg.norm(self.quaternion))
        if abs(norm - 1.0) > QUATERNION_TOL:
            raise SceneError(f"object {self.name!r}: quaternion norm {norm:.6g} is not 1")
        if not self.fixed and self.mass is None and self.density is None:
            raise SceneError(f"object {self.name!r}: movable objects need mass or density")
        if self.mass is not None and self.mass <= 0 and not self.fixed:
            raise SceneError(f"object {self.name!r}: mass must be positive")
        if self.density is not None and self.density <= 0:
            raise SceneError(f"object {self.name!r}: density must be positive")
        if self.mu < 0:
            raise SceneError(f"object {self.name!r}: friction must be non-negative")

    @property
    def pose(self) -> Pose:
        return Pose.from_quaternion(self.quaternion, self.translation)


@dataclass
class SceneFile:
    objects: List[ObjectSpec]
    queue: List[ObjectSpec] = field(default_factory=list)
    gravity: List[float] = field(default_factory=lambda: list(DEFAULT_GRAVITY))
    description: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema": SCHEMA_VERSION,
            "description": self.description,
            "gravity": list(self.gravity),
            "objects": [o.to_dict() for o in self.objects],
            "queue": [o.to_dict() for o in self.queue],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SceneFile":
        if not isinstance(data, dict):
            raise SceneError("scene must be a JSON object")
        if data.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
            raise SceneError(f"unsupported scene schema {data.get('schema')!r}")
        objects = [ObjectSpec.from_dict(o) for o in data.get("objects", [])]
        queue = [ObjectSpec.from_dict(o) for o in data.get("queue", [])]
        names = [o.name for o in objects + queue]
        if len(set(names)) != len(names):
            raise SceneError("object names must be unique")
        return cls(
            objects=objects,
            queue=queue,
            gravity=_floats(data.get("gravity", list(DEFAULT_GRAVITY)), 3, "gravity"),
            description=str(data.get("description", "")),
        )

    def queued(self, name: str) -> ObjectSpec:
        for spec in self.queue:
            if spec.name == name:
                return spec
        raise SceneError(f"no queued object named {name!r}; queued: {', '.join(o.name for o in self.queue) or '-'}")


def _number(value, where: str) -> float | None:
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneError(f"{where} must be a number")
    return float(value)


def _floats(value, size: int, where: str) -> List[float]:
    if not isinstance(value, (list, tuple)) or len(value) != size:
        raise SceneError(f"{where} must be a list of {size} numbers")
    return [_number(v, where) for v in value]


def build_mesh(spec: Dict[str, Any], base_dir: Path | None = None) -> PolyMesh:
    """Mesh for a primitive spec or an OBJ reference."""
    if len(spec) != 1:
        raise SceneError(f"mesh spec needs exactly one kind, got {sorted(spec)}")
    kind, args = next(iter(spec.items()))
    try:
        if kind == "file":
            path = Path(args)
            if not path.is_absolute() and base_dir is not None:
                path = base_dir / path
            if not path.exists():
                raise SceneError(f"mesh file not found: {path}")
            return load_obj(path)
        if kind == "box":
            return box(args)
        if kind == "frustum":
            return frustum(args["bottom"], args["top"], args["height"])
        if kind == "prism":
            return prism(args["polygon"], args["height"], args.get("apex", 0))
        if kind == "icosphere":
            return icosphere(args.get("radius", 0.5), args.get("subdivisions", 1))
        if kind == "bowl":
            return bowl(args["vertices"], args.get("radius", 0.5), args.get("thickness", 0.05))
    except InvalidMesh as exc:
        raise SceneError(f"{kind} mesh: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise SceneError(f"bad {kind} mesh spec {args!r}: {exc}") from exc
    raise SceneError(f"unknown mesh kind {kind!r}")


def build_object(spec: ObjectSpec, base_dir: Path | None = None) -> PolyObject:
    mesh = build_mesh(spec.mesh, base_dir)
    mass, com = spec.mass, spec.com
    if spec.density is not None and (mass is None or com is None):
        m, c, _ = mesh_mass_properties(mesh, spec.density)
        mass = m if mass is None else mass
        com = c if com is None else com
    if com is None:
        _, com, _ = mesh_mass_properties(mesh, 1.0)
    return PolyObject(
        name=spec.name,
        mesh=mesh,
        mass=float(mass) if mass is not None else 0.0,
        com=np.asarray(com, dtype=float),
        mu=spec.mu,
        fixed=spec.fixed,
        source=spec.to_dict(),
    )


def read_scene(path) -> SceneFile:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise SceneError(f"scene file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SceneError(f"{path}: invalid JSON ({exc})") from exc
    return SceneFile.from_dict(data)


def dumps_scene(scene: SceneFile) -> str:
    return json.dumps(scene.to_dict(), sort_keys=True, indent=2) + "\n"


def save_scene(scene: SceneFile, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_scene(scene), encoding="utf-8")
    return path


def assemble(scene: SceneFile, base_dir: Path | None = None, contact_tol: float = 1e-4) -> Assembly:
    objects: Sequence[Tuple[PolyObject, Pose]] = [(build_object(o, base_dir), o.pose) for o in scene.objects]
    return Assembly.build(objects, scene.gravity, contact_tol)


def load_scene(path, contact_tol: float = 1e-4) -> Assembly:
    """Read, validate and assemble a scene file."""
    path = Path(path)
    return assemble(read_scene(path), path.parent, contact_tol)
