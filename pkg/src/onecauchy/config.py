"""Experiment configuration: flat key=value text with section prefixes.

The format is intentionally parser-free and diff-able::

    geometry.radius = 5
    obstacle.corners = 0.25,-0.75; 1.5,-0.5; 1.5,0.5; 0.5,0.5
    data.f = arcs: 0, pi, 1

Angles accept a trailing ``pi`` multiplier ("0.5pi", "pi").  Unknown keys
are preserved verbatim so configs round-trip losslessly.
"""

import hashlib

import numpy as np

from .errors import ConfigError
from .geometry import (PolygonBoundary, circle_curve, kite_curve, polygonize,
                       regular_polygon)

_REQUIRED = object()


def parse_angle(text):
    """Parse '1.25', 'pi', '0.5pi' into radians."""
    token = text.strip().lower()
    factor = 1.0
    if token.endswith("pi"):
        factor = np.pi
        token = token[:-2].strip()
        if not token:
            return np.pi
    try:
        return float(token) * factor
    except ValueError as exc:
        raise ConfigError(f"cannot parse angle {text!r}") from exc


class ExperimentConfig:
    """Ordered key=value store with typed accessors and geometry builders."""

    def __init__(self, entries=None):
        self.entries = dict(entries or {})

    @classmethod
    def from_text(cls, text):
        entries = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
            key, _, value = line.partition("=")
            entries[key.strip()] = value.strip()
        return cls(entries)

    @classmethod
    def from_file(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    def to_text(self):
        lines = [f"{k} = {v}" for k, v in self.entries.items()]
        return "\n".join(lines) + "\n"

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())

    def hash(self):
        canon = "\n".join(f"{k}={self.entries[k]}" for k in sorted(self.entries))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]

    # -- typed accessors ---------------------------------------------------

    def get(self, key, default=_REQUIRED):
        if key in self.entries:
            return self.entries[key]
        if default is _REQUIRED:
            raise ConfigError(f"missing required config key {key!r}")
        return default

    def get_float(self, key, default=_REQUIRED):
        value = self.get(key, default)
        if isinstance(value, str):
            try:
                return float(value)
            except ValueError as exc:
                raise ConfigError(f"{key}: cannot parse float from {value!r}") from exc
        return value

    def get_int(self, key, default=_REQUIRED):
        value = self.get(key, default)
        if isinstance(value, str):
            try:
                return int(value)
            except ValueError as exc:
                raise ConfigError(f"{key}: cannot parse int from {value!r}") from exc
        return value

    def get_bool(self, key, default=_REQUIRED):
        value = self.get(key, default)
        if isinstance(value, str):
            low = value.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ConfigError(f"{key}: cannot parse bool from {value!r}")
        return value

    def get_point(self, key, default=_REQUIRED):
        value = self.get(key, default)
        if isinstance(value, str):
            parts = value.split(",")
            if len(parts) != 2:
                raise ConfigError(f"{key}: expected 'x, y', got {value!r}")
            return np.array([float(parts[0]), float(parts[1])])
        return value

    def get_points(self, key, default=_REQUIRED):
        value = self.get(key, default)
        if isinstance(value, str):
            pts = []
            for chunk in value.split(";"):
                chunk = chunk.strip()
                if not chunk:
                    continue
                parts = chunk.split(",")
                if len(parts) != 2:
                    raise ConfigError(f"{key}: expected 'x,y; x,y; ...', got {value!r}")
                pts.append((float(parts[0]), float(parts[1])))
            if not pts:
                raise ConfigError(f"{key}: empty point list")
            return np.array(pts)
        return value

    def get_grid(self, key, default=_REQUIRED):
        """'start, stop, step' with stop inclusive up to rounding."""
        value = self.get(key, default)
        if isinstance(value, str):
            parts = [float(p) for p in value.split(",")]
            if len(parts) != 3:
                raise ConfigError(f"{key}: expected 'start, stop, step', got {value!r}")
            start, stop, step = parts
            if step <= 0:
                raise ConfigError(f"{key}: grid step must be positive")
            count = int(round((stop - start) / step)) + 1
            return start + step * np.arange(count)
        return value

    def get_floats(self, key, default=_REQUIRED):
        value = self.get(key, default)
        if isinstance(value, str):
            return np.array([float(p) for p in value.split(",") if p.strip()])
        return value

    # -- geometry builders -------------------------------------------------

    def outer_curve(self):
        center = self.get_point("geometry.center", np.zeros(2))
        radius = self.get_float("geometry.radius", 5.0)
        return circle_curve(center, radius), center, radius

    def true_obstacle(self):
        """Polygon used for synthesis; smooth shapes are polygonized."""
        kind = self.get("obstacle.kind", "polygon").lower()
        if kind == "polygon":
            return PolygonBoundary(self.get_points("obstacle.corners"))
        sides = self.get_int("obstacle.sides", 64)
        if kind == "disk":
            return regular_polygon(self.get_point("obstacle.center"),
                                   self.get_float("obstacle.radius"), sides)
        if kind == "kite":
            return polygonize(kite_curve(self.get_point("obstacle.center", (2.0, 1.0))),
                              sides)
        raise ConfigError(f"obstacle.kind must be polygon|disk|kite, got {kind!r}")

    def boundary_data(self):
        """Dirichlet-data evaluator from the data.f specification.

        Supported forms:
          arcs: a, b, v [; a, b, v ...]   piecewise constant over parameter arcs
          cos: k   /   sin: k             single trigonometric mode
        Returns (callable t -> values, canonical descriptor string).
        """
        spec = self.get("data.f", "arcs: 0, pi, 1")
        head, _, body = spec.partition(":")
        head = head.strip().lower()
        if head == "arcs":
            arcs = []
            for chunk in body.split(";"):
                chunk = chunk.strip()
                if not chunk:
                    continue
                parts = chunk.split(",")
                if len(parts) != 3:
                    raise ConfigError(f"data.f: arc needs 'start, end, value', got {chunk!r}")
                arcs.append((parse_angle(parts[0]), parse_angle(parts[1]), float(parts[2])))
            if not arcs:
                raise ConfigError("data.f: no arcs given")

            def evaluate(t):
                t = np.mod(np.asarray(t, dtype=float), 2.0 * np.pi)
                out = np.zeros_like(t)
                for a, b, v in arcs:
                    if a <= b:
                        out = np.where((t >= a) & (t < b), v, out)
                    else:
                        out = np.where((t >= a) | (t < b), v, out)
                return out

            canon = "arcs:" + ";".join(f"{a:.12g},{b:.12g},{v:.12g}" for a, b, v in arcs)
            return evaluate, canon
        if head in ("cos", "sin"):
            try:
                k = int(body.strip())
            except ValueError as exc:
                raise ConfigError(f"data.f: mode number must be an integer, got {body!r}") from exc
            fn = np.cos if head == "cos" else np.sin
            return (lambda t: fn(k * np.asarray(t, dtype=float))), f"{head}:{k}"
        raise ConfigError(f"data.f: unknown form {spec!r}")

    def validate(self):
        """Dry-build everything the config references; raises ConfigError early."""
        from .errors import GeometryError
        from .geometry import GradedMesh, UniformMesh

        try:
            curve, _, _ = self.outer_curve()
            UniformMesh(curve, self.get_int("geometry.n_half_outer", 32))
            self.boundary_data()
            if "obstacle.kind" in self.entries or "obstacle.corners" in self.entries:
                poly = self.true_obstacle()
                GradedMesh(poly, self.get_int("geometry.n_half_obstacle", 32),
                           self.get_float("geometry.grading_p", 2.0))
            if "newton.initial_corners" in self.entries:
                init = PolygonBoundary(self.get_points("newton.initial_corners"))
                GradedMesh(init, self.get_int("newton.n_half_obstacle",
                                              self.get_int("geometry.n_half_obstacle", 32)),
                           self.get_float("geometry.grading_p", 2.0))
        except GeometryError as exc:
            raise ConfigError(str(exc)) from exc
        return self
