"""Built-in mappings, spaces and integral-equation ingredients.

Everything the CLI can name lives here, so config files stay declarative
and experiments stay reproducible. No expression parsing: a name either
resolves to a registered constructor or the config is rejected.
"""

from __future__ import annotations

import math

import numpy as np

from .cone import Cone, Orthant, cone_from_config
from .dist import DiracStep, GaussianShift, ScaledGaussian
from .errors import InvalidParameterError
from .contract import Mapping
from .space import PCMSpace
from .tnorm import TNorm

# ---------------------------------------------------------------------------
# Mappings
# ---------------------------------------------------------------------------


def rotation_half_map() -> Mapping:
    """Average a plane point with its norm-preserving quarter turn.

    T(u) = (u + (|u| / |Au|) A u) / 2 with A the 90-degree rotation; since
    the rotation preserves norms the factor is 1 and each application
    shrinks norms by exactly sqrt(2)/2. The formula is undefined at the
    origin (|Au| = 0), where T(0) = 0 is taken: the continuity limit and
    the unique fixed point.
    """

    def fn(u: np.ndarray) -> np.ndarray:
        if u.shape != (2,):
            raise InvalidParameterError("rotation-half is a plane map; expected dimension 2")
        norm_u = math.hypot(u[0], u[1])
        if norm_u == 0.0:
            return np.zeros(2)
        rotated = np.array([-u[1], u[0]])
        return 0.5 * (u + (norm_u / math.hypot(rotated[0], rotated[1])) * rotated)

    return Mapping(
        fn,
        name="rotation-half",
        note="the defining formula is undefined at the origin; T(0) = 0 is "
        "taken (continuity limit, the unique fixed point)",
    )


def scale_map(factor: float) -> Mapping:
    return Mapping(lambda u: factor * u, name=f"scale:{factor}")


def constant_map(value) -> Mapping:
    target = np.asarray(value, dtype=float)
    return Mapping(lambda u: target.copy(), name="constant")


def identity_map() -> Mapping:
    return Mapping(lambda u: u.copy(), name="identity")


def shift_map(offset) -> Mapping:
    delta = np.asarray(offset, dtype=float)
    return Mapping(lambda u: u + delta, name="shift")


def affine_map(matrix, offset) -> Mapping:
    mat = np.asarray(matrix, dtype=float)
    off = np.asarray(offset, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or off.shape != (mat.shape[0],):
        raise InvalidParameterError("affine map needs a square matrix and a matching offset")
    return Mapping(lambda u: mat @ u + off, name="affine")


def _parse_vector(text: str, dim: int) -> np.ndarray:
    parts = [float(p) for p in text.split(",")]
    if len(parts) == 1:
        return np.full(dim, parts[0])
    if len(parts) != dim:
        raise InvalidParameterError(f"expected {dim} components, got {len(parts)} in {text!r}")
    return np.asarray(parts)


def make_mapping(spec, dim: int) -> Mapping:
    """Resolve a mapping config (string shorthand or object) to a Mapping."""
    if isinstance(spec, dict):
        name = spec.get("name")
        if name == "affine":
            return affine_map(spec["matrix"], spec["offset"])
        raise InvalidParameterError(f"unknown mapping object {spec!r}")
    if not isinstance(spec, str):
        raise InvalidParameterError(f"mapping spec must be a string or object, got {type(spec).__name__}")
    head, _, arg = spec.partition(":")
    if head == "identity":
        return identity_map()
    if head == "rotation-half":
        if dim != 2:
            raise InvalidParameterError("rotation-half requires a 2-dimensional space")
        return rotation_half_map()
    if head == "scale":
        return scale_map(float(arg))
    if head == "constant":
        return constant_map(_parse_vector(arg, dim))
    if head == "shift":
        return shift_map(_parse_vector(arg, dim))
    raise InvalidParameterError(f"unknown mapping {spec!r}")


# ---------------------------------------------------------------------------
# Spaces
# ---------------------------------------------------------------------------


def dirac_space(
    dim: int = 2,
    tnorm: TNorm = TNorm.MINIMUM,
    point_cone: Cone | None = None,
    sampling_box=None,
) -> PCMSpace:
    """The classical embedding: distance is a step at the Euclidean gap."""

    def distance(x, y):
        # hypot scales internally, so huge-but-finite iterates keep a
        # finite distance instead of overflowing in the squares
        return DiracStep(math.hypot(*(x - y)))

    return PCMSpace(dim=dim, distance=distance, tnorm=tnorm, point_cone=point_cone, sampling_box=sampling_box)


def cone_gaussian_space(
    delta: float = 0.5,
    tnorm: TNorm = TNorm.MINIMUM,
    sampling_box=None,
) -> PCMSpace:
    """Direction-dependent Gaussian distance on the plane.

    When the difference u - v lies in the positive orthant the distance is
    a Gaussian shifted by the Euclidean gap; otherwise it collapses to the
    sub-distribution delta * Phi(t). Deliberately asymmetric and
    sub-distributional: diagnostic reports should flag both.
    """
    gate = Orthant(2)

    def distance(u, v):
        diff = u - v
        if gate.contains(diff):
            return GaussianShift(math.hypot(diff[0], diff[1]))
        return ScaledGaussian(delta)

    return PCMSpace(dim=2, distance=distance, tnorm=tnorm, point_cone=None, sampling_box=sampling_box)


def make_space(config: dict) -> PCMSpace:
    """Build a space from its JSON configuration."""
    dim = int(config.get("dim", 2))
    tnorm = TNorm.from_name(config.get("tnorm", "min"))
    cone = cone_from_config(config.get("cone"))
    box = config.get("sampling_box")
    if box is not None:
        box = np.asarray(box, dtype=float)
    distance = config.get("distance", "dirac")
    if distance == "dirac":
        return dirac_space(dim=dim, tnorm=tnorm, point_cone=cone, sampling_box=box)
    if isinstance(distance, dict) and distance.get("kind") == "cone-gaussian":
        if dim != 2:
            raise InvalidParameterError("cone-gaussian distance is defined on the plane")
        if cone is not None:
            raise InvalidParameterError("cone-gaussian space does not take a point cone")
        return cone_gaussian_space(delta=float(distance.get("delta", 0.5)), tnorm=tnorm, sampling_box=box)
    raise InvalidParameterError(f"unknown distance spec {distance!r}")


# ---------------------------------------------------------------------------
# Integral-equation ingredients
# ---------------------------------------------------------------------------


def make_kernel(spec):
    """Kernel factory: 'constant' (value param) or 'exp-decay' e^{-(t-s)}."""
    name, params = _split_spec(spec)
    if name == "constant":
        value = float(params.get("value", 1.0))
        return lambda t, s, path: np.full(np.broadcast(t, s).shape, value)
    if name == "exp-decay":
        return lambda t, s, path: np.exp(-(t - s))
    raise InvalidParameterError(f"unknown kernel {spec!r}")


def make_forcing(spec):
    """Forcing factory: 'constant' (value) or 'gaussian' (base + scale * Z per path)."""
    name, params = _split_spec(spec)
    if name == "constant":
        value = float(params.get("value", 1.0))
        return lambda t, path, rng: np.full(t.shape, value)
    if name == "gaussian":
        base = float(params.get("base", 1.0))
        scale = float(params.get("scale", 0.1))

        def forcing(t, path, rng):
            z = rng.standard_normal()
            return np.full(t.shape, base + scale * z)

        return forcing
    raise InvalidParameterError(f"unknown forcing {spec!r}")


def make_nonlinearity(spec):
    """Nonlinearity factory returning (f, lipschitz_constant).

    'zero' gives f = 0 with constant 0, 'constant' a state-independent
    value (constant 0), 'linear' gives coefficient * x with constant
    |coefficient|.
    """
    name, params = _split_spec(spec)
    if name == "zero":
        return (lambda s, x: np.zeros(np.broadcast(s, x).shape), 0.0)
    if name == "constant":
        value = float(params.get("value", 1.0))
        return (lambda s, x: np.full(np.broadcast(s, x).shape, value), 0.0)
    if name == "linear":
        coef = float(params.get("coefficient", 0.4))
        return (lambda s, x: coef * x, abs(coef))
    raise InvalidParameterError(f"unknown nonlinearity {spec!r}")


def _split_spec(spec):
    if isinstance(spec, str):
        return spec, {}
    if isinstance(spec, dict) and "name" in spec:
        params = {k: v for k, v in spec.items() if k != "name"}
        return spec["name"], params
    raise InvalidParameterError(f"spec must be a name or an object with a name, got {spec!r}")
