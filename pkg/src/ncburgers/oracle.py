"""Independent validation by exact matrix instantiation.

Symbols are assigned square-matrix-valued polynomials in x with exact
rational entries; jets evaluate to exact polynomial derivatives, words to
matrix products.  A symbolic zero must then evaluate to the zero matrix in
every scene, with no tolerance.  A separate floating-point check feeds an
explicit matrix heat-equation solution through the Cole-Hopf map and
measures the residual of the mirror Burgers equation on a grid.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .fields import FieldExpr, Integral, InverseSymbol, Jet, TestField

Matrix = Tuple[Tuple[Fraction, ...], ...]
MatPoly = Tuple[Matrix, ...]  # coefficient matrices, lowest power first

SCENE_SYMBOLS = ("r", "s", "u", "v", "V", "W", "sigma")


def mat_zero(d: int) -> Matrix:
    return tuple(tuple(Fraction(0) for _ in range(d)) for _ in range(d))


def mat_eye(d: int) -> Matrix:
    return tuple(
        tuple(Fraction(1 if i == j else 0) for j in range(d)) for i in range(d)
    )


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(a: Matrix, c: Fraction) -> Matrix:
    return tuple(tuple(c * x for x in row) for row in a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    d = len(a)
    bt = tuple(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_is_zero(a: Matrix) -> bool:
    return all(x == 0 for row in a for x in row)


def poly_deriv(p: MatPoly, d: int) -> MatPoly:
    if len(p) <= 1:
        return (mat_zero(d),)
    return tuple(mat_scale(p[k], Fraction(k)) for k in range(1, len(p)))


def poly_eval(p: MatPoly, x0: Fraction, d: int) -> Matrix:
    acc = mat_zero(d)
    power = Fraction(1)
    for coeff in p:
        acc = mat_add(acc, mat_scale(coeff, power))
        power *= x0
    return acc


@dataclass(frozen=True)
class MatrixScene:
    """Exact assignment of every symbol to a matrix polynomial in x."""

    seed: int
    dim: int
    degree: int
    assignment: Dict[str, MatPoly]
    points: Tuple[Fraction, ...]

    def jet_value(self, symbol: str, order: int, x0: Fraction) -> Matrix:
        p = self.assignment[symbol]
        for _ in range(order):
            p = poly_deriv(p, self.dim)
        return poly_eval(p, x0, self.dim)


def make_scene(seed: int, dim: int = 3, degree: int = 2) -> MatrixScene:
    """Deterministic pseudo-random scene; entries are rationals in [-5, 5]
    with denominator at most 4."""
    if dim < 2:
        raise ValueError("non-commutativity needs dimension >= 2")
    if degree < 1:
        raise ValueError("degree must be at least 1")
    rng = random.Random(seed)

    def entry() -> Fraction:
        den = rng.randint(1, 4)
        num = rng.randint(-5 * den, 5 * den)
        return Fraction(num, den)

    def poly() -> MatPoly:
        return tuple(
            tuple(tuple(entry() for _ in range(dim)) for _ in range(dim))
            for _ in range(degree + 1)
        )

    assignment = {name: poly() for name in SCENE_SYMBOLS}
    points = tuple(Fraction(rng.randint(-8, 8), rng.randint(1, 4)) for _ in range(3))
    return MatrixScene(seed, dim, degree, assignment, points)


def eval_field(e: FieldExpr, scene: MatrixScene, x0: Fraction) -> Matrix:
    """Exact matrix value of an antiderivative-free field expression."""
    d = scene.dim
    acc = mat_zero(d)
    for word, coeff in e.terms.items():
        value = mat_eye(d)
        for atom in word:
            if isinstance(atom, Jet):
                value = mat_mul(value, scene.jet_value(atom.symbol, atom.order, x0))
            elif isinstance(atom, TestField):
                value = mat_mul(value, scene.jet_value(atom.name, atom.order, x0))
            elif isinstance(atom, (Integral, InverseSymbol)):
                raise ValueError(
                    "matrix evaluation is defined only for local expressions"
                )
            else:
                raise ValueError("unknown atom %r" % (atom,))
        acc = mat_add(acc, mat_scale(value, coeff))
    return acc


@dataclass
class ZeroCheckReport:
    passed: bool
    scenes: int
    points: int
    first_failure: str = ""


def check_zero(e: FieldExpr, scenes: Sequence[MatrixScene]) -> ZeroCheckReport:
    """Exact zero test over every scene and evaluation point."""
    points = 0
    for scene in scenes:
        for x0 in scene.points:
            points += 1
            if not mat_is_zero(eval_field(e, scene, x0)):
                return ZeroCheckReport(
                    False,
                    len(scenes),
                    points,
                    "seed=%d x0=%s" % (scene.seed, x0),
                )
    return ZeroCheckReport(True, len(scenes), points)


def default_scenes(count: int = 10, dim: int = 3, degree: int = 2) -> List[MatrixScene]:
    return [make_scene(seed, dim, degree) for seed in range(1, count + 1)]


# ---------------------------------------------------------------------------
# dual-number (nilpotent) directional derivative


def eval_frechet_dual(
    K: FieldExpr, scene: MatrixScene, base: str, direction: str, x0: Fraction
) -> Matrix:
    """Exact directional derivative of K at the scene's base assignment
    along the scene's direction assignment, via nilpotent dual numbers
    (epsilon^2 = 0): the epsilon coefficient of K(base + epsilon*dir)."""
    d = scene.dim

    def dual_mul(a, b):
        return (mat_mul(a[0], b[0]), mat_add(mat_mul(a[0], b[1]), mat_mul(a[1], b[0])))

    acc = mat_zero(d)
    for word, coeff in K.terms.items():
        value = (mat_eye(d), mat_zero(d))
        for atom in word:
            if isinstance(atom, Jet) and atom.symbol == base:
                pair = (
                    scene.jet_value(atom.symbol, atom.order, x0),
                    scene.jet_value(direction, atom.order, x0),
                )
            elif isinstance(atom, Jet):
                pair = (scene.jet_value(atom.symbol, atom.order, x0), mat_zero(d))
            elif isinstance(atom, TestField):
                pair = (scene.jet_value(atom.name, atom.order, x0), mat_zero(d))
            else:
                raise ValueError("dual evaluation is defined only for local expressions")
            value = dual_mul(value, pair)
        acc = mat_add(acc, mat_scale(value[1], coeff))
    return acc


# ---------------------------------------------------------------------------
# scene serialization (stable text format)


def scene_to_text(scene: MatrixScene) -> str:
    lines = [
        "ncburgers-scene v1",
        "seed %d" % scene.seed,
        "dim %d" % scene.dim,
        "degree %d" % scene.degree,
        "points " + " ".join(str(p) for p in scene.points),
    ]
    for name in sorted(scene.assignment):
        poly = scene.assignment[name]
        for k, coeff in enumerate(poly):
            lines.append("poly %s %d" % (name, k))
            for row in coeff:
                lines.append("  " + " ".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


def scene_from_text(text: str) -> MatrixScene:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "ncburgers-scene v1":
        raise ValueError("not a scene document (missing 'ncburgers-scene v1' header)")
    seed = dim = degree = None
    points: Tuple[Fraction, ...] = ()
    polys: Dict[str, Dict[int, List[Tuple[Fraction, ...]]]] = {}
    current: Tuple[str, int] = ("", -1)
    for ln in lines[1:]:
        stripped = ln.strip()
        head = stripped.split()
        if head[0] == "seed":
            seed = int(head[1])
        elif head[0] == "dim":
            dim = int(head[1])
        elif head[0] == "degree":
            degree = int(head[1])
        elif head[0] == "points":
            points = tuple(Fraction(tok) for tok in head[1:])
        elif head[0] == "poly":
            current = (head[1], int(head[2]))
            polys.setdefault(current[0], {})[current[1]] = []
        else:
            polys[current[0]][current[1]].append(tuple(Fraction(tok) for tok in head))
    if seed is None or dim is None or degree is None:
        raise ValueError("scene document missing seed/dim/degree")
    assignment = {}
    for name, by_power in polys.items():
        assignment[name] = tuple(
            tuple(by_power[k]) for k in range(max(by_power) + 1)
        )
    return MatrixScene(seed, dim, degree, assignment, points)


# ---------------------------------------------------------------------------
# Cole-Hopf numeric check


@dataclass
class CHSolution:
    """u(x,t) = I + sum_i A_i exp(k_i x + k_i^2 t), a heat-equation solution."""

    dim: int
    amplitudes: List[np.ndarray]
    wave_numbers: List[Fraction]

    def __post_init__(self):
        if len(self.amplitudes) != len(self.wave_numbers):
            raise ValueError("one wave number per amplitude matrix")
        self.amplitudes = [np.asarray(a, dtype=float) for a in self.amplitudes]

    def heat_residual_exact(self) -> bool:
        """u_t - u_xx vanishes identically: the coefficient of each
        exponential is A_i (k_i^2 - k_i^2)."""
        return all(k * k - k * k == 0 for k in self.wave_numbers)

    def derivative(self, x: float, t: float, dx: int, dt: int) -> np.ndarray:
        out = np.eye(self.dim) if dx == 0 and dt == 0 else np.zeros((self.dim, self.dim))
        for a, k in zip(self.amplitudes, self.wave_numbers):
            kf = float(k)
            out = out + a * kf ** (dx + 2 * dt) * np.exp(kf * x + kf * kf * t)
        return out


@dataclass
class CHResidualReport:
    max_residual: float
    heat_exact: bool
    grid: Tuple[int, int]


def cole_hopf_numeric(
    sol: CHSolution, xs: Sequence[float], ts: Sequence[float]
) -> CHResidualReport:
    """Maximum residual of r_t - r_xx - 2 r_x r with r = u_x u^-1 over the
    grid, computed from closed-form derivatives of u."""
    worst = 0.0
    for x in xs:
        for t in ts:
            u = sol.derivative(x, t, 0, 0)
            det = np.linalg.det(u)
            if abs(det) < 1e-12:
                raise ValueError("u is singular at grid point (x=%g, t=%g)" % (x, t))
            uinv_m = np.linalg.inv(u)
            ux = sol.derivative(x, t, 1, 0)
            uxx = sol.derivative(x, t, 2, 0)
            uxxx = sol.derivative(x, t, 3, 0)
            r = ux @ uinv_m
            uxx_uinv = uxx @ uinv_m
            r_x = uxx_uinv - r @ r
            r_xx = uxxx @ uinv_m - uxx_uinv @ r - r_x @ r - r @ r_x
            # u_t = u_xx and u_xt = u_xxx for a heat solution
            r_t = uxxx @ uinv_m - r @ uxx_uinv
            residual = r_t - r_xx - 2.0 * (r_x @ r)
            worst = max(worst, float(np.max(np.abs(residual))))
    return CHResidualReport(worst, sol.heat_residual_exact(), (len(xs), len(ts)))
