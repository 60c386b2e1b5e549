"""Manufactured-solution experiments on the rectangle [0, 1] x [0, 0.75].

The exact solution is ``u = x1 (1 - x1) sin(a x2)`` with ``a = 4 pi / 3``,
which vanishes on the whole boundary.  Four constant tensors are provided:

    K1 = I, K2 = diag(1, 100), K3 = [[1, 9], [9, 100]], K4 = [[1, -9], [-9, 100]].
"""
import csv
from dataclasses import dataclass, field
import io
import math
from pathlib import Path
import time

import numpy as np

from .dualmesh import build
from .errors import ConfigError, InsufficientLevels, NonSpdTensor
from .fields import ScalarField, inner_D, inner_V, norm_star, sample_scalar, sample_vector
from .geometry import Tensor2
from .meshio import generate_rectangle_mesh, load_msh
from .operators import grad_h
from .system import Problem, assemble, pcg

A = 4.0 * math.pi / 3.0
DOMAIN = ((0.0, 0.0), (1.0, 0.75))

TENSORS = {
    "K1": Tensor2(1.0, 0.0, 0.0, 1.0),
    "K2": Tensor2(1.0, 0.0, 0.0, 100.0),
    "K3": Tensor2(1.0, 9.0, 9.0, 100.0),
    "K4": Tensor2(1.0, -9.0, -9.0, 100.0),
}

COLUMNS = ["level", "M_D", "M_V", "M", "eps2_D", "eps2_V", "epsInf_D", "epsInf_V",
           "eps_grad", "iters", "seconds"]
ERROR_COLUMNS = ["eps2_D", "eps2_V", "epsInf_D", "epsInf_V", "eps_grad"]
# node count each error column is regressed against
SLOPE_COUNTS = {"eps2_D": "M_D", "eps2_V": "M_V", "epsInf_D": "M_D", "epsInf_V": "M_V",
                "eps_grad": "M"}


def exact_u(x1, x2):
    return x1 * (1.0 - x1) * np.sin(A * x2)


def grad_u(x1, x2):
    return (1.0 - 2.0 * x1) * np.sin(A * x2), A * x1 * (1.0 - x1) * np.cos(A * x2)


def manufactured_rhs(K, r=0.0):
    """Forcing ``f = -div(K grad u) + r u`` for the exact solution and a constant tensor."""
    K = as_tensor(K)
    if not K.is_spd():
        raise NonSpdTensor(None, K.as_array())
    k11, k22 = K.k11, K.k22
    off = 0.5 * (K.k12 + K.k21)
    r = float(r)

    def f(x1, x2):
        s, c = np.sin(A * x2), np.cos(A * x2)
        return (2.0 * k11 * s - 2.0 * off * (1.0 - 2.0 * x1) * A * c
                + k22 * A * A * x1 * (1.0 - x1) * s + r * x1 * (1.0 - x1) * s)

    return f


def as_tensor(K):
    if isinstance(K, Tensor2):
        return K
    if isinstance(K, str):
        try:
            return TENSORS[K.strip().upper()]
        except KeyError:
            raise ConfigError(f"unknown tensor alias {K!r}") from None
    return Tensor2.from_array(np.asarray(K, dtype=float).reshape(2, 2))


@dataclass
class CaseConfig:
    """One manufactured-solution run.  Exactly one of ``mesh`` and ``h`` is set."""

    mesh: str = None
    h: float = None
    tensor: object = "K1"
    reaction: float = 1.0
    tol: float = 1e-10
    out: str = None
    allow_nonacute: bool = False

    def __post_init__(self):
        if (self.mesh is None) == (self.h is None):
            raise ConfigError("exactly one of 'mesh' and 'h' must be given")
        self.tensor = as_tensor(self.tensor)
        if not self.tensor.is_spd():
            raise ConfigError(f"tensor {self.tensor.as_array().tolist()} is not symmetric positive definite")
        self.reaction = float(self.reaction)
        if not self.reaction >= 0:
            raise ConfigError(f"reaction must be non-negative, got {self.reaction}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")

    def load_mesh(self):
        if self.mesh is not None:
            return load_msh(self.mesh)
        return generate_rectangle_mesh(DOMAIN, self.h)


@dataclass
class CaseResult:
    M_D: int
    M_V: int
    M: int
    eps2_D: float
    eps2_V: float
    epsInf_D: float
    epsInf_V: float
    eps_grad: float
    iters: int
    seconds: float
    level: int = 0
    stability: float = field(default=float("nan"), repr=False)

    def row(self):
        return [getattr(self, c) for c in COLUMNS]


def error_norms(y, mvd):
    """Errors of ``y`` against the exact solution: the five error columns as a dict."""
    u = sample_scalar(exact_u, mvd, dirichlet_zero=True)
    e = y - u
    e.dirichlet_zero = True
    gu = sample_vector(lambda x1, x2: grad_u(x1, x2), mvd)
    eg = grad_h(y, mvd) - gu
    return dict(
        eps2_D=inner_D(e, e) ** 0.5,
        eps2_V=inner_V(e, e) ** 0.5,
        epsInf_D=float(np.max(np.abs(e.values_D))),
        epsInf_V=float(np.max(np.abs(e.values_V))),
        eps_grad=norm_star(eg),
    )


def stability_ratio(y, problem, kappa):
    """``kappa |grad_h y|_* / max(|f_D|_D, |f_V|_V)``."""
    fD, fV = problem.rhs_values()
    f = ScalarField(fD, fV, problem.mvd, dirichlet_zero=True)
    fnorm = max(inner_D(f, f), inner_V(f, f)) ** 0.5
    return kappa * norm_star(grad_h(y, problem.mvd)) / fnorm


def run_case(config, mvd=None):
    if mvd is None:
        mvd = build(config.load_mesh(), allow_nonacute=config.allow_nonacute)
    start = time.perf_counter()
    problem = Problem(mvd, config.tensor, config.reaction,
                      manufactured_rhs(config.tensor, config.reaction))
    system = assemble(problem)
    x, iters, _ = pcg(system.matrix, system.rhs, config.tol)
    y = system.scatter(x)
    seconds = time.perf_counter() - start
    result = CaseResult(mvd.M_D, mvd.M_V, mvd.M, iters=iters, seconds=seconds, **error_norms(y, mvd))
    result.stability = stability_ratio(y, problem, config.tensor.min_eigenvalue())
    return result


def fit_slope(counts, errors):
    """Least-squares slope of log(error) against log(count)."""
    slope, _ = np.polyfit(np.log(np.asarray(counts, dtype=float)),
                          np.log(np.asarray(errors, dtype=float)), 1)
    return float(slope)


def slopes(results):
    if len(results) < 3:
        raise InsufficientLevels(f"a convergence study needs at least 3 levels, got {len(results)}")
    return {c: fit_slope([getattr(r, SLOPE_COUNTS[c]) for r in results],
                         [getattr(r, c) for r in results]) for c in ERROR_COLUMNS}


def convergence_study(configs):
    """Run every config in order; returns ``(results, slopes)``."""
    configs = list(configs)
    if len(configs) < 3:
        raise InsufficientLevels(f"a convergence study needs at least 3 levels, got {len(configs)}")
    first = configs[0]
    for c in configs[1:]:
        if c.tensor != first.tensor or c.reaction != first.reaction:
            raise ConfigError("all levels of a study must share tensor and reaction")
    results = []
    for level, c in enumerate(configs, start=1):
        r = run_case(c)
        r.level = level
        results.append(r)
    return results, slopes(results)


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def emit_csv(results, timing=True):
    """CSV text with a header row and one row per result.

    Reals are written with 17 significant digits.  With ``timing=False``
    the seconds column is written as 0 so the output depends only on the
    inputs.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in results:
        row = r.row()
        if not timing:
            row[-1] = 0.0
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def parse_config(text, base=None):
    """Parse flat ``key = value`` text into a :class:`CaseConfig`.

    Blank lines and ``#`` comments are ignored.  A relative ``mesh`` path
    is resolved against ``base``.
    """
    keys = {"mesh", "h", "tensor", "reaction", "tol", "out"}
    raw = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in keys:
            raise ConfigError(f"line {n}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {n}: duplicate key {key!r}")
        raw[key] = value
    kw = {}
    try:
        if "mesh" in raw:
            p = Path(raw["mesh"])
            kw["mesh"] = str(p if p.is_absolute() or base is None else Path(base) / p)
        if "h" in raw:
            kw["h"] = float(raw["h"])
        if "tensor" in raw:
            parts = raw["tensor"].split()
            if len(parts) == 1:
                kw["tensor"] = parts[0]
            elif len(parts) == 4:
                kw["tensor"] = [float(p) for p in parts]
            else:
                raise ConfigError(f"tensor needs an alias or 4 numbers, got {raw['tensor']!r}")
        if "reaction" in raw:
            kw["reaction"] = float(raw["reaction"])
        if "tol" in raw:
            kw["tol"] = float(raw["tol"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if "out" in raw:
        kw["out"] = raw["out"]
    return CaseConfig(**kw)


def load_config(path):
    path = Path(path)
    return parse_config(path.read_text(), base=path.parent)
