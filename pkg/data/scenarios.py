"""Seeded scenario generators and fixed example models for the verification suites."""

import logging
from typing import Dict, List, Optional

import numpy as np

from aps.properties import BvpScenario
from numeric.spectral import admissible_cutoffs, eig_selfadjoint, spectral_interval
from numeric.subspaces import Subspace
from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from operators.adapted import AdaptedOperator, adapted_projection, random_adapted, twist
from operators.cylinders import make_cylinder
from orientation.bordism import BordismScenario
from orientation.lagrangians import OrientationPoint
from spectral.det_lines import det_reference
from spectral.pfaffian_lines import pf_reference, skew_spectrum
from spectral.spectral_torsor import sp_make
from spectral.transport import OperatorPath

logger = logging.getLogger(__name__)

# K-dimensions of random boundary models per l
MODEL_DIMS = {0: (1, 3), 1: (1, 4), 2: (1, 2), 3: (1, 2), 4: (1, 2), 5: (1, 2), 6: (1, 3), 7: (1, 4)}
LENGTH_RANGE = (0.5, 1.5)
OPERATOR_SCALE = 1.0


def trial_rng(seed: int, suite_index: int, trial: int) -> np.random.Generator:
    """Generator for trial k of suite s: PCG64 seeded by SeedSequence([seed, s, k])."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, suite_index, trial])))


def random_model(ell: int, rng: np.random.Generator, dim_in: Optional[int] = None,
                 dim_out: Optional[int] = None, scale: float = OPERATOR_SCALE) -> AdaptedOperator:
    ell = ell % 8
    lo, hi = MODEL_DIMS[ell]
    if dim_in is None:
        dim_in = int(rng.integers(lo, hi + 1))
    if ell in (0, 4) and dim_out is None:
        dim_out = max(1, dim_in + int(rng.integers(-1, 2)))
    return random_adapted(ell, dim_in, dim_out, rng, scale)


def random_like(D: AdaptedOperator, rng: np.random.Generator, scale: float = OPERATOR_SCALE) -> AdaptedOperator:
    """A random model of the same l and shape as D."""
    k = D.field.real_dim
    rows, cols = D.entries.shape
    return random_adapted(D.ell, cols // k, rows // k, rng, scale)


def random_potential(D: AdaptedOperator, rank: int, rng: np.random.Generator,
                     scale: float = OPERATOR_SCALE) -> np.ndarray:
    """Adapted potential on D (x) id_{K^rank}."""
    lifted = twist(D, rank).matrix
    G = rng.standard_normal(lifted.shape) * scale
    return adapted_projection(G, lifted, D.ell)



def random_length(rng: np.random.Generator) -> float:
    return float(rng.uniform(*LENGTH_RANGE))


def random_bordism(ell: int, rng: np.random.Generator, source: Optional[AdaptedOperator] = None,
                   target: Optional[AdaptedOperator] = None, steps: Optional[int] = None,
                   length: Optional[float] = None) -> BordismScenario:
    """Straight path from source (far end) to target (near end)."""
    if source is None and target is None:
        source = random_model(ell, rng)
    if source is None:
        source = random_like(target, rng)
    if target is None:
        target = random_like(source, rng)
    steps = steps or int(rng.integers(2, 4))
    return BordismScenario.path(source, target, length or random_length(rng), steps, label=f"path_{ell}")


def random_loop(ell: int, rng: np.random.Generator, base: Optional[AdaptedOperator] = None) -> BordismScenario:
    """base -> random -> base, two straight legs."""
    base = base if base is not None else random_model(ell, rng)
    middle = random_like(base, rng)
    out = BordismScenario.path(base, middle, random_length(rng) / 2, 2, label="out")
    back = BordismScenario.path(middle, base, random_length(rng) / 2, 2, label="back")
    return back.compose(out)


def chart_choices(D: AdaptedOperator, cfg: ToleranceConfig = DEFAULT_TOLERANCES, count: int = 3) -> List[float]:
    """The first few admissible charts of the orientation torsor of D."""
    ell = D.ell
    if ell == 0:
        values = np.abs(eig_selfadjoint(make_cylinder(D).A, cfg).eigenvalues)
        return admissible_cutoffs(values, cfg, lower=0.0)[:count]
    if ell == 1:
        return admissible_cutoffs(np.array(skew_spectrum(D.entries, cfg).values), cfg, lower=0.0)[:count]
    values = eig_selfadjoint(D.entries, cfg).eigenvalues
    lower = float(values.min()) - 1.0 if values.size else -1.0
    return ([lower] + admissible_cutoffs(values, cfg, lower=lower))[:count + 1]


def random_orientation(D: AdaptedOperator, rng: np.random.Generator,
                       cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> OrientationPoint:
    """Reference point of a random chart, rescaled (DET, PF) or shifted (SP)."""
    ell = D.ell
    if ell not in (0, 1, 3, 7):
        return OrientationPoint(ell)
    charts = chart_choices(D, cfg)
    delta = float(charts[int(rng.integers(0, len(charts)))])
    if ell in (3, 7):
        return OrientationPoint(ell, sp_make(D.entries, int(rng.integers(-3, 4)), delta, cfg, D.field))
    factor = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0))
    if ell == 0:
        return OrientationPoint(ell, det_reference(D.entries, delta, cfg).scaled(factor))
    return OrientationPoint(ell, pf_reference(D.entries, delta, cfg).scaled(factor))


def k_closure(vectors: np.ndarray, structures: List[Optional[np.ndarray]],
              rank_tol: float = DEFAULT_TOLERANCES.rank_tol) -> Subspace:
    """Span of the vectors together with their images under the structure maps."""
    n = vectors.shape[0]
    if vectors.shape[1] == 0:
        return Subspace.zero(n, rank_tol)
    maps = [S for S in structures if S is not None]
    columns = [vectors] + [S @ vectors for S in maps]
    if len(maps) == 2:
        columns.append(maps[0] @ maps[1] @ vectors)
    return Subspace.span(np.hstack(columns), rank_tol)


def random_bvp_scenario(ell: int, rng: np.random.Generator, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                        seed: Optional[int] = None) -> BvpScenario:
    """Cylinder with nested K-closed L_small in L_big inside W_delta(diag(A, -A))."""
    D = random_model(ell, rng)
    cyl = make_cylinder(D)
    A_b = np.kron(np.diag([1.0, -1.0]), cyl.A)
    model = eig_selfadjoint(A_b, cfg)
    values = np.abs(model.eigenvalues)
    charts = admissible_cutoffs(values, cfg, lower=0.0)
    delta = float(charts[int(rng.integers(0, min(3, len(charts))))])
    small = spectral_interval(model, -delta, delta, cfg)

    def _double(S):
        return None if S is None else np.kron(np.eye(2), S)

    structures = [_double(cyl.struct_I), _double(cyl.struct_J)]
    count = int(rng.integers(0, small.dim + 1)) if small.dim else 0
    generators = small.basis @ rng.standard_normal((small.dim, count)) if count else np.zeros((A_b.shape[0], 0))
    L_big = k_closure(generators, structures, cfg.rank_tol)
    keep = int(rng.integers(0, count + 1)) if count else 0
    L_small = k_closure(generators[:, :keep], structures, cfg.rank_tol)
    return BvpScenario(cyl, random_length(rng), delta, L_small, L_big, seed)


def random_flow_path(rng: np.random.Generator, dim: Optional[int] = None, step: float = 0.25) -> OperatorPath:
    """Symmetric path A0 -> A1 with a sinusoidal bump that forces crossings."""
    dim = dim or int(rng.integers(2, 6))
    A0 = random_adapted(7, dim, None, rng).entries
    A1 = random_adapted(7, dim, None, rng).entries
    bump = random_adapted(7, dim, None, rng).entries

    def _family(t: float) -> np.ndarray:
        return (1 - t) * A0 + t * A1 + np.sin(np.pi * t) * bump

    return OperatorPath.from_function(_family, 0.0, 1.0, step)


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """QR-orthogonalized Gaussian matrix."""
    if n == 0:
        return np.zeros((0, 0))
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def structure_gauge(D: AdaptedOperator, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal map on the domain of D commuting with its standard K-structure."""
    k = D.field.real_dim
    n = D.entries.shape[1] // k
    return np.kron(random_orthogonal(n, rng), np.eye(k))


def fixed_models() -> Dict[str, AdaptedOperator]:
    """Small hand-written models used by examples and tests."""
    return {
        "zero_line": AdaptedOperator.from_entries(0, np.zeros((1, 1))),
        "aps_example": AdaptedOperator.from_entries(7, np.diag([1.0, -1.0])),
        "rotation_pair": AdaptedOperator.from_entries(1, np.array([[0.0, -1.0], [1.0, 0.0]])),
        "fredholm_one": AdaptedOperator.from_entries(0, np.array([[1.0, 0.0]])),
        "scalar_seven": AdaptedOperator.from_entries(7, np.array([[0.5]]))
    }


