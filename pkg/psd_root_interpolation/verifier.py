"""Property campaigns: numerical checks of determinantal, majorisation and mean inequalities.

Every property is a pair of functions. ``draw(spec, index)`` returns the named inputs of
trial ``index`` as a dict, and ``margin(**inputs)`` returns the normalised slack of the
checked inequality, negative where it is violated. A campaign evaluates all trials,
counts margins below ``-tolerance`` as failures and keeps the inputs of the worst one,
so any report can be replayed from its stored inputs.
"""

import json
import logging
import time

from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable, NamedTuple, Optional

import numpy as np
import pandas as pd

from scipy.stats import ortho_group

from .ensembles import generate_commuting_pair, generate_psd
from .geodesics import GeodesicSpec, path_point
from .linalg_core import PSD_RTOL, determinant, eigvals_sym, lambda_max, polar, sqrtm_psd
from .majorisation import compound_matrix, log_majorises, phi_gradient, phi_isotone, pinch
from .matrix_means import (
    block_psd_margin,
    commuting_mean,
    geometric_mean,
    hiai_margin,
    monotonicity_margin,
    naive_geometric_mean,
    naive_mean_eigenvalues,
    scaling_identity_margin,
)
from .metrics import (
    MetricKind,
    distance_cholesky,
    distance_euclidean_root,
    roots_and_polar_factor,
)


logger = logging.getLogger(__name__)

TOL_REL = 1e-9
TOL_ABS = 1e-10
DEFAULT_P_VALUES = (-1.0, -0.5, 1.5, 2.0)
WITNESS_THRESHOLD = 1e-6
SWELL_GRID_POINTS = 21
HIAI_POWERS = (2, 3)
N_ROTATIONS = 100
LEMMA_ZERO_FLOOR = 1e-6
BLOCK_SHIFT = 0.01
FD_STEP = 1e-6
FD_RTOL = 1e-6


class PropertyId(Enum):
    """Properties with a verification campaign."""

    MAIN_THEOREM = "MainTheorem"
    MAIN_THEOREM_REALNESS = "MainTheoremRealness"
    MAIN_THEOREM_REDUCTION = "MainTheoremReduction"
    DET_GEO_MEAN = "DetGeoMean"
    LOG_MAJO_LEMMA = "LogMajoLemma"
    LARGEST_EIG_LEMMA = "LargestEigLemma"
    HIAI_LEMMA = "HiaiLemma"
    COMMUTING_EQUALITY = "CommutingEquality"
    MONOTONICITY = "Monotonicity"
    BLOCK_MAXIMALITY = "BlockMaximality"
    SCALING_IDENTITY = "ScalingIdentity"
    CAUCHY_BINET_DET = "CauchyBinetDet"
    SWELL_ORDERING = "SwellOrdering"
    EXTRAPOLATION_SEARCH = "ExtrapolationSearch"
    PHI_ISOTONE = "PhiIsotone"
    WEYL_COMPOUND = "WeylCompound"
    PROCRUSTES_MINIMALITY = "ProcrustesMinimality"


@dataclass
class VerificationReport:
    """Result of one property campaign.

    ``failures == 0`` iff ``worst_margin >= -tolerance``. ``worst_case_inputs`` holds the
    inputs of the worst trial as nested lists and reproduces ``worst_margin`` through
    :func:`replay`. ``elapsed`` is wall-clock time in seconds and is not compared.
    """

    property: PropertyId
    trials_run: int
    failures: int
    near_misses: int
    worst_margin: float
    worst_case_inputs: dict
    worst_trial: Optional[int]
    seed: int
    tolerance: float
    sign_counts: dict = field(default_factory=dict)
    elapsed: float = field(default=0.0, compare=False)

    @property
    def passed(self):
        """True iff no trial failed."""
        return self.failures == 0

    def to_dict(self):
        """Plain dict with the property name as a string, ready for JSON."""
        record = asdict(self)
        record["property"] = self.property.value
        return record

    @classmethod
    def from_dict(cls, record):
        """Inverse of :meth:`to_dict`."""
        record = dict(record)
        record["property"] = PropertyId(record["property"])
        return cls(**record)


class PropertyCheck(NamedTuple):
    """Draw and margin functions of a property and its tolerance."""

    draw: Callable
    margin: Callable
    tolerance: float


def _scaled(slack, reference, scale):
    """``slack`` in units of ``TOL_REL * |reference| + TOL_ABS * scale`` per ``TOL_REL``."""
    return float(slack / (abs(reference) + TOL_ABS / TOL_REL * scale + np.finfo(float).tiny))


def _draw_pair(spec, index):
    return {"D1": generate_psd(spec, index, 0), "D2": generate_psd(spec, index, 1)}


def _aux_rng(spec, index):
    return np.random.default_rng([spec.seed, index, 0, 2])


def _root_scale(Q1, Q2):
    return max(lambda_max(Q1), lambda_max(Q2), 0.0)


def margin_main_theorem(D1, D2):
    """``det(Q1 + U.T Q2) <= det(Q1 + Q2)`` and ``det(Q1 + U.T Q2) >= 0``."""
    Q1, Q2, U = roots_and_polar_factor(D1, D2)
    scale = (2 * _root_scale(Q1, Q2)) ** len(Q1)
    lhs = determinant(Q1 + U.T @ Q2)
    rhs = determinant(Q1 + Q2)
    return min(_scaled(rhs - lhs, rhs, scale), _scaled(lhs, 0.0, scale))


def margin_main_theorem_realness(D1, D2):
    """Non-negativity of ``det(Q1 + U.T Q2)`` and of ``det(Q1^2 + |Q2 Q1|)``."""
    Q1, Q2, U = roots_and_polar_factor(D1, D2)
    c = _root_scale(Q1, Q2)
    n = len(Q1)
    modulus = polar(Q2 @ Q1).modulus
    return min(
        _scaled(determinant(Q1 + U.T @ Q2), 0.0, (2 * c) ** n),
        _scaled(determinant(Q1 @ Q1 + modulus), 0.0, (2 * c * c) ** n),
    )


def margin_main_theorem_reduction(D1, D2):
    """``det((Q1 + U.T Q2) Q1) = det(Q1^2 + |Q2 Q1|) <= det(Q1^2 + Q1 Q2)``."""
    Q1, Q2, U = roots_and_polar_factor(D1, D2)
    c = _root_scale(Q1, Q2)
    scale = (2 * c * c) ** len(Q1)
    reduced = determinant(Q1 @ Q1 + polar(Q2 @ Q1).modulus)
    product = determinant((Q1 + U.T @ Q2) @ Q1)
    bound = determinant(Q1 @ Q1 + Q1 @ Q2)
    return min(
        _scaled(-abs(product - reduced), reduced, scale),
        _scaled(bound - reduced, bound, scale),
    )


def margin_det_geomean(D1, D2):
    """``det(I + A # B) <= det(I + A^(1/2) B^(1/2))`` and its trace-log form."""
    n = len(D1)
    G = geometric_mean(D1, D2)
    lhs = determinant(np.eye(n) + G)
    rhs = determinant(np.eye(n) + naive_geometric_mean(D1, D2))
    tracelog_lhs = np.sum(np.log1p(np.maximum(eigvals_sym(G), 0.0)))
    tracelog_rhs = np.sum(np.log1p(naive_mean_eigenvalues(D1, D2)))
    return min(
        _scaled(rhs - lhs, rhs, 0.0),
        float((tracelog_rhs - tracelog_lhs) / (1.0 + abs(tracelog_rhs))),
    )


def _lemma_spectra(D1, D2):
    x = naive_mean_eigenvalues(D1, D2)
    y = np.maximum(eigvals_sym(geometric_mean(D1, D2)), 0.0)
    return x, y


def margin_log_majo_lemma(D1, D2):
    """``lambda(A # B)`` is log-majorised by ``lambda(A^(1/2) B^(1/2))``.

    Both full products must also equal ``sqrt(det(A) det(B))``; they are compared in
    squared form with ``det(A) det(B)``, whose rounding error stays at machine precision
    when an input is singular. Spectra with entries below ``LEMMA_ZERO_FLOOR`` times the
    largest are compared by plain partial products.
    """
    x, y = _lemma_spectra(D1, D2)
    verdict = log_majorises(x, y, tol=0.0, weak=True, zero_floor=LEMMA_ZERO_FLOOR)
    target = determinant(D1) * determinant(D2)
    scale = max(x[0], y[0]) ** (2 * len(x))
    return min(
        verdict.worst_margin,
        _scaled(-abs(np.prod(x) ** 2 - target), target, scale),
        _scaled(-abs(np.prod(y) ** 2 - target), target, scale),
    )


def margin_largest_eig_lemma(D1, D2):
    """``lambda_1(A # B) <= lambda_1(A^(1/2) B^(1/2))``."""
    x, y = _lemma_spectra(D1, D2)
    return _scaled(x[0] - y[0], x[0], 0.0)


def margin_hiai_lemma(D1, D2):
    """After rescaling to ``lambda_max(A # B) = 1``: ``lambda_max(A^r # B^r) <= 1``."""
    return min(hiai_margin(D1, D2, r) for r in HIAI_POWERS)


def _draw_commuting(spec, index):
    pair = generate_commuting_pair(spec, index)
    return {
        "D1": pair.A,
        "D2": pair.B,
        "a": pair.eigenvalues_a,
        "b": pair.eigenvalues_b,
        "basis": pair.basis,
    }


def margin_commuting_equality(D1, D2, a, b, basis):
    """For ``A = V diag(a) V.T`` and ``B = V diag(b) V.T``: ``A # B = V diag(sqrt(ab)) V.T``.

    On commuting pairs the determinant inequality is an equality,
    ``det(I + A # B) = det(I + A^(1/2) B^(1/2))``. The roots are taken as
    ``V diag(sqrt(a)) V.T``; roots through the eigensolver carry square roots of rounding
    noise on the null spaces.
    """
    n = len(D1)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    V = np.asarray(basis, dtype=float)
    s = max(np.max(a), np.max(b))
    G = geometric_mean(D1, D2)
    expected = commuting_mean(a, b, V)
    lhs = determinant(np.eye(n) + G)
    rhs = determinant(np.eye(n) + ((V * np.sqrt(a)) @ V.T) @ ((V * np.sqrt(b)) @ V.T))
    return min(
        _scaled(-np.linalg.norm(G - expected), np.linalg.norm(expected), s),
        _scaled(-abs(lhs - rhs), rhs, 0.0),
    )


def _draw_monotone(spec, index):
    B1 = generate_psd(spec, index, 1)
    return {"A": generate_psd(spec, index, 0), "B1": B1, "B2": B1 + generate_psd(spec, index, 2)}


def margin_monotonicity(A, B1, B2):
    """``A # B1 <= A # B2`` for ``B1 <= B2``."""
    return monotonicity_margin(A, B1, B2)


def margin_block_maximality(D1, D2):
    """``[[A, A # B], [A # B, B]]`` is PSD and ``[[A, X], [X, B]]`` is not for ``X = A # B + dI``.

    The shift is ``d = BLOCK_SHIFT * max(lambda_max(A), lambda_max(B))``. The second
    margin is positive iff the shifted block fails :func:`is_psd`.
    """
    n = len(D1)
    s = max(lambda_max(D1), lambda_max(D2))
    G = geometric_mean(D1, D2)
    X = G + BLOCK_SHIFT * s * np.eye(n)
    return min(block_psd_margin(D1, D2, G), -block_psd_margin(D1, D2, X) / PSD_RTOL - 1.0)


def _draw_scaled_pair(spec, index):
    inputs = _draw_pair(spec, index)
    rng = _aux_rng(spec, index)
    inputs["a"], inputs["b"] = np.exp(rng.uniform(np.log(0.1), np.log(10.0), size=2))
    return inputs


def margin_scaling_identity(D1, D2, a, b):
    """``(aA) # (bB) = sqrt(ab) (A # B)`` and ``A # B = B # A``."""
    s = max(lambda_max(D1), lambda_max(D2))
    G = geometric_mean(D1, D2)
    symmetry_err = np.linalg.norm(G - geometric_mean(D2, D1))
    return min(
        scaling_identity_margin(D1, D2, float(a), float(b)),
        _scaled(-symmetry_err, np.linalg.norm(G), s),
    )


def margin_cauchy_binet_det(D1, D2):
    """``det(Q2 Q1) = det(Q2) det(Q1)`` and ``det(A # B) ** 2 = det(A) det(B)``."""
    n = len(D1)
    Q1 = sqrtm_psd(D1)
    Q2 = sqrtm_psd(D2)
    product = determinant(Q2) * determinant(Q1)
    root_scale = _root_scale(Q1, Q2) ** (2 * n)
    target = determinant(D1) * determinant(D2)
    mean_scale = max(lambda_max(D1), lambda_max(D2)) ** (2 * n)
    return min(
        _scaled(-abs(determinant(Q2 @ Q1) - product), product, root_scale),
        _scaled(-abs(determinant(geometric_mean(D1, D2)) ** 2 - target), target, mean_scale),
    )


def margin_swell_ordering(D1, D2):
    """``det(D_S(p)) <= det(D_H(p))`` on an equispaced grid of ``[0, 1]``."""
    procrustes = GeodesicSpec(MetricKind.PROCRUSTES, D1, D2)
    root = GeodesicSpec(MetricKind.EUCLIDEAN_ROOT, D1, D2)
    scale = max(lambda_max(D1), lambda_max(D2)) ** len(D1)
    margins = []
    for p in np.linspace(0.0, 1.0, SWELL_GRID_POINTS):
        det_h = determinant(path_point(root, p))
        det_s = determinant(path_point(procrustes, p))
        margins.append(_scaled(det_h - det_s, det_h, scale))
    return min(margins)


def _draw_phi(spec, index):
    rng = _aux_rng(spec, index)
    x = rng.normal(0.0, 3.0, size=spec.dim)
    return {
        "x": x,
        "y": pinch(x, rng, n_transforms=2 * spec.dim),
        "z": rng.normal(0.0, 3.0, size=spec.dim),
    }


def margin_phi_isotone(x, y, z):
    """Schur isotony of Phi: ``Phi(y) <= Phi(x)`` for ``y`` majorised by ``x``.

    Also checks Schur's condition ``(z_i - z_j)(dPhi_i - dPhi_j) >= 0`` at ``z`` and the
    gradient against central finite differences (slack ``FD_RTOL`` minus the relative error).
    """
    phi_x = phi_isotone(x)
    isotony = (phi_x - phi_isotone(y)) / (1.0 + abs(phi_x))

    z = np.asarray(z, dtype=float)
    g = phi_gradient(z)
    schur = np.min(np.subtract.outer(z, z) * np.subtract.outer(g, g)) / (1.0 + np.max(np.abs(z)))

    steps = FD_STEP * np.eye(len(z))
    fd = np.array([(phi_isotone(z + h) - phi_isotone(z - h)) / (2 * FD_STEP) for h in steps])
    fd_err = np.max(np.abs(fd - g)) / max(np.max(np.abs(g)), np.finfo(float).tiny)
    return float(min(isotony, schur, FD_RTOL - fd_err))


def margin_weyl_compound(D1, D2):
    """Compound matrix identities for all orders ``k``.

    ``lambda_1(A^k) = lambda_1(A) ... lambda_k(A)``, ``(AB)^k = A^k B^k`` and
    ``(A # B)^k = A^k # B^k``, where ``^k`` is the ``k``-th compound.
    """
    n = len(D1)
    w = np.maximum(eigvals_sym(D1), 0.0)
    sa = max(w[0], 0.0)
    sb = max(lambda_max(D2), 0.0)
    s = max(sa, sb)
    G = geometric_mean(D1, D2)
    margins = []
    for k in range(1, n + 1):
        Ca = compound_matrix(D1, k)
        Cb = compound_matrix(D2, k)
        top = lambda_max(Ca)
        expected = np.prod(w[:k])
        margins.append(_scaled(-abs(top - expected), expected, sa ** k))
        rhs = Ca @ Cb
        err = np.linalg.norm(compound_matrix(D1 @ D2, k) - rhs)
        margins.append(_scaled(-err, np.linalg.norm(rhs), (sa * sb) ** k))
        lhs = compound_matrix(G, k)
        err = np.linalg.norm(lhs - geometric_mean(Ca, Cb))
        margins.append(_scaled(-err, np.linalg.norm(lhs), s ** k))
    return min(margins)


def _draw_rotations(spec, index):
    inputs = _draw_pair(spec, index)
    inputs["rotation_seed"] = int(_aux_rng(spec, index).integers(2 ** 32))
    return inputs


def margin_procrustes_minimality(D1, D2, rotation_seed):
    """The closed-form Procrustes distance is the minimum over rotations of ``Q2``.

    Checks ``d_S <= ||Q1 - R Q2||`` for ``N_ROTATIONS`` random orthogonal ``R``,
    ``d_S <= d_C``, ``d_S <= d_H`` and the trace expansion of ``||Q1 - R Q2||^2``.
    """
    Q1, Q2, U = roots_and_polar_factor(D1, D2)
    n = len(Q1)
    sigma = 1.0 + np.linalg.norm(Q1) + np.linalg.norm(Q2)
    d_s = np.linalg.norm(Q1 - U.T @ Q2)
    rotations = ortho_group.rvs(n, size=N_ROTATIONS, random_state=int(rotation_seed))
    base = np.trace(Q1 @ Q1 + Q2 @ Q2)
    margins = [
        (distance_cholesky(D1, D2) - d_s) / sigma,
        (distance_euclidean_root(D1, D2) - d_s) / sigma,
    ]
    for R in rotations:
        d_r = np.linalg.norm(Q1 - R @ Q2)
        margins.append((d_r - d_s) / sigma)
        expanded = base - 2 * np.trace(R @ Q2 @ Q1)
        margins.append(-abs(d_r ** 2 - expanded) / sigma ** 2)
    return float(min(margins))


PROPERTY_CHECKS = {
    PropertyId.MAIN_THEOREM: PropertyCheck(_draw_pair, margin_main_theorem, TOL_REL),
    PropertyId.MAIN_THEOREM_REALNESS: PropertyCheck(
        _draw_pair, margin_main_theorem_realness, TOL_REL
    ),
    PropertyId.MAIN_THEOREM_REDUCTION: PropertyCheck(
        _draw_pair, margin_main_theorem_reduction, TOL_REL
    ),
    PropertyId.DET_GEO_MEAN: PropertyCheck(_draw_pair, margin_det_geomean, 1e-8),
    PropertyId.LOG_MAJO_LEMMA: PropertyCheck(_draw_pair, margin_log_majo_lemma, 1e-8),
    PropertyId.LARGEST_EIG_LEMMA: PropertyCheck(_draw_pair, margin_largest_eig_lemma, 1e-8),
    PropertyId.HIAI_LEMMA: PropertyCheck(_draw_pair, margin_hiai_lemma, 1e-8),
    PropertyId.COMMUTING_EQUALITY: PropertyCheck(
        _draw_commuting, margin_commuting_equality, TOL_REL
    ),
    PropertyId.MONOTONICITY: PropertyCheck(_draw_monotone, margin_monotonicity, 1e-8),
    PropertyId.BLOCK_MAXIMALITY: PropertyCheck(_draw_pair, margin_block_maximality, 1e-8),
    PropertyId.SCALING_IDENTITY: PropertyCheck(_draw_scaled_pair, margin_scaling_identity, 1e-8),
    PropertyId.CAUCHY_BINET_DET: PropertyCheck(_draw_pair, margin_cauchy_binet_det, 1e-8),
    PropertyId.SWELL_ORDERING: PropertyCheck(_draw_pair, margin_swell_ordering, TOL_REL),
    PropertyId.PHI_ISOTONE: PropertyCheck(_draw_phi, margin_phi_isotone, TOL_REL),
    PropertyId.WEYL_COMPOUND: PropertyCheck(_draw_pair, margin_weyl_compound, 1e-7),
    PropertyId.PROCRUSTES_MINIMALITY: PropertyCheck(
        _draw_rotations, margin_procrustes_minimality, TOL_REL
    ),
}


def _finite(margin):
    margin = float(margin)
    return margin if not np.isnan(margin) else -np.inf


def _serialise(inputs):
    if inputs is None:
        return None
    return {name: np.asarray(value).tolist() for name, value in inputs.items()}


def _deserialise(inputs):
    return {name: np.asarray(value) for name, value in inputs.items()}


def _log_report(report):
    logger.info(
        "%s: %d trials, %d failures, %d near misses, worst margin %.3e (%.2f s)",
        report.property.value,
        report.trials_run,
        report.failures,
        report.near_misses,
        report.worst_margin,
        report.elapsed,
    )
    if report.failures:
        logger.warning(
            "%s violated in %d of %d trials, worst at trial %s",
            report.property.value,
            report.failures,
            report.trials_run,
            report.worst_trial,
        )
    elif report.near_misses:
        logger.warning(
            "%s: %d near misses within tolerance %.1e",
            report.property.value,
            report.near_misses,
            report.tolerance,
        )


def run_property(prop, spec, p_values=DEFAULT_P_VALUES):
    """Run the campaign of one property.

    Parameters
    ----------
    prop: PropertyId or str
        The property.
    spec: EnsembleSpec
        Ensemble to draw the trials from.
    p_values: sequence of float
        Extrapolation parameters, only used by ``ExtrapolationSearch``.

    Returns
    -------
    VerificationReport

    """
    prop = PropertyId(prop)
    if prop is PropertyId.EXTRAPOLATION_SEARCH:
        return search_extrapolation_counterexamples(spec, p_values)
    check = PROPERTY_CHECKS[prop]
    logger.info(
        "%s: %d trials, dim %d, seed %d, rank mode %s",
        prop.value,
        spec.trials,
        spec.dim,
        spec.seed,
        spec.rank_mode.value,
    )
    start = time.perf_counter()
    failures = near_misses = 0
    worst_margin = np.inf
    worst_inputs = worst_trial = None
    for index in range(spec.trials):
        inputs = check.draw(spec, index)
        margin = _finite(check.margin(**inputs))
        if margin < -check.tolerance:
            failures += 1
        elif margin < 0:
            near_misses += 1
        if margin < worst_margin:
            worst_margin, worst_inputs, worst_trial = margin, inputs, index
    report = VerificationReport(
        property=prop,
        trials_run=spec.trials,
        failures=failures,
        near_misses=near_misses,
        worst_margin=worst_margin,
        worst_case_inputs=_serialise(worst_inputs),
        worst_trial=worst_trial,
        seed=spec.seed,
        tolerance=check.tolerance,
        elapsed=time.perf_counter() - start,
    )
    _log_report(report)
    return report


def verify_main_theorem(spec):
    """Campaign for ``0 <= det(Q1 + U.T Q2) <= det(Q1 + Q2)``."""
    return run_property(PropertyId.MAIN_THEOREM, spec)


def verify_det_geomean(spec):
    """Campaign for ``det(I + A # B) <= det(I + A^(1/2) B^(1/2))``."""
    return run_property(PropertyId.DET_GEO_MEAN, spec)


def verify_log_majo_lemma(spec):
    """Campaign for the log-majorisation of ``lambda(A # B)`` by ``lambda(A^(1/2) B^(1/2))``."""
    return run_property(PropertyId.LOG_MAJO_LEMMA, spec)


def _extrapolation_differences(D1, D2, p_values):
    procrustes = GeodesicSpec(MetricKind.PROCRUSTES, D1, D2)
    root = GeodesicSpec(MetricKind.EUCLIDEAN_ROOT, D1, D2)
    return [
        determinant(path_point(procrustes, p)) - determinant(path_point(root, p))
        for p in p_values
    ]


_SIGNS = (("positive", 1.0), ("negative", -1.0))


def search_extrapolation_counterexamples(spec, p_values=DEFAULT_P_VALUES):
    """Search for extrapolation parameters where either path has the larger determinant.

    For every trial pair and every ``p``, ``det(D_S(p)) - det(D_H(p))`` is evaluated. The
    largest difference of each sign is kept with its inputs as a witness. The margin of a
    sign is the witness magnitude minus ``WITNESS_THRESHOLD``, so the campaign passes iff
    witnesses of both signs exceeding the threshold are found.

    Parameters
    ----------
    spec: EnsembleSpec
        Ensemble to draw the endpoint pairs from.
    p_values: sequence of float
        Parameters outside ``[0, 1]``.

    Returns
    -------
    VerificationReport
        ``worst_case_inputs`` maps ``"positive"`` and ``"negative"`` to the witness
        inputs (or None), ``sign_counts`` holds how many differences of each sign
        exceeded ``TOL_REL`` in magnitude.

    """
    p_values = tuple(float(p) for p in p_values)
    if not p_values:
        raise ValueError("p_values must not be empty")
    inside = [p for p in p_values if 0.0 <= p <= 1.0]
    if inside:
        raise ValueError(f"extrapolation parameters must lie outside [0, 1], got {inside}")
    prop = PropertyId.EXTRAPOLATION_SEARCH
    logger.info(
        "%s: %d trials, dim %d, seed %d, p in %s",
        prop.value,
        spec.trials,
        spec.dim,
        spec.seed,
        p_values,
    )
    start = time.perf_counter()
    best = {name: (0.0, None, None) for name, _ in _SIGNS}
    counts = {name: 0 for name, _ in _SIGNS}
    for index in range(spec.trials):
        inputs = _draw_pair(spec, index)
        diffs = _extrapolation_differences(inputs["D1"], inputs["D2"], p_values)
        for p, diff in zip(p_values, diffs):
            for name, sign in _SIGNS:
                magnitude = sign * diff
                if magnitude > TOL_REL:
                    counts[name] += 1
                if magnitude > best[name][0]:
                    best[name] = (magnitude, dict(inputs, p=p), index)

    margins = {name: best[name][0] - WITNESS_THRESHOLD for name, _ in _SIGNS}
    worst_name = min(margins, key=margins.get)
    report = VerificationReport(
        property=prop,
        trials_run=spec.trials,
        failures=sum(m < -TOL_REL for m in margins.values()),
        near_misses=sum(-TOL_REL <= m < 0 for m in margins.values()),
        worst_margin=margins[worst_name],
        worst_case_inputs={name: _serialise(best[name][1]) for name, _ in _SIGNS},
        worst_trial=best[worst_name][2],
        seed=spec.seed,
        tolerance=TOL_REL,
        sign_counts=counts,
        elapsed=time.perf_counter() - start,
    )
    _log_report(report)
    return report


def replay(report):
    """Re-evaluate the margin of a report from its stored worst-case inputs."""
    if report.property is PropertyId.EXTRAPOLATION_SEARCH:
        margins = []
        for name, sign in _SIGNS:
            witness = report.worst_case_inputs.get(name)
            magnitude = 0.0
            if witness is not None:
                inputs = _deserialise(witness)
                (diff,) = _extrapolation_differences(
                    inputs["D1"], inputs["D2"], [float(inputs["p"])]
                )
                magnitude = max(sign * diff, 0.0)
            margins.append(magnitude - WITNESS_THRESHOLD)
        return min(margins)
    check = PROPERTY_CHECKS[report.property]
    return _finite(check.margin(**_deserialise(report.worst_case_inputs)))


def run_all(spec, properties=None, p_values=DEFAULT_P_VALUES):
    """Run the campaigns of several properties, in order.

    Parameters
    ----------
    spec: EnsembleSpec
        Ensemble shared by all campaigns.
    properties: sequence of PropertyId or str, optional
        Defaults to every property.
    p_values: sequence of float
        Extrapolation parameters for ``ExtrapolationSearch``.

    Returns
    -------
    list of VerificationReport

    """
    properties = list(PropertyId) if properties is None else [PropertyId(p) for p in properties]
    if not properties:
        raise ValueError("no properties selected")
    reports = [run_property(prop, spec, p_values) for prop in properties]
    failed = [r.property.value for r in reports if not r.passed]
    logger.info("%d campaigns, %d failed %s", len(reports), len(failed), failed or "")
    return reports


_FRAME_COLUMNS = [
    "property",
    "trials_run",
    "failures",
    "near_misses",
    "worst_margin",
    "tolerance",
    "worst_trial",
    "seed",
    "elapsed",
]


def reports_to_frame(reports):
    """Summary table of reports, one row per property, without the stored inputs."""
    records = [{k: v for k, v in r.to_dict().items() if k in _FRAME_COLUMNS} for r in reports]
    return pd.DataFrame.from_records(records, columns=_FRAME_COLUMNS)


def reports_to_json(reports):
    """JSON list of full reports including the worst-case inputs."""
    return json.dumps([r.to_dict() for r in reports], indent=2)


def reports_from_json(text):
    """Reports from the output of :func:`reports_to_json`."""
    return [VerificationReport.from_dict(record) for record in json.loads(text)]

