"""Torsors suite: chart systems, structure isomorphisms and transport of DET, PF and SP points."""

import logging
from typing import Any, Dict, List, Tuple

import numpy as np

from data.scenarios import chart_choices, random_flow_path, random_like, random_model, trial_rng
from numeric.spectral import admissible_cutoffs
from numeric.tolerances import ToleranceConfig
from spectral.det_lines import (det_adjoint_pairing, det_chart_change, det_equal, det_move, det_negative_iso,
                                det_ratio, det_reference, det_sum_iso)
from spectral.pfaffian_lines import pf_chart_change, pf_dual_pairing, pf_ratio, pf_reference, pf_sum
from spectral.spectral_torsor import sp_chart, sp_equal, sp_make, sp_negative_dual, sp_sum
from spectral.transport import OperatorPath, sp_mod2_orientation, spectral_flow, transport_along_path
from utils.formatters import format_check
from verifiers.base_verifier import BaseVerifier

logger = logging.getLogger(__name__)

RATIO_TOL = 1e-9
LAMBDA_COUNT = 5


def _close(r: float, target: float = 1.0) -> bool:
    return abs(float(r) - target) <= RATIO_TOL * max(1.0, abs(target))


def _three(charts: List[float]) -> Tuple[float, float, float]:
    """Three non-decreasing charts; repeats when fewer exist."""
    c = sorted(charts)
    return c[0], c[min(1, len(c) - 1)], c[-1]


def det_checks(rng: np.random.Generator, cfg: ToleranceConfig) -> Tuple[List[Dict[str, Any]], bool]:
    """DET chart system and structure isos; also reports whether the printed sum sign commuted."""
    D = random_model(0, rng)
    E = random_like(D, rng)
    c0, c1, c2 = _three(chart_choices(D, cfg))
    x = det_reference(D.entries, c0, cfg).scaled(float(rng.uniform(0.5, 2.0)))
    via = det_chart_change(det_chart_change(x, c1, cfg), c2, cfg)
    direct = det_chart_change(x, c2, cfg)
    z = det_reference(D.entries.T, c0, cfg)
    negative = det_chart_change(det_negative_iso(x, cfg), c2, cfg)
    checks = [
        format_check("det.chart_composition", _close(via.element.ratio_to(direct.element)), charts=[c0, c1, c2]),
        format_check("det.chart_inverse", _close(det_move(direct, c0, cfg).element.ratio_to(x.element))),
        format_check("det.adjoint_pairing_charts",
                     _close(det_adjoint_pairing(z, direct, cfg), det_adjoint_pairing(z, x, cfg))),
        format_check("det.negative_iso_charts",
                     _close(det_negative_iso(direct, cfg).element.ratio_to(negative.element)))
    ]
    y = det_reference(E.entries, chart_choices(E, cfg)[0], cfg)
    derived = det_ratio(det_sum_iso(direct, y, "derived", cfg), det_sum_iso(x, y, "derived", cfg), cfg)
    checks.append(format_check("det.sum_iso_charts", _close(derived), ratio=derived))
    printed = det_ratio(det_sum_iso(direct, y, "printed", cfg), det_sum_iso(x, y, "printed", cfg), cfg)
    return checks, _close(printed)


def pf_checks(rng: np.random.Generator, cfg: ToleranceConfig) -> List[Dict[str, Any]]:
    D = random_model(1, rng)
    E = random_like(D, rng)
    c0, c1, c2 = _three(chart_choices(D, cfg))
    x = pf_reference(D.entries, c0, cfg).scaled(float(rng.uniform(0.5, 2.0)))
    via = pf_chart_change(pf_chart_change(x, c1, cfg), c2, cfg)
    direct = pf_chart_change(x, c2, cfg)
    back = pf_chart_change(direct, c0, cfg)
    y = pf_reference(E.entries, chart_choices(E, cfg)[0], cfg)
    w = pf_reference(-D.entries, c0, cfg)
    sum_ratio = pf_ratio(pf_sum(direct, y, cfg), pf_sum(x, y, cfg), cfg)
    return [
        format_check("pf.chart_composition", _close(via.element.ratio_to(direct.element)), charts=[c0, c1, c2]),
        format_check("pf.chart_inverse", _close(back.element.ratio_to(x.element))),
        format_check("pf.sum_charts", _close(sum_ratio), ratio=sum_ratio),
        format_check("pf.dual_pairing_charts",
                     _close(pf_dual_pairing(w, direct, cfg), pf_dual_pairing(w, x, cfg)))
    ]


def sp_checks(rng: np.random.Generator, cfg: ToleranceConfig) -> List[Dict[str, Any]]:
    D = random_model(7, rng)
    E = random_like(D, rng)
    charts = chart_choices(D, cfg, LAMBDA_COUNT)
    c0, c1, c2 = _three(charts)
    x = sp_make(D.entries, int(rng.integers(-3, 4)), c0, cfg, D.field)
    via = sp_chart(sp_chart(x, c1, cfg), c2, cfg)
    direct = sp_chart(x, c2, cfg)
    y = sp_make(E.entries, int(rng.integers(-3, 4)), chart_choices(E, cfg)[0], cfg, E.field)
    w = sp_make(-D.entries, int(rng.integers(-3, 4)), -c1, cfg, D.field)
    checks = [
        format_check("sp.chart_composition", via.m == direct.m and sp_equal(via, x, cfg), m=[x.m, via.m]),
        format_check("sp.chart_inverse", sp_chart(direct, c0, cfg).m == x.m),
        format_check("sp.sum_charts", sp_equal(sp_sum(direct, y, cfg), sp_sum(x, y, cfg), cfg)),
        format_check("sp.negative_dual_charts", sp_negative_dual(w, direct, cfg) == sp_negative_dual(w, x, cfg))
    ]
    orientations = [sp_mod2_orientation(x, lam, cfg) for lam in charts]
    independent = all(det_equal(o, orientations[0], RATIO_TOL, cfg) for o in orientations[1:])
    checks.append(format_check("sp.mod2_lambda_independent", independent, lambdas=charts))
    return checks


def transport_checks(rng: np.random.Generator, cfg: ToleranceConfig) -> List[Dict[str, Any]]:
    """Transport along a path and along its refinement give the same orientation and flow."""
    path = random_flow_path(rng)
    finer = OperatorPath.from_function(path.function, path.parameters[0], path.parameters[-1],
                                       (path.parameters[1] - path.parameters[0]) / 2)
    delta = admissible_cutoffs(np.abs(np.linalg.eigvalsh(path.start)), cfg, lower=0.0)[0]
    start = det_reference(path.start, delta, cfg)
    coarse_end = transport_along_path(path, start, cfg)
    fine_end = transport_along_path(finer, start, cfg)
    ratio = det_ratio(coarse_end, fine_end, cfg)
    checks = [format_check("transport.det_refinement_orientation", ratio > 0, ratio=ratio)]
    cutoff = _flow_cutoff(path, cfg)
    checks.append(format_check("transport.sp_refinement",
                               spectral_flow(path, cutoff, cfg) == spectral_flow(finer, cutoff, cfg),
                               cutoff=cutoff))
    return checks


def _flow_cutoff(path: OperatorPath, cfg: ToleranceConfig) -> float:
    """A cutoff admissible at both ends of the path."""
    ends = np.concatenate([np.linalg.eigvalsh(path.start), np.linalg.eigvalsh(path.end)])
    lower = float(ends.min()) - 1.0
    cutoffs = admissible_cutoffs(ends, cfg, lower=lower)
    return cutoffs[len(cutoffs) // 2]


class TorsorsVerifier(BaseVerifier):
    """Seeded random models of real dimension at most 12."""

    def __init__(self):
        super().__init__("torsors")

    def run_checks(self, seed: int, trials: int, cfg: ToleranceConfig,
                   options: Dict[str, Any]) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
        checks: List[Dict[str, Any]] = []
        printed_incompatible = 0
        for ell in self.ells(options.get("ells")):
            for k in range(trials):
                rng = trial_rng(seed, self.suite_index * 8 + ell, k)
                if ell == 0:
                    found, printed_ok = det_checks(rng, cfg)
                    printed_incompatible += 0 if printed_ok else 1
                elif ell == 1:
                    found = pf_checks(rng, cfg)
                else:
                    found = sp_checks(rng, cfg) + transport_checks(rng, cfg)
                for c in found:
                    c["details"].update({"ell": ell, "trial": k, "seed": seed})
                checks.extend(found)
            logger.info(f"torsors l={ell}: {trials} trial(s) done")
        return checks, {"printed_sum_sign_incompatible_trials": printed_incompatible}


# Global torsors verifier instance
torsors_verifier = TorsorsVerifier()
