"""Clifford suite: exact checks of Cl_n, Delta_n, Phi_{n+1} and the cylinder Dirac blocks."""

import logging
from typing import Any, Dict, List, Tuple

from clifford.algebra import even_iso_identities, volume_identities
from clifford.dirac_blocks import cylinder_dirac_block
from clifford.intertwiners import adjacent_iso_phi
from clifford.representations import build_delta, half_spinor_split, representation_identities
from config import N_MAX
from numeric.tolerances import ToleranceConfig
from utils.errors import UsageError
from utils.formatters import format_check
from verifiers.base_verifier import BaseVerifier

logger = logging.getLogger(__name__)

SPLITTING_RESIDUES = (0, 1, 2, 4)
DIRAC_BLOCK_MAX = 8


def _named(prefix: str, identities: Dict[str, bool], **details) -> List[Dict[str, Any]]:
    return [format_check(f"{prefix}.{name}", ok, **details) for name, ok in sorted(identities.items())]


class CliffordVerifier(BaseVerifier):
    """Exhaustive over n = 1..max_n; ignores trials and seed."""

    def __init__(self):
        super().__init__("clifford")

    def run_checks(self, seed: int, trials: int, cfg: ToleranceConfig,
                   options: Dict[str, Any]) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
        max_n = int(options.get("max_n", N_MAX))
        if not 1 <= max_n <= N_MAX:
            raise UsageError(f"max_n must lie in 1..{N_MAX}, got {max_n}")
        emit = bool(options.get("emit_matrices", False))
        checks: List[Dict[str, Any]] = []
        dimensions: Dict[str, int] = {}
        representations: List[Dict[str, Any]] = []
        isomorphisms: List[Dict[str, Any]] = []
        blocks: List[Dict[str, Any]] = []

        for n in range(1, max_n + 1):
            checks += _named(f"volume.n{n}", volume_identities(n), n=n)
            if n >= 2:
                checks += _named(f"even_iso.n{n}", even_iso_identities(n), n=n)
            for rep in build_delta(n):
                checks += _named(f"delta.n{n}.{rep.flavor}", representation_identities(rep), n=n)
                dimensions[str(n)] = rep.dim
                if emit:
                    representations.append(rep.to_dict())
            if n % 8 in SPLITTING_RESIDUES:
                plus, minus = half_spinor_split(build_delta(n)[0])
                checks.append(format_check(f"half_spinors.n{n}", plus.dim == minus.dim
                                           and plus.dim + minus.dim == build_delta(n)[0].dim,
                                           plus=plus.dim, minus=minus.dim))
            if n < max_n:
                iso = adjacent_iso_phi(n)
                checks += _named(f"phi.n{n + 1}", iso.identities, n=n, case=iso.case)
                if emit:
                    isomorphisms.append(iso.to_dict())
                if n <= DIRAC_BLOCK_MAX:
                    report = cylinder_dirac_block(n)
                    block = report.to_dict()
                    details = {k: v for k, v in block.items() if k != "passed"}
                    checks.append(format_check(f"dirac_block.n{n}", report.passed, **details))
                    blocks.append(block)
            logger.debug(f"Clifford checks done for n={n}")

        tables: Dict[str, Any] = {"max_n": max_n, "dimensions": dimensions, "dirac_blocks": blocks}
        if emit:
            tables["representations"] = representations
            tables["adjacent_isomorphisms"] = isomorphisms
        return checks, tables


# Global clifford verifier instance
clifford_verifier = CliffordVerifier()
