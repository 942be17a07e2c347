"""Torsion audit of stalk / costalk quotients over Z_(p)."""

from __future__ import annotations

from ..engine import BMSheaf, costalk
from ..graded import TorsionReport, torsion_report
from ..scalars import PLocalIntegers

__all__ = ["torsion_audit"]


def torsion_audit(S: BMSheaf) -> dict:
    """vertex -> TorsionReport of B^x / B_x, degreewise."""
    if not isinstance(S.coeff, PLocalIntegers):
        raise TypeError("torsion_audit needs Z_(p) coefficients")
    out = {}
    for x in S.graph.vertices:
        if S.stalks[x].is_zero():
            out[x] = TorsionReport(S.coeff.p)
            continue
        _, incl = costalk(S, x)
        out[x] = torsion_report(incl)
    return out
