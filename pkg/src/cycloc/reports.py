"""JSON reports on codes and their trellises."""

from __future__ import annotations

from typing import Optional, Sequence, Union

from .cyclic import CyclicCode, code_report, dual_zeros
from .locality import locality_report
from .ordering import Chain, enumerate_chains, gamma_order, identity_order
from .trellis import (TrellisCapacityError, analytic_counts, build_trellis, ComplexityReport,
                      dimension_profile, max_state_bound, profile_upper_bound)


def report_code(code: CyclicCode) -> dict:
    out = code_report(code)
    out["dual_zeros"] = list(dual_zeros(code).elements)
    loc = locality_report(code)
    out["locality"] = loc["per_divisor"]
    out["hierarchies"] = loc["hierarchies"]
    out["chains"] = [list(c.elements) for c in enumerate_chains(code.n)]
    if not out["chains"]:
        out["note"] = f"n={code.n} has no proper divisors, so no chains or local codes"
    return out


def _order_for(n: int, chain: Sequence[int]):
    return gamma_order(n, chain) if len(chain) else identity_order(n)


def chain_cost(code: CyclicCode, chain: Sequence[int]) -> ComplexityReport:
    """Viterbi cost of the minimal trellis under a chain's ordering, from the profile."""
    E, V = analytic_counts(dimension_profile(code, _order_for(code.n, chain)))
    return ComplexityReport(E, V, code.k)


def best_chain(code: CyclicCode) -> tuple[int, ...]:
    """Chain (or the identity order, ``()``) with the lowest Viterbi total."""
    options = [()] + [c.elements for c in enumerate_chains(code.n)]
    return min(options, key=lambda c: chain_cost(code, c).viterbi_total)


def report_trellis(code: CyclicCode, chain: Union[Sequence[int], str, None] = None,
                   build: bool = True) -> tuple[dict, Optional[object]]:
    """Trellis report and the built trellis (None when only analytic).

    ``chain='best'`` picks the cheapest chain. Edge and vertex counts come
    from the dimension profile; when the trellis fits the build limits it is
    also constructed and its counts cross-checked.
    """
    if chain == "best":
        chain = best_chain(code)
    chain = tuple(int(x) for x in (chain or ()))
    order = _order_for(code.n, chain)
    prof = dimension_profile(code, order)
    E, V = analytic_counts(prof)
    cost = ComplexityReport(E, V, code.k)
    out = {
        "n": code.n, "k": code.k, "chain": list(chain),
        "s": [int(v) for v in prof.s], "max_state": prof.max_state,
        **cost.to_json(),
    }
    if chain:
        ch = Chain(code.n, chain)
        pb = profile_upper_bound(code, ch)
        out["max_state_bound"] = max_state_bound(code, ch)
        out["profile_bound"] = [int(v) for v in pb.bound]
    trellis = None
    if build:
        try:
            trellis = build_trellis(code, order)
        except TrellisCapacityError as exc:
            out["analytic_only"] = True
            out["capacity_note"] = str(exc)
        else:
            out["analytic_only"] = False
            if (trellis.num_edges, trellis.num_vertices) != (E, V):
                raise AssertionError("built trellis disagrees with the analytic counts")
    else:
        out["analytic_only"] = True
    return out, trellis
