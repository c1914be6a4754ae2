"""Finite-horizon certificate checkers for expansivity criteria.

The analytic statements all have the shape "some sup/limit is infinite".
At desk scale they become three-valued verdicts:

* certified-unbounded: every threshold of the run's grid was crossed within
  the horizon (first-crossing schedule recorded).  For window-infimum
  criteria a crossing only counts when the window value is a true infimum,
  which requires a structural tail attestation of the ratio profile plus an
  interior (not tail-edge) attainment check.
* bounded-witness: an explicit per-term bound on the window together with a
  tail attestation (term profile eventually nonincreasing or constant).
* inconclusive: window evidence only.

Enlarging the horizon or the window never revokes a certificate: crossings
are first crossings, and attested window values do not move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .scalars import ZERO_LOG2
from .spaces import InvalidSpecError
from .shifts import NotInvertibleError, ShiftOperator, WeightSequence, dual_form

__all__ = [
    "BranchEvidence",
    "Crossing",
    "CriterionTrace",
    "HierarchyReport",
    "HorizonConfig",
    "Verdict",
    "VerdictKind",
    "average_trace",
    "avg_expansive_backward",
    "avg_expansive_forward",
    "avg_pos_expansive",
    "default_m_grid",
    "window_infimum_trace",
    "expansive_basis_diagnostic",
    "hierarchy_audit",
    "mixing_check",
    "unif_expansive_backward",
    "unif_expansive_forward",
    "unif_pos_expansive",
]


def default_m_grid() -> tuple:
    return tuple(2 ** m for m in range(0, 21))


@dataclass(frozen=True)
class HorizonConfig:
    """Finite truncation of the quantifiers: horizon for n, index window for
    j, ascending threshold grid, seminorm level bounds."""

    n_max: int = 10_000
    window: int = 1_000
    m_grid: tuple = field(default_factory=default_m_grid)
    k_max: int = 3
    l_max: Optional[int] = None
    basis_window: int = 50

    def __post_init__(self):
        if self.n_max < 1 or self.window < 1 or self.k_max < 1:
            raise InvalidSpecError("n_max, window, k_max must all be >= 1")
        grid = tuple(self.m_grid)
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise InvalidSpecError("m_grid must be nonempty and strictly increasing")
        object.__setattr__(self, "m_grid", grid)
        if self.l_max is None:
            object.__setattr__(self, "l_max", self.k_max + 5)
        if self.l_max < self.k_max:
            raise InvalidSpecError("l_max must be >= k_max")

    def to_json(self) -> dict:
        return {"n_max": self.n_max, "window": self.window,
                "m_grid": list(self.m_grid), "k_max": self.k_max,
                "l_max": self.l_max, "basis_window": self.basis_window}


class VerdictKind(Enum):
    CERTIFIED_UNBOUNDED = "CertifiedUnbounded"
    BOUNDED_WITNESS = "BoundedWitness"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Crossing:
    threshold: float
    first_n: Optional[int]

    def to_json(self) -> dict:
        return {"M": self.threshold, "first_n": self.first_n}


@dataclass(frozen=True)
class BranchEvidence:
    """Outcome for one (k, level, branch) instance."""

    k: int
    level: Optional[int]
    label: str
    certified: bool
    crossings: tuple = ()
    bound_log2: Optional[float] = None
    attestation: Optional[str] = None
    n_eff: Optional[int] = None
    detail: str = ""

    def to_json(self) -> dict:
        return {"k": self.k, "l": self.level, "branch": self.label,
                "certified": self.certified,
                "crossings": [c.to_json() for c in self.crossings],
                "bound_log2": self.bound_log2, "attestation": self.attestation,
                "n_eff": self.n_eff, "detail": self.detail}


@dataclass(frozen=True)
class Verdict:
    criterion: str
    kind: VerdictKind
    branch: str = ""
    property_label: str = ""
    evidence: tuple = ()
    notes: tuple = ()
    config: Optional[HorizonConfig] = None

    @property
    def certified(self) -> bool:
        return self.kind is VerdictKind.CERTIFIED_UNBOUNDED

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "kind": self.kind.value,
            "branch": self.branch,
            "property": self.property_label,
            "evidence": [e.to_json() for e in self.evidence],
            "notes": list(self.notes),
            "config": self.config.to_json() if self.config else None,
        }


@dataclass(frozen=True)
class CriterionTrace:
    """Per-step values of an aggregate (running average or window infimum),
    held as base-2 logarithms of the nonnegative magnitudes; recomputable
    from orbit norms."""

    label: str
    values: tuple
    start_n: int = 1

    def value_log2(self, n: int) -> float:
        return self.values[n - self.start_n]


# ---------------------------------------------------------------------------
# shared pieces
# ---------------------------------------------------------------------------

# log-lane tie guard: exact boundary hits (average exactly equal to a dyadic
# threshold) accumulate ~1 ulp of drift in the streaming log sums; values
# this close to a threshold are treated as crossings
CROSS_EPS = 2.0 ** -30


def _grid_log2(m_grid: Sequence) -> list[float]:
    return [math.log2(float(m)) for m in m_grid]


def _first_crossings(values: np.ndarray, m_grid: Sequence,
                     usable: Optional[np.ndarray] = None):
    """First n (1-based) with values[n-1] >= log2(M), restricted to usable
    steps; certified when every threshold crosses."""
    crossings = []
    all_crossed = True
    for m, lm in zip(m_grid, _grid_log2(m_grid)):
        mask = values >= lm - CROSS_EPS
        if usable is not None:
            mask = mask & usable
        hit = np.nonzero(mask)[0]
        first = int(hit[0]) + 1 if hit.size else None
        crossings.append(Crossing(float(m), first))
        if first is None:
            all_crossed = False
    return tuple(crossings), all_crossed


def _weight_reach(w: WeightSequence) -> Optional[tuple[int, int]]:
    return w.defined_range()


def _clip_n(op: ShiftOperator, cfg: HorizonConfig, need_lo, need_hi) -> int:
    """Largest n <= n_max with the needed weight positions defined.

    need_lo(n)/need_hi(n) give the extreme positions touched at horizon n.
    """
    reach = _weight_reach(op.weights)
    n = cfg.n_max
    if reach is None:
        return n
    lo, hi = reach
    while n >= 1 and not (need_lo(n) >= lo and need_hi(n) <= hi):
        n -= 1
    if n < 1:
        raise InvalidSpecError("weight table too small for the requested horizon")
    return n


def _avg_term_logs(op: ShiftOperator, k: int, branch: str, n_eff: int) -> np.ndarray:
    """log2 of the branch term sequence, j = 1..n_eff.

    backward left:  a(-j, k) |w(-j+1) ... w(0)|
    backward right: a(j, k) / |w(1) ... w(j)|
    forward  left:  a(j, k) |w(0) ... w(j-1)|
    forward  right: a(-j, k) / |w(-j) ... w(-1)|
    unilateral-forward: a(j, k) |w(1) ... w(j-1)|, empty product at j = 1
    """
    m = op.space.matrix
    w = op.weights
    out = np.empty(n_eff, dtype=np.float64)
    acc = 0.0
    for j in range(1, n_eff + 1):
        if branch == "left" and op.direction == "backward":
            acc += w.log2(-j + 1)
            out[j - 1] = m.entry_log2(-j, k) + acc
        elif branch == "right" and op.direction == "backward":
            acc += w.log2(j)
            out[j - 1] = m.entry_log2(j, k) - acc
        elif branch == "left" and op.direction == "forward":
            acc += w.log2(j - 1)
            out[j - 1] = m.entry_log2(j, k) + acc
        elif branch == "right" and op.direction == "forward":
            acc += w.log2(-j)
            out[j - 1] = m.entry_log2(-j, k) - acc
        elif branch == "unilateral":
            if j >= 2:
                acc += w.log2(j - 1)
            out[j - 1] = m.entry_log2(j, k) + acc
        else:
            raise ValueError(f"unknown branch {branch!r}")
    return out


_AVG_ATTESTABLE_PAIRS = {("constant", "constant"), ("step", "constant"),
                         ("polynomial", "constant"), ("hold", "constant")}


def _avg_bound_attestation(op: ShiftOperator, terms: np.ndarray) -> Optional[tuple[float, str]]:
    """Per-term bound plus tail attestation, when the family pair supports one.

    The structural gate requires a closed-form matrix tail and constant
    weights; the numeric gate requires the term maximum to sit at the start
    (nonincreasing profile) or strictly inside the window (unimodal peak).
    """
    pair = (op.space.matrix.tail_tag, op.weights.tail_tag)
    if pair not in _AVG_ATTESTABLE_PAIRS:
        return None
    if terms.size == 0:
        return None
    arg = int(np.argmax(terms))
    if arg == terms.size - 1:
        return None  # still growing at the window edge
    profile = "nonincreasing term profile" if arg == 0 else "unimodal term profile"
    return float(terms[arg]), f"{profile} ({pair[0]} matrix, {pair[1]} weights)"


def _avg_n_eff(op: ShiftOperator, cfg: HorizonConfig) -> int:
    if op.direction == "backward":
        return _clip_n(op, cfg, lambda n: -n + 1, lambda n: n)
    return _clip_n(op, cfg, lambda n: -n, lambda n: n - 1)


def _avg_branch_evidence(op: ShiftOperator, k: int, branch: str,
                         cfg: HorizonConfig, n_eff: int) -> BranchEvidence:
    terms = _avg_term_logs(op, k, branch, n_eff)
    averages = _kernels.running_log2_average(terms)
    crossings, certified = _first_crossings(averages, cfg.m_grid)
    bound = _avg_bound_attestation(op, terms)
    return BranchEvidence(
        k=k, level=k, label=branch, certified=certified, crossings=crossings,
        bound_log2=None if bound is None else bound[0],
        attestation=None if bound is None else bound[1],
        n_eff=n_eff)


def _avg_verdict(op: ShiftOperator, cfg: HorizonConfig, criterion: str) -> Verdict:
    n_eff = _avg_n_eff(op, cfg)
    evidence = []
    left_cert = right_cert = False
    all_bounded = True
    for k in range(1, cfg.k_max + 1):
        for branch in ("left", "right"):  # left branch examined first
            ev = _avg_branch_evidence(op, k, branch, cfg, n_eff)
            evidence.append(ev)
            if ev.certified:
                left_cert = left_cert or branch == "left"
                right_cert = right_cert or branch == "right"
            if ev.attestation is None:
                all_bounded = False
    if left_cert or right_cert:
        kind = VerdictKind.CERTIFIED_UNBOUNDED
        branch = {(True, True): "both", (True, False): "left", (False, True): "right"}[
            (left_cert, right_cert)]
    elif all_bounded:
        kind, branch = VerdictKind.BOUNDED_WITNESS, "none"
    else:
        kind, branch = VerdictKind.INCONCLUSIVE, "none"
    return Verdict(criterion, kind, branch=branch, evidence=tuple(evidence), config=cfg)


def average_trace(op: ShiftOperator, k: int, branch: str, cfg: HorizonConfig) -> CriterionTrace:
    """Running Cesàro averages of one branch's term sequence (log2 values)."""
    n_eff = _avg_n_eff(op, cfg)
    averages = _kernels.running_log2_average(_avg_term_logs(op, k, branch, n_eff))
    return CriterionTrace(f"avg:{op.direction}:{branch}:k={k}", tuple(averages.tolist()))


def window_infimum_trace(op: ShiftOperator, k: int, level: int, split: str, form: str,
                         cfg: HorizonConfig) -> CriterionTrace:
    """Window-infimum curve of one uniform-expansivity ratio (log2 values)."""
    n_eff = _ue_n_eff(op, cfg)
    curve, _ = _ue_curve(op, k, level, split, form, cfg, n_eff)
    return CriterionTrace(f"inf:{form}:{split}:k={k},l={level}", tuple(curve.tolist()))


def avg_expansive_backward(op: ShiftOperator, cfg: HorizonConfig) -> Verdict:
    """Running averages of a(-j,k)|w(-j+1)...w(0)| (left) and of
    a(j,k)/|w(1)...w(j)| (right): divergence of either branch at any level
    certifies average expansivity of a bilateral backward shift."""
    if op.direction != "backward" or not op.bilateral:
        raise InvalidSpecError("avg_expansive_backward needs a bilateral backward shift")
    return _avg_verdict(op, cfg, "avg-expansive")


def avg_expansive_forward(op: ShiftOperator, cfg: HorizonConfig) -> Verdict:
    """Forward-shift analogue: left terms a(j,k)|w(0)...w(j-1)|, right terms
    a(-j,k)/|w(-j)...w(-1)|."""
    if op.direction != "forward" or not op.bilateral:
        raise InvalidSpecError("avg_expansive_forward needs a bilateral forward shift")
    return _avg_verdict(op, cfg, "avg-expansive")


def avg_pos_expansive(op: ShiftOperator, cfg: HorizonConfig, side: str = "op") -> Verdict:
    """One-sided averages: the left branch certifies the operator itself,
    the right branch its inverse.  Unilateral forward shifts use the
    convention |w(1)...w(j-1)| = 1 at j = 1; unilateral backward shifts are
    never positively expansive (the first basis vector dies)."""
    if side not in ("op", "inverse"):
        raise InvalidSpecError("side must be 'op' or 'inverse'")
    if not op.bilateral:
        if op.direction == "backward":
            return Verdict("avg-pos-expansive", VerdictKind.BOUNDED_WITNESS, branch="none",
                           notes=("unilateral backward shift: orbit of e_1 is eventually zero",),
                           config=cfg)
        if side == "inverse":
            raise NotInvertibleError("unilateral forward shift has no inverse")
        n_eff = _clip_n(op, cfg, lambda n: 1, lambda n: n - 1)
        ev = _avg_branch_evidence(op, 1, "unilateral", cfg, n_eff)
        evidence = [ev]
        certified = ev.certified
        bounded = ev.attestation is not None
        for k in range(2, cfg.k_max + 1):
            ev_k = _avg_branch_evidence(op, k, "unilateral", cfg, n_eff)
            evidence.append(ev_k)
            certified = certified or ev_k.certified
            bounded = bounded and ev_k.attestation is not None
        kind = (VerdictKind.CERTIFIED_UNBOUNDED if certified
                else VerdictKind.BOUNDED_WITNESS if bounded else VerdictKind.INCONCLUSIVE)
        return Verdict("avg-pos-expansive", kind, branch="unilateral",
                       evidence=tuple(evidence), config=cfg)
    branch = "left" if side == "op" else "right"
    n_eff = _avg_n_eff(op, cfg)
    evidence = [_avg_branch_evidence(op, k, branch, cfg, n_eff)
                for k in range(1, cfg.k_max + 1)]
    certified = any(ev.certified for ev in evidence)
    bounded = all(ev.attestation is not None for ev in evidence)
    kind = (VerdictKind.CERTIFIED_UNBOUNDED if certified
            else VerdictKind.BOUNDED_WITNESS if bounded else VerdictKind.INCONCLUSIVE)
    return Verdict("avg-pos-expansive", kind, branch=branch,
                   evidence=tuple(evidence), config=cfg)


# ---------------------------------------------------------------------------
# uniform expansivity: window-infimum curves
# ---------------------------------------------------------------------------

_UE_ATTESTABLE_PAIRS = {
    ("constant", "constant"): "constant ratio profile in j",
    ("step", "constant"): "ratio profile constant on the support",
    ("polynomial", "constant"): "ratio profile unimodal in j on each half-line",
}


def _ue_attestation(op: ShiftOperator) -> Optional[str]:
    return _UE_ATTESTABLE_PAIRS.get((op.space.matrix.tail_tag, op.weights.tail_tag))


def _split_window(op: ShiftOperator, k: int, split: str, cfg: HorizonConfig):
    """(lo, hi, tail_edges) of the j-window for one split of the support."""
    w = cfg.window
    if not op.bilateral:
        return 1, w, ("hi",)
    if split == "Z":
        return -w, w, ("lo", "hi")
    if split == "N":
        return 1, w, ("hi",)
    if split == "-N":
        return -w, -1, ("lo",)
    raise ValueError(split)


def _ue_curve(op: ShiftOperator, k: int, level: int, split: str, form: str,
              cfg: HorizonConfig, n_eff: int):
    """Window-infimum curve for the A-form or B-form ratio on one split.

    A-form: inf_j a(j+n, l) |w(j) ... w(j+n-1)| / a(j, k)
    B-form: inf_j a(j-n, l) / (a(j, k) |w(j-n) ... w(j-1)|)

    Returns (curve, usable) where usable marks steps at which removing the
    tail-edge candidates does not change the infimum (the window value is
    then a true infimum for attested ratio profiles).
    """
    m = op.space.matrix
    w = op.weights
    lo, hi, tail_edges = _split_window(op, k, split, cfg)
    width = hi - lo + 1

    if form == "A":
        ext_lo, ext_hi = lo, hi + n_eff
    else:
        ext_lo, ext_hi = lo - n_eff, hi

    wlogs = w.log2_window(min(ext_lo, lo) - 1, max(ext_hi, hi) + 1)
    base = min(ext_lo, lo) - 1
    prefix = np.concatenate(([0.0], np.cumsum(wlogs)))
    # product |w(a) ... w(b)| has log prefix[b - base + 1] - prefix[a - base]

    la_level = m.log2_row(level, ext_lo, ext_hi)
    la_k = m.log2_row(k, lo, hi)
    valid = np.array([la != ZERO_LOG2 for la in la_k], dtype=bool)

    idx = np.arange(ext_lo, ext_hi + 1)
    pf_at = prefix[idx - base]  # log-prefix ending just before each index
    if form == "A":
        g = la_level + pf_at                      # g[i] = la_l(i) + P(i)
        h = la_k + prefix[np.arange(lo, hi + 1) - base]
        # value(j, n) = g[j+n] - h[j]
        g_arr, h_arr = g, h
    else:
        # value(j, n) = (la_l(j-n) + P(j-n)) - (la_k(j) + P(j)); reverse the
        # index direction so the kernel's g[j + n] convention applies
        g = la_level + pf_at
        h = la_k + prefix[np.arange(lo, hi + 1) - base]
        g_arr = g[::-1].copy()
        h_arr = h[::-1].copy()
        valid = valid[::-1].copy()

    if not valid.any():
        curve = np.full(n_eff, np.inf)
        return curve, np.ones(n_eff, dtype=bool)

    curve, _ = _kernels.window_inf_curve(g_arr, h_arr, valid, n_eff)

    # tail-edge sensitivity: drop the outermost valid candidate on each tail
    trimmed = valid.copy()
    edges = tail_edges if form == "A" else tuple(
        {"lo": "hi", "hi": "lo"}[e] for e in tail_edges)
    nz = np.nonzero(trimmed)[0]
    for edge in edges:
        if nz.size:
            trimmed[nz[0] if edge == "lo" else nz[-1]] = False
    nz2 = np.nonzero(trimmed)[0]
    if nz2.size == 0:
        usable = np.zeros(n_eff, dtype=bool)
    else:
        curve2, _ = _kernels.window_inf_curve(g_arr, h_arr, trimmed, n_eff)
        usable = curve2 == curve
    return curve, usable


def _ue_n_eff(op: ShiftOperator, cfg: HorizonConfig) -> int:
    reach = op.weights.defined_range()
    if reach is None:
        return cfg.n_max
    lo, hi = reach
    room = min(abs(lo), abs(hi)) - cfg.window - 2
    if room < 1:
        raise InvalidSpecError("weight table too small for the window; shrink cfg.window")
    return min(cfg.n_max, room)


def _ue_property_for_k(op: ShiftOperator, k: int, prop: str, cfg: HorizonConfig,
                       n_eff: int, attestation: Optional[str]):
    """Search levels for one property at one k; smallest succeeding level."""
    parts = {"A": (("Z", "A"),), "B": (("Z", "B"),),
             "C": (("N", "A"), ("-N", "B"))}[prop]
    if not op.bilateral:
        parts = {"A": (("N", "A"),)}.get(prop, ())
        if not parts:
            return None
    for level in range(k, cfg.l_max + 1):
        all_crossings = []
        ok = True
        for split, form in parts:
            curve, usable = _ue_curve(op, k, level, split, form, cfg, n_eff)
            crossings, certified = _first_crossings(curve, cfg.m_grid, usable)
            all_crossings.append((split, crossings))
            if not (certified and attestation is not None):
                ok = False
                break
        if ok:
            return level, all_crossings
    return None


def _ue_forward_properties(op: ShiftOperator, cfg: HorizonConfig):
    attestation = _ue_attestation(op)
    n_eff = _ue_n_eff(op, cfg)
    holders = []
    evidence = []
    for prop in ("A", "B", "C"):
        per_k = []
        holds = True
        for k in range(1, cfg.k_max + 1):
            found = _ue_property_for_k(op, k, prop, cfg, n_eff, attestation)
            if found is None:
                holds = False
                per_k.append(BranchEvidence(k=k, level=None, label=prop, certified=False,
                                            attestation=attestation, n_eff=n_eff))
                break
            level, split_crossings = found
            for split, crossings in split_crossings:
                per_k.append(BranchEvidence(
                    k=k, level=level, label=f"{prop}:{split}", certified=True,
                    crossings=crossings, attestation=attestation, n_eff=n_eff))
        evidence.extend(per_k)
        if holds:
            holders.append(prop)
    if len(holders) > 1:
        raise AssertionError(f"mutually exclusive properties both certified: {holders}")
    return holders[0] if holders else "none", tuple(evidence), attestation


def unif_expansive_forward(op: ShiftOperator, cfg: HorizonConfig):
    """Certify one of the three uniform-expansivity regimes of a bilateral
    forward shift: (A) forward products beat every level uniformly, (B) the
    inverse products do, (C) each half-line handles one direction."""
    if op.direction != "forward" or not op.bilateral:
        raise InvalidSpecError("unif_expansive_forward needs a bilateral forward shift")
    prop, evidence, attestation = _ue_forward_properties(op, cfg)
    kind = VerdictKind.CERTIFIED_UNBOUNDED if prop != "none" else (
        VerdictKind.INCONCLUSIVE)
    verdict = Verdict("unif-expansive", kind, property_label=prop,
                      evidence=evidence, config=cfg,
                      notes=() if attestation else
                      ("no ratio-profile attestation for this weight family; "
                       "certificates unavailable, window evidence only",))
    return prop, verdict


_BACKWARD_PROPERTY = {"A": "b", "B": "a", "C": "c", "none": "none"}


def unif_expansive_backward(op: ShiftOperator, cfg: HorizonConfig):
    """Delegates to the forward checker on the inverse's opposite-direction
    form and maps the certified regime; regime (a) additionally means the
    backward shift is uniformly positively expansive."""
    if op.direction != "backward" or not op.bilateral:
        raise InvalidSpecError("unif_expansive_backward needs a bilateral backward shift")
    fwd_prop, verdict = unif_expansive_forward(dual_form(op), cfg)
    prop = _BACKWARD_PROPERTY[fwd_prop]
    notes = verdict.notes
    if prop == "a":
        notes = notes + ("regime (a): uniformly positively expansive",)
    mapped = Verdict("unif-expansive", verdict.kind, property_label=prop,
                     evidence=verdict.evidence, notes=notes, config=cfg)
    return prop, mapped


def unif_pos_expansive(op: ShiftOperator, cfg: HorizonConfig) -> Verdict:
    """Uniform positive expansivity: regime (A) alone for forward shifts
    (bilateral or unilateral), regime (a) for bilateral backward shifts."""
    if op.direction == "forward":
        attestation = _ue_attestation(op)
        n_eff = _ue_n_eff(op, cfg)
        evidence = []
        holds = True
        for k in range(1, cfg.k_max + 1):
            found = _ue_property_for_k(op, k, "A", cfg, n_eff, attestation)
            if found is None:
                holds = False
                evidence.append(BranchEvidence(k=k, level=None, label="A", certified=False,
                                               attestation=attestation, n_eff=n_eff))
                break
            level, split_crossings = found
            for split, crossings in split_crossings:
                evidence.append(BranchEvidence(k=k, level=level, label=f"A:{split}",
                                               certified=True, crossings=crossings,
                                               attestation=attestation, n_eff=n_eff))
        kind = VerdictKind.CERTIFIED_UNBOUNDED if holds else VerdictKind.INCONCLUSIVE
        return Verdict("unif-pos-expansive", kind, property_label="A" if holds else "none",
                       evidence=tuple(evidence), config=cfg)
    if not op.bilateral:
        return Verdict("unif-pos-expansive", VerdictKind.BOUNDED_WITNESS,
                       property_label="none",
                       notes=("unilateral backward shifts are never positively expansive",),
                       config=cfg)
    prop, verdict = unif_expansive_backward(op, cfg)
    holds = prop == "a"
    return Verdict("unif-pos-expansive",
                   VerdictKind.CERTIFIED_UNBOUNDED if holds else VerdictKind.INCONCLUSIVE,
                   property_label="a" if holds else "none",
                   evidence=verdict.evidence, config=cfg)


# ---------------------------------------------------------------------------
# basis expansivity diagnostic, mixing exclusion, hierarchy
# ---------------------------------------------------------------------------

def _orbit_log_curves(op: ShiftOperator, j0: int, k: int, n_eff: int):
    """(entry0, pos, neg): log2 orbit norms ||T^n e_{j0}||_k at n = 0, at
    n = 1..n_eff, and at n = -1..-n_eff; neg is None without an inverse.
    Off-lattice targets of a unilateral backward shift give -inf (zero
    vector) through the matrix row."""
    m = op.space.matrix
    w = op.weights
    step = -1 if op.direction == "backward" else 1
    lo, hi = j0 - n_eff - 1, j0 + n_eff + 1
    prefix = np.concatenate(([0.0], np.cumsum(w.log2_window(lo, hi))))
    # log2 |w(a) ... w(b)| = prefix[b - lo + 1] - prefix[a - lo]
    row = m.log2_row(k, lo, hi)
    ns = np.arange(1, n_eff + 1)

    tgt_pos = j0 + step * ns
    if op.direction == "backward":
        p_pos = prefix[j0 - lo + 1] - prefix[(j0 - ns + 1) - lo]
    else:
        p_pos = prefix[(j0 + ns - 1) - lo + 1] - prefix[j0 - lo]
    pos = p_pos + row[tgt_pos - lo]
    entry0 = float(row[j0 - lo])
    if not op.structurally_invertible:
        return entry0, pos, None
    tgt_neg = j0 - step * ns
    if op.direction == "backward":
        p_neg = -(prefix[(j0 + ns) - lo + 1] - prefix[(j0 + 1) - lo])
    else:
        p_neg = -(prefix[(j0 - 1) - lo + 1] - prefix[(j0 - ns) - lo])
    neg = p_neg + row[tgt_neg - lo]
    return entry0, pos, neg


def expansive_basis_diagnostic(op: ShiftOperator, cfg: HorizonConfig) -> Verdict:
    """DIAGNOSTIC: necessary evidence only.  For each basis index in the
    window, does some level's two-sided orbit-norm sup cross the whole grid?
    The full expansivity condition quantifies over all vectors; basis orbits
    are the computable shadow."""
    reach = op.weights.defined_range()
    n_eff = cfg.n_max
    if reach is not None:
        room = min(abs(reach[0]), abs(reach[1])) - cfg.basis_window - 2
        if room < 1:
            raise InvalidSpecError("weight table too small for basis_window")
        n_eff = min(n_eff, room)
    j_lo = 1 if not op.bilateral else -cfg.basis_window
    one_sided = not op.structurally_invertible
    evidence = []
    all_certified = True
    all_bounded = True
    pair_ok = (op.space.matrix.tail_tag, op.weights.tail_tag) in _AVG_ATTESTABLE_PAIRS
    for j0 in range(j_lo, cfg.basis_window + 1):
        best: Optional[BranchEvidence] = None
        for k in range(1, cfg.k_max + 1):
            entry0, pos, neg = _orbit_log_curves(op, j0, k, n_eff)
            # outward running sup over n = 0, +-1, +-2, ...
            two_sided = pos if neg is None else np.maximum(pos, neg)
            sup = np.maximum.accumulate(np.concatenate(([entry0], two_sided)))
            crossings, certified = _first_crossings(sup, cfg.m_grid)
            ev = BranchEvidence(k=k, level=k, label=f"e_{j0}", certified=certified,
                                crossings=crossings, n_eff=n_eff)
            if certified:
                best = ev
                break
            combined = sup[-1]
            if pair_ok:
                ev = BranchEvidence(k=k, level=k, label=f"e_{j0}", certified=False,
                                    crossings=crossings, bound_log2=float(combined),
                                    attestation="orbit norms attested monotone beyond window",
                                    n_eff=n_eff)
            best = ev
        evidence.append(best)
        if not best.certified:
            all_certified = False
            if best.attestation is None:
                all_bounded = False
    kind = (VerdictKind.CERTIFIED_UNBOUNDED if all_certified
            else VerdictKind.BOUNDED_WITNESS if all_bounded else VerdictKind.INCONCLUSIVE)
    notes = ("diagnostic: basis orbits only; the underlying condition quantifies over all vectors",)
    if one_sided:
        notes = notes + ("one-sided orbit only: operator has no inverse",)
    return Verdict("expansive-basis-diagnostic", kind, evidence=tuple(evidence),
                   notes=notes, config=cfg)


def _null_certification(terms: np.ndarray, attested: bool, tau_grid: Sequence[float]):
    """Certify terms -> 0: for each tau the terms must sit at or below tau from
    some index onward through the window, with an attested tail profile."""
    results = []
    certified = attested
    for tau in tau_grid:
        lt = math.log2(tau)
        above = np.nonzero(terms > lt + CROSS_EPS)[0]
        settle = int(above[-1]) + 2 if above.size else 1
        ok = settle <= terms.size  # settles within the window
        results.append({"tau": tau, "settle_n": settle if ok else None})
        certified = certified and ok
    return certified, results


def mixing_check(op: ShiftOperator, cfg: HorizonConfig,
                 tau_grid: Optional[Sequence[float]] = None) -> Verdict:
    """Topological-mixing surrogate for bilateral backward shifts: both term
    sequences a(-j,k)|w(-j+1)...w(0)| and a(j,k)/|w(1)...w(j)| must be
    certified null at every level.  On any average-expansivity certificate
    some branch terms diverge in average, so this must not certify: the
    exclusion is asserted by the hierarchy tests."""
    if op.direction != "backward" or not op.bilateral:
        raise InvalidSpecError("mixing_check needs a bilateral backward shift")
    if tau_grid is None:
        tau_grid = [2.0 ** (-m) for m in range(0, 11)]
    n_eff = _avg_n_eff(op, cfg)
    evidence = []
    mixing = True
    definitive_not = False
    for k in range(1, cfg.k_max + 1):
        for branch in ("left", "right"):
            terms = _avg_term_logs(op, k, branch, n_eff)
            attested = _avg_bound_attestation(op, terms) is not None
            certified, settle = _null_certification(terms, attested, tau_grid)
            crossings, unbounded = _first_crossings(terms, cfg.m_grid)
            evidence.append(BranchEvidence(
                k=k, level=k, label=f"null:{branch}", certified=certified,
                crossings=crossings, n_eff=n_eff,
                attestation="tail attested" if attested else None,
                detail=f"settle={settle[-1]['settle_n']}"))
            if not certified:
                mixing = False
            if unbounded:
                definitive_not = True
    if mixing:
        kind, label = VerdictKind.BOUNDED_WITNESS, "mixing"
    elif definitive_not:
        kind, label = VerdictKind.CERTIFIED_UNBOUNDED, "not-mixing"
    else:
        kind, label = VerdictKind.INCONCLUSIVE, "not-certified"
    return Verdict("mixing", kind, property_label=label, evidence=tuple(evidence),
                   config=cfg)


@dataclass(frozen=True)
class HierarchyReport:
    """One-directional implication audit: uniform => average => basis orbits."""

    ue_property: str
    ue: Verdict
    ae: Verdict
    e_diag: Verdict
    consistent: bool
    violations: tuple

    def to_json(self) -> dict:
        return {"ue_property": self.ue_property, "ue": self.ue.to_json(),
                "ae": self.ae.to_json(), "e_diag": self.e_diag.to_json(),
                "consistent": self.consistent, "violations": list(self.violations)}


def hierarchy_audit(op: ShiftOperator, cfg: HorizonConfig) -> HierarchyReport:
    """Runs the uniform, average, and basis-diagnostic checks with one shared
    config and asserts the implication chain is never inverted."""
    if op.direction == "backward":
        prop, ue = unif_expansive_backward(op, cfg)
        ae = avg_expansive_backward(op, cfg)
    else:
        prop, ue = unif_expansive_forward(op, cfg)
        ae = avg_expansive_forward(op, cfg)
    ed = expansive_basis_diagnostic(op, cfg)
    violations = []
    if ue.certified and not ae.certified:
        violations.append("uniform certified but average not certified")
    if ae.certified and not ed.certified:
        violations.append("average certified but basis diagnostic not certified")
    return HierarchyReport(prop, ue, ae, ed, not violations, tuple(violations))
