"""Weighted shift operators, orbit norms, and structural transforms.

Basis action conventions (bilateral):

    backward:  B e_j = w_j e_{j-1}        (B x)_j = w_{j+1} x_{j+1}
    forward:   F e_j = w_j e_{j+1}        (F x)_j = w_{j-1} x_{j-1}

Unilateral spaces use indices 1, 2, 3, ...; the unilateral backward shift
kills e_1 and the unilateral forward shift has no inverse.  All weights are
ingested as magnitudes (positive exact rationals): every criterion downstream
depends only on |w| and on nonnegative matrix entries, so phases are dropped
at the door.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .scalars import exact_from_json, exact_to_json, log2_exact
from .spaces import InvalidSpecError, SparseVector, SpaceSpec, scaled_matrix

__all__ = [
    "ConjugacyWeights",
    "NotInvertibleError",
    "ShiftOperator",
    "UndefinedWeightError",
    "WeightSequence",
    "WitnessReport",
    "apply",
    "basis_orbit_log2",
    "basis_orbit_norm",
    "check_invertible",
    "check_operator_wellposed",
    "conjugate_to_unweighted",
    "constant_weights",
    "dual_form",
    "geometric_weights",
    "parse_weights",
    "table_weights",
    "weight_product",
    "weights_from_json",
    "weights_to_json",
]


class UndefinedWeightError(KeyError):
    """A weight was requested outside the sequence's defined range."""


class NotInvertibleError(ValueError):
    """Inverse application requested where no inverse exists."""


@dataclass(frozen=True)
class WeightSequence:
    """Nonzero weight magnitudes w(j), given by a closed-form descriptor.

    Families: 'constant', 'geometric' (coef * ratio**j, optionally over |j|),
    'table' (finite window, tail rule 'error' or 'hold'), 'blocks' (the
    synthesized block table), 'dual' (reciprocal reindex of a base sequence).
    """

    family: str
    params: dict = field(default_factory=dict)

    def value(self, j: int) -> Fraction:
        fam = self.family
        if fam == "constant":
            return self.params["value"]
        if fam == "geometric":
            e = abs(j) if self.params.get("abs_index") else j
            return self.params["coef"] * self.params["ratio"] ** e
        if fam == "table":
            table: dict = self.params["table"]
            if j in table:
                return table[j]
            if self.params.get("tail") == "hold":
                lo, hi = min(table), max(table)
                return table[lo if j < lo else hi]
            raise UndefinedWeightError(f"weight undefined at position {j}")
        if fam == "dual":
            base: WeightSequence = self.params["base"]
            return 1 / base.value(j + self.params["shift"])
        if fam == "blocks":
            table = self.params["table"]
            if j in table:
                return table[j]
            raise UndefinedWeightError(
                f"block weight table spans [{self.params['lo']}, {self.params['hi']}], got {j}")
        raise InvalidSpecError(f"unknown weight family {self.family!r}")

    def log2(self, j: int) -> float:
        return log2_exact(self.value(j))

    def log2_window(self, lo: int, hi: int) -> np.ndarray:
        return np.array([self.log2(j) for j in range(lo, hi + 1)], dtype=np.float64)

    def defined_range(self) -> Optional[tuple[int, int]]:
        """(lo, hi) for finite tables without a tail rule, None if unbounded."""
        if self.family in ("table", "blocks"):
            if self.params.get("tail") == "hold":
                return None
            table = self.params["table"]
            return (min(table), max(table))
        if self.family == "dual":
            base_range = self.params["base"].defined_range()
            if base_range is None:
                return None
            lo, hi = base_range
            s = self.params["shift"]
            return (lo - s, hi - s)
        return None

    @property
    def tail_tag(self) -> Optional[str]:
        if self.family == "constant":
            return "constant"
        if self.family == "dual":
            return self.params["base"].tail_tag
        return None


def _positive(value) -> Fraction:
    v = Fraction(value)
    if v == 0:
        raise InvalidSpecError("weights must be nonzero")
    return abs(v)


def constant_weights(value) -> WeightSequence:
    return WeightSequence("constant", {"value": _positive(value)})


def geometric_weights(coef, ratio, abs_index: bool = False) -> WeightSequence:
    return WeightSequence("geometric", {"coef": _positive(coef), "ratio": _positive(ratio),
                                        "abs_index": abs_index})


def table_weights(table: dict, tail: str = "error") -> WeightSequence:
    frozen = {int(j): _positive(v) for j, v in table.items()}
    if not frozen:
        raise InvalidSpecError("empty weight table")
    return WeightSequence("table", {"table": frozen, "tail": tail})


@dataclass(frozen=True)
class ShiftOperator:
    """direction 'backward' or 'forward', weight sequence, host space."""

    direction: str
    weights: WeightSequence
    space: SpaceSpec

    def __post_init__(self):
        if self.direction not in ("backward", "forward"):
            raise InvalidSpecError(f"direction must be backward/forward, got {self.direction!r}")

    @property
    def bilateral(self) -> bool:
        return self.space.bilateral

    @property
    def structurally_invertible(self) -> bool:
        # unilateral forward shifts miss e_1; unilateral backward shifts kill it
        return self.bilateral


def weight_product(w: WeightSequence, lo: int, hi: int) -> Fraction:
    """prod of w(j) over the integer interval [lo, hi]; empty product is 1."""
    if lo > hi:
        return Fraction(1)
    out = Fraction(1)
    for j in range(lo, hi + 1):
        out *= w.value(j)
    return out


def _orbit_target(op: ShiftOperator, j0: int, n: int) -> int:
    step = -1 if op.direction == "backward" else 1
    return j0 + step * n


def _orbit_product(op: ShiftOperator, j0: int, n: int) -> Fraction:
    """|coefficient| of T^n e_{j0} (n may be negative for invertible shifts)."""
    w = op.weights
    if n == 0:
        return Fraction(1)
    if op.direction == "backward":
        if n > 0:
            # B^n e_j = (w_j ... w_{j-n+1}) e_{j-n}
            return weight_product(w, j0 - n + 1, j0)
        # B^{-m} e_j = e_{j+m} / (w_{j+1} ... w_{j+m})
        return 1 / weight_product(w, j0 + 1, j0 - n)
    if n > 0:
        # F^n e_j = (w_j ... w_{j+n-1}) e_{j+n}
        return weight_product(w, j0, j0 + n - 1)
    # F^{-m} e_j = e_{j-m} / (w_{j-m} ... w_{j-1})
    return 1 / weight_product(w, j0 + n, j0 - 1)


def apply(op: ShiftOperator, x: SparseVector, n: int) -> SparseVector:
    """Exact image of x under the n-th power of the shift.

    Negative n applies the inverse; on unilateral spaces this raises
    NotInvertibleError whenever the orbit would need a missing coordinate
    (forward) or the operator has no inverse at all (backward).
    """
    if n == 0 or x.is_zero:
        return x
    unilateral = not op.bilateral
    if unilateral and n < 0 and op.direction == "backward":
        raise NotInvertibleError("unilateral backward shift has no inverse")
    pairs = []
    for j0, c in x.entries:
        target = _orbit_target(op, j0, n)
        if unilateral:
            if op.direction == "backward" and target < 1:
                # B e_1 = 0: coordinates shifted off the edge vanish
                continue
            if op.direction == "forward" and target < 1:
                raise NotInvertibleError(
                    f"inverse forward shift undefined: e_{j0} has no preimage at step {n}")
        pairs.append((target, c * _orbit_product(op, j0, n)))
    return SparseVector.from_pairs(pairs)


def basis_orbit_norm(op: ShiftOperator, j0: int, n: int, k: int) -> Fraction:
    """||T^n e_{j0}||_k via the single-coordinate closed form.

    Equals seminorm(apply(op, e_{j0}, n), k) exactly: a weight product times
    one matrix entry (basis-vector norms do not depend on the exponent p).
    """
    unilateral = not op.bilateral
    target = _orbit_target(op, j0, n)
    if unilateral:
        if op.direction == "backward":
            if n < 0:
                raise NotInvertibleError("unilateral backward shift has no inverse")
            if target < 1:
                return Fraction(0)
        if op.direction == "forward" and target < 1:
            raise NotInvertibleError("inverse forward orbit leaves the index set")
    return abs(_orbit_product(op, j0, n)) * op.space.matrix.entry(target, k)


def basis_orbit_log2(op: ShiftOperator, j0: int, n: int, k: int) -> float:
    return log2_exact(basis_orbit_norm(op, j0, n, k))


# ---------------------------------------------------------------------------
# well-posedness / invertibility window checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessReport:
    """Outcome of a window check for one of the four operator conditions.

    status: 'holds' needs a finite window-sup plus a tail attestation and a
    clean zero pattern; 'fails' records a definitive zero-pattern violation
    or a structural obstruction; 'inconclusive' carries window evidence only.
    """

    condition: str
    status: str
    k: int
    level: Optional[int] = None
    window_sup_log2: Optional[float] = None
    window_sup: Optional[str] = None
    attestation: Optional[str] = None
    sup_at_boundary: bool = False
    detail: str = ""

    @property
    def ok(self) -> Optional[bool]:
        return {"holds": True, "fails": False}.get(self.status)

    def to_json(self) -> dict:
        return {
            "condition": self.condition,
            "status": self.status,
            "k": self.k,
            "l": self.level,
            "window_sup_log2": self.window_sup_log2,
            "window_sup": self.window_sup,
            "attestation": self.attestation,
            "sup_at_boundary": self.sup_at_boundary,
            "detail": self.detail,
        }


def _ratio_terms(op: ShiftOperator, condition: str, k: int, level: int, window: int):
    """Exact (numerator, denominator) pairs over the window for one condition.

    backward defined:    a(j,k) |w(j+1)|   vs  a(j+1, l)
    backward invertible: a(j+1,k)          vs  a(j, l) |w(j+1)|
    forward defined:     a(j+1,k) |w(j)|   vs  a(j, l)
    forward invertible:  a(j,k)            vs  a(j+1, l) |w(j)|
    """
    m = op.space.matrix
    w = op.weights
    lo = 1 if not op.bilateral else -window
    pairs = []
    for j in range(lo, window + 1):
        try:
            if condition == "defined":
                if op.direction == "backward":
                    num, den = m.entry(j, k) * w.value(j + 1), m.entry(j + 1, level)
                else:
                    num, den = m.entry(j + 1, k) * w.value(j), m.entry(j, level)
            else:
                if op.direction == "backward":
                    num, den = m.entry(j + 1, k), m.entry(j, level) * w.value(j + 1)
                else:
                    num, den = m.entry(j, k), m.entry(j + 1, level) * w.value(j)
        except (UndefinedWeightError, IndexError):
            continue
        pairs.append((j, num, den))
    return pairs


def _tail_attestation(op: ShiftOperator) -> Optional[str]:
    """Structural reason the window-sup of a ratio extends to the tails."""
    mt = op.space.matrix.tail_tag
    wt = op.weights.tail_tag
    if wt != "constant":
        return None
    if mt == "constant":
        return "constant matrix rows and constant weights: ratio constant in j"
    if mt == "step":
        return "step matrix and constant weights: ratio eventually constant on each tail"
    if mt == "polynomial":
        return "polynomial matrix and constant weights: ratio monotone on each tail"
    return None


def _window_check(op: ShiftOperator, condition: str, k: int, cfg) -> WitnessReport:
    name = f"{op.direction}-{condition}"
    if condition == "invertible" and not op.bilateral:
        reason = ("unilateral forward shift has no inverse" if op.direction == "forward"
                  else "unilateral backward shift has nontrivial kernel")
        return WitnessReport(name, "fails", k, detail=reason)
    attestation = _tail_attestation(op)
    best_inconclusive: Optional[WitnessReport] = None
    for level in range(k, cfg.l_max + 1):
        pairs = _ratio_terms(op, condition, k, level, cfg.window)
        if not pairs:
            return WitnessReport(name, "inconclusive", k, detail="no weights on window")
        violation = next((j for j, num, den in pairs if den == 0 and num != 0), None)
        if violation is not None:
            # zero-pattern implication broken at this level; try the next one
            continue
        # 0/0 = 1 by convention
        ratios = [(j, Fraction(1) if num == 0 else num / den) for j, num, den in pairs]
        sup_j, sup = max(ratios, key=lambda t: t[1])
        at_boundary = sup_j in (pairs[0][0], pairs[-1][0])
        report = WitnessReport(
            name,
            "holds" if attestation else "inconclusive",
            k,
            level=level,
            window_sup_log2=log2_exact(sup),
            window_sup=str(sup),
            attestation=attestation,
            sup_at_boundary=at_boundary,
            detail="" if attestation else "finite window-sup but no tail attestation",
        )
        if attestation:
            return report
        if best_inconclusive is None:
            best_inconclusive = report
    if best_inconclusive is not None:
        return best_inconclusive
    return WitnessReport(
        name, "fails", k,
        detail=f"zero-pattern implication fails for every level <= {cfg.l_max} on the window")


def check_operator_wellposed(op: ShiftOperator, k: int, cfg) -> WitnessReport:
    """Search levels l in [k, l_max] for a finite sup certificate that the
    shift maps the space into itself; definitive only with an attested tail.
    """
    return _window_check(op, "defined", k, cfg)


def check_invertible(op: ShiftOperator, k: int, cfg) -> WitnessReport:
    """Mirror image of the well-posedness check, for the inverse."""
    return _window_check(op, "invertible", k, cfg)


# ---------------------------------------------------------------------------
# conjugacy to the unweighted shift, duality
# ---------------------------------------------------------------------------

class ConjugacyWeights:
    """The diagonal v with v_0 = 1, v_{-j} = w_{-j+1}...w_0, v_j = 1/(w_1...w_j).

    Satisfies v_{m} = v_{m+1} * w_{m+1}; values are cached as they are
    materialized outward from 0.
    """

    def __init__(self, w: WeightSequence):
        self._w = w
        self._cache: dict[int, Fraction] = {0: Fraction(1)}
        self._lo = 0
        self._hi = 0

    def value(self, j: int) -> Fraction:
        cache = self._cache
        while self._hi < j:
            nxt = self._hi + 1
            cache[nxt] = cache[self._hi] / self._w.value(nxt)
            self._hi = nxt
        while self._lo > j:
            nxt = self._lo - 1
            cache[nxt] = cache[self._lo] * self._w.value(self._lo)
            self._lo = nxt
        return cache[j]

    def __call__(self, j: int) -> Fraction:
        return self.value(j)


def conjugate_to_unweighted(op: ShiftOperator):
    """Transfer a bilateral backward shift to the unweighted shift.

    Returns (conjugated SpaceSpec, unweighted backward shift on it, v).  The
    new space carries seminorms ||x||'_k = ||(v_j x_j)_j||_k, so the orbit of
    any vector under the unweighted shift there matches the orbit of its
    diagonal image under the weighted shift, exactly.
    """
    if op.direction != "backward" or not op.bilateral:
        raise InvalidSpecError("conjugacy transfer is defined for bilateral backward shifts")
    v = ConjugacyWeights(op.weights)
    new_matrix = scaled_matrix(op.space.matrix, v, tag="conjugacy")
    new_space = SpaceSpec(new_matrix, op.space.p)
    unweighted = ShiftOperator("backward", constant_weights(1), new_space)
    return new_space, unweighted, v


def dual_form(op: ShiftOperator) -> ShiftOperator:
    """The inverse, represented as the opposite-direction shift.

    F_w^{-1} = B_{w'} with w'_j = 1/w_{j-1};  B_w^{-1} = F_{w'} with
    w'_j = 1/w_{j+1}.  apply(dual_form(op), x, n) == apply(op, x, -n).
    """
    if not op.structurally_invertible:
        raise NotInvertibleError("unilateral shifts have no dual inverse form")
    if op.direction == "backward":
        dual = WeightSequence("dual", {"base": op.weights, "shift": 1})
        return ShiftOperator("forward", dual, op.space)
    dual = WeightSequence("dual", {"base": op.weights, "shift": -1})
    return ShiftOperator("backward", dual, op.space)


# ---------------------------------------------------------------------------
# wire formats
# ---------------------------------------------------------------------------

def weights_to_json(w: WeightSequence) -> dict:
    if w.family == "constant":
        return {"family": "constant", "value": exact_to_json(w.params["value"])}
    if w.family == "geometric":
        return {"family": "geometric", "coef": exact_to_json(w.params["coef"]),
                "ratio": exact_to_json(w.params["ratio"]),
                "abs_index": bool(w.params.get("abs_index"))}
    if w.family == "table":
        return {"family": "table", "tail": w.params.get("tail", "error"),
                "table": {str(j): exact_to_json(v) for j, v in w.params["table"].items()}}
    if w.family == "blocks":
        return {"family": "blocks", "j_max": w.params["j_max"]}
    raise InvalidSpecError(f"cannot serialize weight family {w.family!r}")


def weights_from_json(obj: dict) -> WeightSequence:
    fam = obj["family"]
    if fam == "constant":
        return constant_weights(exact_from_json(obj["value"]))
    if fam == "geometric":
        return geometric_weights(exact_from_json(obj["coef"]), exact_from_json(obj["ratio"]),
                                 bool(obj.get("abs_index")))
    if fam == "table":
        return table_weights({int(j): exact_from_json(v) for j, v in obj["table"].items()},
                             obj.get("tail", "error"))
    if fam == "blocks":
        from .blocks import build_blocks

        return build_blocks(int(obj["j_max"])).weights
    raise InvalidSpecError(f"unknown weight family {fam!r}")


def parse_weights(text: str) -> WeightSequence:
    """CLI shorthand: 'constant:2', 'constant:1/2', 'geometric:1:2', 'blocks:4'."""
    parts = text.split(":")
    fam = parts[0]
    if fam == "constant":
        return constant_weights(Fraction(parts[1]))
    if fam == "geometric":
        coef, ratio = Fraction(parts[1]), Fraction(parts[2])
        abs_index = len(parts) > 3 and parts[3] == "abs"
        return geometric_weights(coef, ratio, abs_index)
    if fam == "blocks":
        from .blocks import build_blocks

        return build_blocks(int(parts[1])).weights
    raise InvalidSpecError(f"cannot parse weight shorthand {text!r}")
