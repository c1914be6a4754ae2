"""Köthe matrices, sequence-space specs, seminorms, and the preset catalog.

A matrix descriptor must produce entries at arbitrary indices, so matrices
are closed-form families (constant, polynomial, half-line step, diagonal
rescale of another family) or tabulated windows with a declared tail rule.
Entries a(j, k) are nonnegative exact rationals, nondecreasing in the level
k, with every row eventually positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

import numpy as np

from .scalars import LogMagnitude, ZERO_LOG2, exact_from_json, exact_to_json, log2_exact

__all__ = [
    "KotheMatrix",
    "SpaceSpec",
    "SparseVector",
    "basis_vector",
    "constant_matrix",
    "halfline_matrix",
    "index_support",
    "parse_space",
    "power_matrix",
    "preset",
    "PRESET_NAMES",
    "scaled_matrix",
    "seminorm",
    "space_from_json",
    "space_to_json",
    "table_matrix",
]

_BILATERAL = "Z"
_UNILATERAL = "N"


class InvalidSpecError(ValueError):
    """Raised for malformed space/weight descriptors."""


@dataclass(frozen=True)
class KotheMatrix:
    """Closed-form or tabulated family a(j, k) of seminorm weights.

    family: one of 'constant', 'power', 'halfline', 'table', 'scaled',
    'callable'.  tail_tag is a structural attestation used by the
    finite-horizon checkers to decide whether window extrema extend to the
    index tails ('constant', 'polynomial', 'step', None for tabulated data
    with no rule).
    """

    family: str
    index_set: str = _BILATERAL
    params: dict = field(default_factory=dict)
    tail_tag: Optional[str] = None

    def _check_index(self, j: int) -> None:
        if self.index_set == _UNILATERAL and j < 1:
            raise IndexError(f"index {j} outside unilateral index set")

    def entry(self, j: int, k: int) -> Fraction:
        """Exact entry a(j, k); k >= 1."""
        if k < 1:
            raise ValueError("seminorm level k must be >= 1")
        self._check_index(j)
        fam = self.family
        if fam == "constant":
            return self.params["value"]
        if fam == "power":
            return Fraction((abs(j) + 1) ** k)
        if fam == "halfline":
            return Fraction(1) if j > -k else Fraction(0)
        if fam == "scaled":
            base: KotheMatrix = self.params["base"]
            diag: Callable[[int], Fraction] = self.params["diag"]
            return base.entry(j, k) * abs(diag(j))
        if fam == "callable":
            return Fraction(self.params["fn"](j, k))
        if fam == "table":
            rows: dict = self.params["rows"]
            lo, hi = self.params["lo"], self.params["hi"]
            tail = self.params.get("tail", "error")
            if lo <= j <= hi:
                return rows[j][min(k, len(rows[j])) - 1]
            if tail == "hold":
                edge = lo if j < lo else hi
                return rows[edge][min(k, len(rows[edge])) - 1]
            raise IndexError(f"matrix entry at j={j} outside tabulated window [{lo},{hi}]")
        raise InvalidSpecError(f"unknown matrix family {self.family!r}")

    def entry_log2(self, j: int, k: int) -> float:
        return log2_exact(self.entry(j, k))

    def log2_row(self, k: int, lo: int, hi: int) -> np.ndarray:
        """Vector of log2 a(j, k) for j in [lo, hi]; -inf marks zero entries.

        Unilateral matrices report -inf for j < 1 so that window sweeps can
        use a uniform indexing.
        """
        out = np.empty(hi - lo + 1, dtype=np.float64)
        for pos, j in enumerate(range(lo, hi + 1)):
            if self.index_set == _UNILATERAL and j < 1:
                out[pos] = ZERO_LOG2
            else:
                out[pos] = self.entry_log2(j, k)
        return out

    def to_json(self) -> dict:
        obj = {"family": self.family, "index_set": self.index_set}
        if self.family == "constant":
            obj["params"] = {"value": exact_to_json(self.params["value"])}
        elif self.family == "table":
            obj["params"] = {
                "lo": self.params["lo"],
                "hi": self.params["hi"],
                "tail": self.params.get("tail", "error"),
                "rows": {
                    str(j): [exact_to_json(v) for v in row]
                    for j, row in self.params["rows"].items()
                },
            }
        else:
            obj["params"] = {}
        return obj


def constant_matrix(value: Fraction | int = 1, index_set: str = _BILATERAL) -> KotheMatrix:
    return KotheMatrix("constant", index_set, {"value": Fraction(value)}, tail_tag="constant")


def power_matrix(index_set: str = _BILATERAL) -> KotheMatrix:
    """a(j, k) = (|j| + 1)**k, the rapidly-decreasing-sequences family."""
    return KotheMatrix("power", index_set, {}, tail_tag="polynomial")


def halfline_matrix() -> KotheMatrix:
    """a(j, k) = 1 for j > -k, else 0; rows fill in as the level grows."""
    return KotheMatrix("halfline", _BILATERAL, {}, tail_tag="step")


def table_matrix(rows: dict, lo: int, hi: int, tail: str = "error",
                 index_set: str = _BILATERAL) -> KotheMatrix:
    frozen = {int(j): tuple(Fraction(v) for v in vals) for j, vals in rows.items()}
    for j, vals in frozen.items():
        if any(v < 0 for v in vals):
            raise InvalidSpecError("matrix entries must be nonnegative")
        if any(vals[i] > vals[i + 1] for i in range(len(vals) - 1)):
            raise InvalidSpecError(f"row {j} not nondecreasing in the level")
        if all(v == 0 for v in vals):
            raise InvalidSpecError(f"row {j} has no positive entry")
    return KotheMatrix("table", index_set,
                       {"rows": frozen, "lo": lo, "hi": hi, "tail": tail},
                       tail_tag="hold" if tail == "hold" else None)


def scaled_matrix(base: KotheMatrix, diag: Callable[[int], Fraction], tag: str) -> KotheMatrix:
    """Diagonal rescale a'(j, k) = a(j, k) * |diag(j)| (conjugated spaces)."""
    return KotheMatrix("scaled", base.index_set, {"base": base, "diag": diag, "tag": tag},
                       tail_tag=None)


@dataclass(frozen=True)
class SpaceSpec:
    """A sequence space: matrix plus exponent p in {0} union [1, inf).

    p = 0 selects the weighted-sup seminorm, p >= 1 the weighted power sum.
    """

    matrix: KotheMatrix
    p: float = 0

    def __post_init__(self):
        if not (self.p == 0 or self.p >= 1):
            raise InvalidSpecError(f"exponent p must be 0 or >= 1, got {self.p}")

    @property
    def index_set(self) -> str:
        return self.matrix.index_set

    @property
    def bilateral(self) -> bool:
        return self.index_set == _BILATERAL


@dataclass(frozen=True)
class SparseVector:
    """Finitely supported vector: sorted (index, nonzero coefficient) pairs."""

    entries: tuple = ()

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[int, Fraction]]) -> "SparseVector":
        acc: dict[int, Fraction] = {}
        for j, c in pairs:
            c = Fraction(c)
            if c != 0:
                acc[j] = acc.get(j, Fraction(0)) + c
        cleaned = tuple(sorted((j, c) for j, c in acc.items() if c != 0))
        return SparseVector(cleaned)

    @property
    def support(self) -> tuple:
        return tuple(j for j, _ in self.entries)

    def coeff(self, j: int) -> Fraction:
        for jj, c in self.entries:
            if jj == j:
                return c
        return Fraction(0)

    def scale(self, c: Fraction) -> "SparseVector":
        c = Fraction(c)
        if c == 0:
            return SparseVector()
        return SparseVector(tuple((j, v * c) for j, v in self.entries))

    @property
    def is_zero(self) -> bool:
        return not self.entries


def basis_vector(j: int) -> SparseVector:
    return SparseVector(((j, Fraction(1)),))


def seminorm(x: SparseVector, k: int, space: SpaceSpec):
    """Seminorm of a sparse vector at level k.

    Exact (a Fraction) for p in {0, 1} and for single-support vectors at any
    exponent; otherwise a LogMagnitude computed in floating point.
    """
    if k < 1:
        raise ValueError("seminorm level k must be >= 1")
    terms = [(abs(c) * space.matrix.entry(j, k)) for j, c in x.entries]
    if not terms:
        return Fraction(0)
    if space.p == 0:
        return max(terms)
    if space.p == 1 or len(terms) == 1:
        if space.p == 1:
            return sum(terms, Fraction(0))
        # single coordinate: (|a x|^p)^(1/p) == |a x| exactly
        return terms[0]
    powed = [log2_exact(t) * space.p for t in terms if t != 0]
    if not powed:
        return Fraction(0)
    from . import _kernels

    total = _kernels.log2_magnitude_sum_list(powed)
    return LogMagnitude(total / space.p, False)


def index_support(space: SpaceSpec, k: int, window: tuple[int, int]) -> list[int]:
    """Indices j in [window] with a(j, k) != 0 (the level-k support set)."""
    lo, hi = window
    if space.index_set == _UNILATERAL:
        lo = max(lo, 1)
    return [j for j in range(lo, hi + 1) if space.matrix.entry(j, k) != 0]


PRESET_NAMES = ("c0_Z", "lp_Z", "c0_N", "lp_N", "s_Z", "halfline_Z")


def preset(name: str, p: float | None = None) -> SpaceSpec:
    """Preset catalog.

    c0_Z / c0_N: sup-norm spaces with unit matrix; lp_Z(p) / lp_N(p): power
    sum spaces with unit matrix; s_Z: rapidly decreasing sequences
    (a(j,k) = (|j|+1)**k, p = 1); halfline_Z: step matrix, any p.
    """
    if name == "c0_Z":
        return SpaceSpec(constant_matrix(1, _BILATERAL), 0)
    if name == "c0_N":
        return SpaceSpec(constant_matrix(1, _UNILATERAL), 0)
    if name == "lp_Z":
        return SpaceSpec(constant_matrix(1, _BILATERAL), 1 if p is None else p)
    if name == "lp_N":
        return SpaceSpec(constant_matrix(1, _UNILATERAL), 1 if p is None else p)
    if name == "s_Z":
        return SpaceSpec(power_matrix(_BILATERAL), 1)
    if name == "halfline_Z":
        return SpaceSpec(halfline_matrix(), 0 if p is None else p)
    raise InvalidSpecError(f"unknown preset {name!r} (known: {', '.join(PRESET_NAMES)})")


def parse_space(text: str) -> SpaceSpec:
    """Parse CLI shorthand like 'lp_Z:2', 's_Z', 'halfline_Z'."""
    name, _, arg = text.partition(":")
    p = None
    if arg:
        p = float(arg) if "." in arg else int(arg)
    return preset(name, p)


def space_to_json(space: SpaceSpec) -> dict:
    return {
        "family": space.matrix.family,
        "params": space.matrix.to_json().get("params", {}),
        "p": space.p,
        "index_set": space.index_set,
    }


def space_from_json(obj: dict) -> SpaceSpec:
    fam = obj["family"]
    index_set = obj.get("index_set", _BILATERAL)
    p = obj.get("p", 0)
    if fam == "constant":
        value = obj.get("params", {}).get("value")
        matrix = constant_matrix(exact_from_json(value) if value else 1, index_set)
    elif fam == "power":
        matrix = power_matrix(index_set)
    elif fam == "halfline":
        matrix = halfline_matrix()
    elif fam == "table":
        params = obj["params"]
        rows = {int(j): [exact_from_json(v) for v in row] for j, row in params["rows"].items()}
        matrix = table_matrix(rows, params["lo"], params["hi"], params.get("tail", "error"),
                              index_set)
    else:
        raise InvalidSpecError(f"unknown matrix family {fam!r} in space JSON")
    return SpaceSpec(matrix, p)
