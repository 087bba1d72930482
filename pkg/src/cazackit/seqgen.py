"""Prime-length Bjorck and Zadoff-Chu sequences, cyclic shifts, and sequence sets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .numtheory import is_prime, legendre

FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class ComplexSequence:
    """Immutable complex sample vector with family and provenance metadata."""

    samples: np.ndarray
    family: str = "Raw"
    provenance: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.complex128)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def length(self) -> int:
        return self.samples.size

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class SequenceSet:
    """Ordered equal-length sequence columns plus their shift/root assignment."""

    columns: tuple[ComplexSequence, ...]
    kind: str  # "CyclicShift" | "RootIndex"
    assignment: tuple[tuple[int, ...], ...]
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "assignment", tuple(self.assignment))
        if self.kind not in ("CyclicShift", "RootIndex"):
            raise ValueError(f"unknown set kind {self.kind!r}")
        lengths = {c.length for c in self.columns}
        if len(lengths) > 1:
            raise ValueError("all columns must have equal length")
        if len(self.assignment) != len(self.columns):
            raise ValueError("assignment must have one record per column")

    @property
    def n_columns(self) -> int:
        return len(self.columns)

    @property
    def length(self) -> int:
        return self.columns[0].length if self.columns else 0

    def to_matrix(self) -> np.ndarray:
        """Columns stacked into an (length, n_columns) array."""
        return np.stack([c.samples for c in self.columns], axis=1)


def bjorck(q: int) -> ComplexSequence:
    """Length-q Bjorck sequence with Legendre-symbol phases.

    For q = 1 (mod 4) the phase of sample m is (m/q)*arccos(1/(1+sqrt(q)));
    for q = 3 (mod 4) it is arccos((1-q)/(1+q)) on non-residues and 0 elsewhere.
    """
    if q == 2 or not is_prime(q):
        raise ValueError(f"q must be an odd prime, got {q}")
    chi = np.array([legendre(m, q) for m in range(q)], dtype=float)
    if q % 4 == 1:
        theta = chi * math.acos(1.0 / (1.0 + math.sqrt(q)))
    else:
        theta = np.where(chi == -1, math.acos((1.0 - q) / (1.0 + q)), 0.0)
    return ComplexSequence(np.exp(1j * theta), "Bjorck", {"q": q, "shift": 0})


def zc(u: int, q: int) -> ComplexSequence:
    """Zadoff-Chu sequence x_u[m] = exp(-j*pi*u*m*(m+1)/q) for odd prime q."""
    if q == 2 or not is_prime(q):
        raise ValueError(f"q must be an odd prime, got {q}")
    if not 1 <= u <= q - 1:
        raise ValueError(f"root index must be in [1, {q - 1}], got {u}")
    m = np.arange(q, dtype=np.int64)
    # m(m+1) reduced mod 2q keeps the phase argument small and exact.
    phase = -np.pi * u * ((m * (m + 1)) % (2 * q)) / q
    return ComplexSequence(np.exp(1j * phase), "ZC", {"q": q, "root": u, "shift": 0})


def cyclic_shift(s: ComplexSequence, l: int) -> ComplexSequence:
    """Cyclic rotation: output[m] = s[(m - l) mod length]."""
    n = s.length
    shifted = np.roll(s.samples, l % n if n else 0)
    prov = dict(s.provenance)
    prov["shift"] = (prov.get("shift", 0) + l) % n if n else 0
    return ComplexSequence(shifted, s.family, prov)


def circulant_set(base: ComplexSequence) -> SequenceSet:
    """All cyclic shifts of a prime-length base sequence (a circulant matrix)."""
    q = base.length
    if not is_prime(q):
        raise ValueError(f"base length must be prime, got {q}")
    cols = [cyclic_shift(base, l) for l in range(q)]
    return SequenceSet(
        tuple(cols), "CyclicShift", tuple((l,) for l in range(q)),
        meta={"q": q, "family": base.family},
    )


def root_set(q: int, family: str = "ZC") -> SequenceSet:
    """The q-1 distinct-root ZC sequences of length q."""
    if family != "ZC":
        raise ValueError(f"root-index sets are only defined for ZC, got {family!r}")
    cols = [zc(u, q) for u in range(1, q)]
    return SequenceSet(
        tuple(cols), "RootIndex", tuple((u,) for u in range(1, q)),
        meta={"q": q, "family": "ZC"},
    )


def write_sequence_csv(seq: ComplexSequence, path) -> None:
    """CSV export: header index,re,im; deterministic 17-significant-digit floats."""
    with open(path, "w") as f:
        f.write("index,re,im\n")
        for i, z in enumerate(seq.samples):
            f.write(f"{i},{FLOAT_FMT % z.real},{FLOAT_FMT % z.imag}\n")


def read_sequence_csv(path, family: str = "Raw") -> ComplexSequence:
    """Inverse of write_sequence_csv."""
    with open(path) as f:
        header = f.readline().strip()
        if header != "index,re,im":
            raise ValueError(f"malformed sequence CSV header: {header!r}")
        samples = []
        for line in f:
            _, re_s, im_s = line.strip().split(",")
            samples.append(complex(float(re_s), float(im_s)))
    return ComplexSequence(np.array(samples), family)
