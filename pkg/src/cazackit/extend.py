"""Arbitrary-length sequence sets built from prime-length parts.

Covers the repetition baseline, the two-prime (even N) concatenation for
cyclic-shift and root-index variants, the three-prime (odd N) concatenation,
and orthogonal-subset selection.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .numtheory import GoldbachSplit
from .seqgen import FLOAT_FMT, ComplexSequence, SequenceSet, bjorck, cyclic_shift, zc


@dataclass(frozen=True)
class ExtensionPlan:
    """Recipe for building an extended set from a Goldbach split.

    short_assignment of None means the auto pattern: short indices cycle
    modulo the short part length (modulo short-length - 1 for root indices)
    as columns advance.
    """

    n: int
    split: GoldbachSplit
    kind: str  # "CyclicShift" | "RootIndex"
    count: int
    short_assignment: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        if self.split.n != self.n:
            raise ValueError(f"split sums to {self.split.n}, plan n is {self.n}")
        if self.kind not in ("CyclicShift", "RootIndex"):
            raise ValueError(f"unknown plan kind {self.kind!r}")
        cap = self.max_count()
        if not 1 <= self.count <= cap:
            raise ValueError(f"count {self.count} outside [1, {cap}] for {self.kind}")
        if self.short_assignment is not None:
            sa = tuple(tuple(rec) for rec in self.short_assignment)
            if len(sa) != self.count:
                raise ValueError("short_assignment must have one record per column")
            n_short = len(self.split.parts) - 1
            for rec in sa:
                if len(rec) != n_short:
                    raise ValueError(f"each record needs {n_short} short indices")
            object.__setattr__(self, "short_assignment", sa)

    def max_count(self) -> int:
        parts = self.split.parts
        if self.kind == "CyclicShift":
            return max(parts)
        return max(p - 1 for p in parts)


def extend_repetition(base: ComplexSequence, n: int) -> ComplexSequence:
    """Repetition baseline: output[m] = base[m mod Q]."""
    q = base.length
    if n < q:
        raise ValueError(f"target length {n} shorter than base length {q}")
    samples = base.samples[np.arange(n) % q]
    prov = dict(base.provenance)
    prov.update({"extension": "repetition", "base_length": q, "base_family": base.family})
    return ComplexSequence(samples, "Composite", prov)


def default_bases(split: GoldbachSplit, family: str) -> list[ComplexSequence]:
    """Base sequence per split part: Bjorck bases, or root-1 ZC bases."""
    if family == "Bjorck":
        return [bjorck(q) for q in split.parts]
    if family == "ZC":
        return [zc(1, q) for q in split.parts]
    raise ValueError(f"unknown family {family!r}")


def _part_column(base: ComplexSequence, kind: str, idx: int) -> ComplexSequence:
    if kind == "CyclicShift":
        return cyclic_shift(base, idx)
    # Root-index columns regenerate ZC with the requested root.
    q = base.length
    if base.family != "ZC":
        raise ValueError("root-index extension requires ZC bases")
    if not 1 <= idx <= q - 1:
        raise ValueError(f"root index {idx} outside [1, {q - 1}]")
    return zc(idx, q)


def _auto_short_indices(plan: ExtensionPlan, c: int) -> tuple[int, ...]:
    shorts = plan.split.parts[1:]
    if plan.kind == "CyclicShift":
        return tuple(c % q for q in shorts)
    return tuple(c % (q - 1) + 1 for q in shorts)


def _long_index(plan: ExtensionPlan, c: int) -> int:
    return c if plan.kind == "CyclicShift" else c + 1


def _build(plan: ExtensionPlan, bases: list[ComplexSequence]) -> SequenceSet:
    parts = plan.split.parts
    if len(bases) != len(parts):
        raise ValueError(f"need {len(parts)} base sequences, got {len(bases)}")
    for base, q in zip(bases, parts):
        if base.length != q:
            raise ValueError(f"base length {base.length} does not match part {q}")
    columns = []
    assignment = []
    for c in range(plan.count):
        long_idx = _long_index(plan, c)
        if plan.short_assignment is not None:
            short_idx = plan.short_assignment[c]
        else:
            short_idx = _auto_short_indices(plan, c)
        pieces = [_part_column(bases[0], plan.kind, long_idx).samples]
        for base, idx in zip(bases[1:], short_idx):
            pieces.append(_part_column(base, plan.kind, idx).samples)
        columns.append(
            ComplexSequence(
                np.concatenate(pieces),
                "Composite",
                {
                    "split": parts,
                    "kind": plan.kind,
                    "long": long_idx,
                    "short": short_idx,
                    "base_family": bases[0].family,
                },
            )
        )
        assignment.append((long_idx,) + tuple(short_idx))
    return SequenceSet(
        tuple(columns), plan.kind, tuple(assignment),
        meta={
            "n": plan.n,
            "split": parts,
            "family": bases[0].family,
            "extension": "goldbach",
        },
    )


def extend_even(plan: ExtensionPlan, bases: list[ComplexSequence]) -> SequenceSet:
    """Two-prime construction: column c = concat(long(c), short(pi(c)))."""
    if len(plan.split.parts) != 2:
        raise ValueError("extend_even requires a 2-part split")
    return _build(plan, bases)


def extend_odd(plan: ExtensionPlan, bases: list[ComplexSequence]) -> SequenceSet:
    """Three-prime construction with independently cycling short indices."""
    if len(plan.split.parts) != 3:
        raise ValueError("extend_odd requires a 3-part split")
    return _build(plan, bases)


def orthogonal_subset(sset: SequenceSet) -> SequenceSet:
    """Evenly spaced cyclic-shift columns with pairwise-distinct part indices.

    Subset size is min over the split parts; the long-shift stride is
    floor(Q1/Q2) (bumped by one if it is a multiple of Q2, which would make
    short indices collide).
    """
    if sset.kind != "CyclicShift":
        raise ValueError("orthogonal subsets are defined for cyclic-shift sets")
    split = sset.meta.get("split")
    if not split:
        raise ValueError("set carries no split metadata; build it with extend_even")
    size = min(split)
    stride = split[0] // split[1]
    if stride % split[1] == 0:
        stride += 1
    picks = [k * stride for k in range(size)]
    if picks[-1] >= sset.n_columns:
        raise ValueError(
            f"set has {sset.n_columns} columns; subset needs index {picks[-1]}"
        )
    cols = [sset.columns[i] for i in picks]
    assignment = [sset.assignment[i] for i in picks]
    for axis in range(len(split)):
        idx = [rec[axis] for rec in assignment]
        if len(set(idx)) != len(idx):
            raise ValueError("subset indices collide; set was not auto-assigned")
    meta = dict(sset.meta)
    meta["subset_stride"] = stride
    return SequenceSet(tuple(cols), "CyclicShift", tuple(assignment), meta=meta)


def repetition_set(q: int, n: int, count: int, family: str = "Bjorck") -> SequenceSet:
    """Baseline set: repetition-extended cyclic shifts of one prime-length base."""
    if not 1 <= count <= q:
        raise ValueError(f"count {count} outside [1, {q}]")
    base = bjorck(q) if family == "Bjorck" else zc(1, q)
    cols = tuple(extend_repetition(cyclic_shift(base, l), n) for l in range(count))
    return SequenceSet(columns=cols, kind="CyclicShift",
                       assignment=tuple((l,) for l in range(count)),
                       meta={"n": n, "split": (q,), "family": family,
                             "extension": "repetition"})


def select_columns(sset: SequenceSet, indices) -> SequenceSet:
    """Sub-set of columns by position, preserving kind/assignment/meta."""
    idx = [int(i) for i in indices]
    if not idx:
        raise ValueError("must keep at least one column")
    return SequenceSet(columns=tuple(sset.columns[i] for i in idx),
                       kind=sset.kind,
                       assignment=tuple(sset.assignment[i] for i in idx),
                       meta=dict(sset.meta))


def write_set_csv(sset: SequenceSet, path, manifest_path=None) -> None:
    """CSV export (column,index,re,im) plus a JSON sidecar manifest."""
    with open(path, "w") as f:
        f.write("column,index,re,im\n")
        for c, col in enumerate(sset.columns):
            for i, z in enumerate(col.samples):
                f.write(f"{c},{i},{FLOAT_FMT % z.real},{FLOAT_FMT % z.imag}\n")
    if manifest_path is not None:
        manifest = {
            "n": sset.length,
            "columns": sset.n_columns,
            "kind": sset.kind,
            "assignment": [list(rec) for rec in sset.assignment],
            "meta": {k: list(v) if isinstance(v, tuple) else v
                     for k, v in sset.meta.items()},
        }
        with open(manifest_path, "w") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")


def read_set_csv(path) -> SequenceSet:
    """Inverse of write_set_csv (assignment metadata is not recovered)."""
    by_col: dict[int, list[complex]] = {}
    with open(path) as f:
        header = f.readline().strip()
        if header != "column,index,re,im":
            raise ValueError(f"malformed set CSV header: {header!r}")
        for line in f:
            c_s, _, re_s, im_s = line.strip().split(",")
            by_col.setdefault(int(c_s), []).append(complex(float(re_s), float(im_s)))
    cols = [
        ComplexSequence(np.array(by_col[c]), "Raw") for c in sorted(by_col)
    ]
    return SequenceSet(tuple(cols), "CyclicShift", tuple((c,) for c in sorted(by_col)))
