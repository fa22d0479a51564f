"""Chambers of the complement of the real discriminant and their lacuna verdicts.

A chamber is identified by a topological signature of the zero level:

* B and C: the pair (p, q) of positive and negative real roots of the
  reduced polynomial, which determines the chamber.
* F4: number of real roots of f|_S, and for each curve component its
  compactness, the order in which it crosses S (ranks of the crossings by
  height) and, for S-avoiding components, the side of S it lies on.
  ``coarse_key`` keeps the shorter form (roots, components, flags).

A chamber is a lacuna iff the level is empty or every component meets S.
"""

from __future__ import annotations

import hashlib
import json
import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .curvetopo import (
    LevelCurveTopology,
    ProjectionDegeneracy,
    StabilizedSummary,
    stabilized_summary,
    topology,
)
from .families import (
    Box,
    Deformation,
    Family,
    SingularityClass,
    WallError,
    default_box,
    off_wall_sample,
    wall_values,
)
from .algebra import RationalPoly

SCHEMA_VERSION = 1


class CensusMismatch(RuntimeError):
    """More distinct signatures than chambers: the signature would merge or split chambers."""


@dataclass(frozen=True)
class ComponentSignature:
    family: Family
    key: tuple
    empty: bool = False
    coarse: tuple | None = None

    @property
    def coarse_key(self) -> tuple:
        return self.coarse if self.coarse is not None else self.key

    def __str__(self) -> str:
        if self.family is not Family.F4:
            return f"({self.key[0]},{self.key[1]})" + (" empty" if self.empty else "")
        roots, comps = self.key
        parts = []
        for compact, seq, side in comps:
            name = "oval" if compact else "arc"
            if seq:
                parts.append(f"{name}[{''.join(str(i) for i in seq)}]")
            else:
                parts.append(f"{name}{'+' if side > 0 else '-'}")
        return f"{roots}:" + " ".join(parts)

    def to_json(self):
        return {"key": _jsonable(self.key), "empty": self.empty, "text": str(self)}


def _jsonable(obj):
    if isinstance(obj, (tuple, list)):
        return [_jsonable(o) for o in obj]
    return obj


def signature_from_topology(cls: SingularityClass, topo: LevelCurveTopology) -> ComponentSignature:
    if cls.family is not Family.F4:
        return ComponentSignature(cls.family, topo.pq.pq, topo.empty)
    comps = tuple(sorted((c.compact, c.crossings, c.side or 0) for c in topo.components))
    flags = tuple(sorted((c.compact, c.meets_S) for c in topo.components))
    coarse = (topo.boundary_roots, len(topo.components), flags)
    return ComponentSignature(cls.family, (topo.boundary_roots, comps), topo.empty, coarse)


def signature_of(cls: SingularityClass, lam: Deformation) -> ComponentSignature:
    return signature_from_topology(cls.planar(), topology(cls.planar(), lam))


def is_lacuna(state: LevelCurveTopology | StabilizedSummary) -> bool:
    """Empty level, or every component meets S."""
    if isinstance(state, StabilizedSummary):
        return state.empty or state.all_components_meet_S
    return state.empty or state.all_meet_S


def admissible_pairs(k: int) -> list[tuple[int, int]]:
    """Root-sign pairs (p, q) of a real polynomial of degree k with nonzero simple roots."""
    return [(p, q) for p in range(k + 1) for q in range(k + 1 - p) if (p + q) % 2 == k % 2]


def expected_counts(cls: SingularityClass) -> tuple[int, int]:
    """(components, lacunas) of the complement for the planar class."""
    if cls.family is Family.F4:
        return 8, 4
    k = cls.k
    half = k // 2
    if k % 2 == 0:
        comps = (half + 1) ** 2
        if cls.family is Family.B:
            return comps, 2 if cls.sign > 0 else 1
        return comps, half**2
    comps = (half + 1) * (half + 2)
    if cls.family is Family.B:
        return comps, 1
    return comps, half**2 + half


def expected_stabilized_lacunas(cls: SingularityClass) -> int:
    r, s = cls.stab
    comps, planar = expected_counts(cls.planar())
    one_sided_same = (cls.sign > 0 and s == 0) or (cls.sign < 0 and r == 0)
    if cls.family is Family.C and cls.k % 2 == 1:
        if r == 0 or s == 0:
            return (cls.k // 2 + 1) ** 2
        return comps
    if one_sided_same:
        return planar
    return comps


def constructive_witness(cls: SingularityClass, p: int, q: int) -> Deformation:
    """Deformation whose reduced polynomial has p positive and q negative simple roots.

    Real roots at i/10 and -j/10, complex pairs at +-i m/10, nudged by 1/1000
    in lam_0 if a wall is hit.
    """
    k = cls.k
    if (p, q) not in admissible_pairs(k):
        raise ValueError(f"({p},{q}) is not admissible for degree {k}")
    poly = RationalPoly([1])
    for i in range(1, p + 1):
        poly = poly * RationalPoly([Fraction(-i, 10), 1])
    for j in range(1, q + 1):
        poly = poly * RationalPoly([Fraction(j, 10), 1])
    for m in range(1, (k - p - q) // 2 + 1):
        poly = poly * RationalPoly([Fraction(m * m, 100), 0, 1])
    lead = 1 if cls.family is Family.B else cls.sign
    coeffs = [lead * c for c in poly.coeffs[:-1]]
    lam = Deformation(coeffs)
    nudge = Fraction(1, 1000)
    while not wall_values(cls.planar(), lam).off_walls:
        lam = Deformation([lam[0] + nudge] + list(lam.lam[1:]))
    return lam


@dataclass
class AtlasRecord:
    signature: ComponentSignature
    witness: Deformation
    is_lacuna: bool
    population: int = 0
    source: str = "sample"

    def to_json(self) -> dict:
        return {
            "signature": self.signature.to_json(),
            "witness": self.witness.to_json(),
            "is_lacuna": self.is_lacuna,
            "population": self.population,
            "source": self.source,
        }


@dataclass
class CensusResult:
    cls: SingularityClass
    records: list[AtlasRecord]
    expected_components: int
    expected_lacunas: int
    samples: int
    status: str = "ok"
    diagnostics: list[str] = field(default_factory=list)

    @property
    def component_count(self) -> int:
        return len(self.records)

    @property
    def lacuna_count(self) -> int:
        return sum(r.is_lacuna for r in self.records)

    @property
    def matches_expected(self) -> bool:
        return (self.component_count, self.lacuna_count) == (self.expected_components, self.expected_lacunas)

    def lacunas(self) -> list[ComponentSignature]:
        return [r.signature for r in self.records if r.is_lacuna]

    def to_json(self) -> dict:
        return {
            "class": self.cls.label,
            "components": self.component_count,
            "components_expected": self.expected_components,
            "lacunas": self.lacuna_count,
            "lacunas_expected": self.expected_lacunas,
            "samples": self.samples,
            "status": self.status,
            "diagnostics": self.diagnostics,
            "records": [r.to_json() for r in self.records],
        }


def _classify(cls: SingularityClass, lam: Deformation) -> tuple[ComponentSignature, bool]:
    topo = topology(cls, lam)
    return signature_from_topology(cls, topo), is_lacuna(topo)


def census(cls: SingularityClass, budget: int | None = None, seed: int = 0) -> CensusResult:
    """Enumerate chambers by signature and count lacunas.

    B and C: one constructive witness per admissible (p, q), plus ``budget``
    random samples from the default box to record populations.
    F4: ``budget`` float-screened samples; a few per screening code are
    classified exactly and only exact signatures are reported.
    """
    if cls.is_stabilized:
        raise ValueError("census works on the planar class; use stabilized_census")
    exp_c, exp_l = expected_counts(cls)
    if cls.family is Family.F4:
        return _census_f4(cls, budget if budget is not None else 100000, seed, exp_c, exp_l)

    records: dict[tuple, AtlasRecord] = {}
    for p, q in admissible_pairs(cls.k):
        lam = constructive_witness(cls, p, q)
        sig, lac = _classify(cls, lam)
        if sig.key != (p, q):
            raise AssertionError(f"constructive witness for {(p, q)} has signature {sig}")
        records[sig.key] = AtlasRecord(sig, lam, lac, 0, "constructed")
    budget = budget if budget is not None else 64
    for lam in off_wall_sample(cls, default_box(cls), seed, budget) if budget else []:
        sig, lac = _classify(cls, lam)
        rec = records.get(sig.key)
        if rec is None:
            records[sig.key] = rec = AtlasRecord(sig, lam, lac, 0)
        if rec.is_lacuna != lac:
            raise CensusMismatch(f"verdict differs inside chamber {sig}")
        rec.population += 1
    out = CensusResult(cls, sorted(records.values(), key=lambda r: r.signature.key), exp_c, exp_l, budget)
    if out.component_count != exp_c:
        out.status = "mismatch"
        out.diagnostics.append(f"found {out.component_count} chambers, expected {exp_c}")
    elif out.lacuna_count != exp_l:
        out.status = "mismatch"
        out.diagnostics.append(f"found {out.lacuna_count} lacunas, expected {exp_l}")
    return out


F4_SLICE_DECADES = (6.0, 0.0, 4.0, 3.0)


def f4_census_samples(count: int, seed: int) -> np.ndarray:
    """Half uniform on the grid of [-1, 1]^4, half on the slice |lam_1| = 1.

    The F4 walls are quasi-homogeneous (weights 6, 1, 4, 3), so every chamber
    meeting lam_1 != 0 meets |lam_1| = 1.  On the slice the other parameters
    get log-uniform magnitudes over 6, 4 and 3 decades and random signs,
    which reaches the thin chambers near the lam_1 axis.  All values are
    floats, hence exact dyadic rationals.
    """
    rng = np.random.default_rng(seed)
    n_cube = count // 2
    grid = 1 << 12
    cube = rng.integers(-grid, grid + 1, size=(n_cube, 4)) / grid
    n_slice = count - n_cube
    mags = 10.0 ** (-rng.uniform(0.0, 1.0, size=(n_slice, 4)) * np.array(F4_SLICE_DECADES))
    signs = rng.choice([-1.0, 1.0], size=(n_slice, 4))
    sl = mags * signs
    return np.vstack([cube, sl])


def _cubic_real_roots(coeffs: np.ndarray) -> np.ndarray:
    """Real roots of monic cubics t^3 + a t^2 + b t + c, rows sorted, NaN padded."""
    n = coeffs.shape[0]
    comp = np.zeros((n, 3, 3))
    comp[:, 0, :] = -coeffs
    comp[:, 1, 0] = 1.0
    comp[:, 2, 1] = 1.0
    ev = np.linalg.eigvals(comp)
    scale = 1.0 + np.abs(ev)
    real = np.abs(ev.imag) < 1e-7 * scale
    vals = np.where(real, ev.real, np.nan)
    return np.sort(vals, axis=1)


def f4_screen_codes(lams: np.ndarray, sign: int) -> np.ndarray:
    """Float screening code per sample.

    Real-root counts of D and g, the side of the bounded interval of D > 0,
    and for each crossing the D-gap it lies in and its branch.
    """
    l0, l1, l2, l3 = lams.T
    a = -4.0 * sign
    dco = np.stack([l1**2 / a, (2 * l1 * l3 - 4 * sign * l2) / a, (l3**2 - 4 * sign * l0) / a], axis=1)
    gco = np.stack([np.zeros_like(l0), l2, l0], axis=1)
    dr = _cubic_real_roots(dco)
    gr = _cubic_real_roots(gco)
    n_d = np.sum(~np.isnan(dr), axis=1)
    n_g = np.sum(~np.isnan(gr), axis=1)
    # side of the bounded interval of D > 0: (r2, r3) for sign +, (r1, r2) for sign -
    mid = (dr[:, 1] + dr[:, 2]) / 2 if sign > 0 else (dr[:, 0] + dr[:, 1]) / 2
    oval_side = np.where(n_d == 3, np.sign(-(l3 + l1 * np.nan_to_num(mid)) * sign), 0).astype(int)
    codes = [n_d, n_g, oval_side]
    for j in range(3):
        y = gr[:, j]
        valid = ~np.isnan(y)
        below = np.sum(dr < y[:, None], axis=1)
        bval = l3 + l1 * np.nan_to_num(y)
        branch = (-bval * sign > 0).astype(int)
        codes.append(np.where(valid, 2 * below + branch, -1))
    return np.stack(codes, axis=1)


def _census_f4(cls: SingularityClass, budget: int, seed: int, exp_c: int, exp_l: int,
               verify_per_code: int = 3) -> CensusResult:
    lams = f4_census_samples(budget, seed)
    codes = f4_screen_codes(lams, cls.sign)
    uniq, first, inverse, counts = np.unique(codes, axis=0, return_index=True, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    records: dict[tuple, AtlasRecord] = {}
    diagnostics: list[str] = []
    for u in np.argsort(first):
        members = np.flatnonzero(inverse == u)[:verify_per_code]
        for idx in members:
            lam = Deformation([Fraction(float(v)) for v in lams[idx]])
            try:
                if not wall_values(cls, lam).off_walls:
                    continue
                sig, lac = _classify(cls, lam)
            except (WallError, ProjectionDegeneracy):
                continue
            rec = records.get(sig.key)
            if rec is None:
                records[sig.key] = rec = AtlasRecord(sig, lam, lac, 0)
                rec.population += int(counts[u])
            elif idx == members[0]:
                rec.population += int(counts[u])
            if rec.is_lacuna != lac:
                raise CensusMismatch(f"verdict differs inside chamber {sig}")
    ordered = sorted(records.values(), key=lambda r: (r.signature.key[0], str(r.signature)))
    out = CensusResult(cls, ordered, exp_c, exp_l, budget, diagnostics=diagnostics)
    if out.component_count > exp_c:
        raise CensusMismatch(
            f"{cls.label}: {out.component_count} distinct signatures exceed the {exp_c} chambers"
        )
    if out.component_count < exp_c:
        out.status = "insufficient sampling"
        out.diagnostics.append(f"only {out.component_count} of {exp_c} chambers reached with budget {budget}")
    elif out.lacuna_count != exp_l:
        out.status = "mismatch"
        out.diagnostics.append(f"found {out.lacuna_count} lacunas, expected {exp_l}")
    return out


def chamber_witnesses(cls: SingularityClass, budget: int | None = None, seed: int = 0) -> list[AtlasRecord]:
    return census(cls.planar(), budget, seed).records


@dataclass
class StabilizedCensus:
    cls: SingularityClass
    lacuna_count: int
    expected_lacunas: int
    verdicts: list[tuple[ComponentSignature, bool, StabilizedSummary]]

    @property
    def matches_expected(self) -> bool:
        return self.lacuna_count == self.expected_lacunas

    def to_json(self) -> dict:
        return {
            "class": self.cls.label,
            "stab": list(self.cls.stab),
            "lacunas": self.lacuna_count,
            "lacunas_expected": self.expected_lacunas,
            "chambers": [
                {"signature": sig.to_json(), "is_lacuna": lac, "summary": summ.to_json()}
                for sig, lac, summ in self.verdicts
            ],
        }


def stabilized_census(cls: SingularityClass, records: list[AtlasRecord] | None = None) -> StabilizedCensus:
    """Lacuna count of an (r, s)-stabilization, evaluated on one witness per chamber."""
    if not cls.is_stabilized:
        raise ValueError("stabilized_census needs r + s >= 1")
    if records is None:
        records = chamber_witnesses(cls.planar())
    verdicts = []
    for rec in records:
        summ = stabilized_summary(cls, rec.witness)
        verdicts.append((rec.signature, is_lacuna(summ), summ))
    count = sum(v[1] for v in verdicts)
    return StabilizedCensus(cls, count, expected_stabilized_lacunas(cls), verdicts)


class CensusCache:
    """Content-addressed store of census JSON, keyed by (class, seed, budget)."""

    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)

    @staticmethod
    def key(cls: SingularityClass, seed: int, budget: int | None) -> str:
        blob = json.dumps(
            {"class": cls.label, "seed": seed, "budget": budget, "schema": SCHEMA_VERSION},
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode()).hexdigest()

    def path(self, cls, seed, budget) -> Path:
        return self.directory / f"{self.key(cls, seed, budget)}.json"

    def get(self, cls, seed, budget) -> dict | None:
        p = self.path(cls, seed, budget)
        if p.exists():
            return json.loads(p.read_text())
        return None

    def put(self, cls, seed, budget, payload: dict) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        p = self.path(cls, seed, budget)
        tmp = p.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, sort_keys=True, indent=1))
        tmp.replace(p)
        return p


def population_histogram(result: CensusResult) -> Counter:
    return Counter({str(r.signature): r.population for r in result.records})


__all__ = [
    "AtlasRecord",
    "Box",
    "CensusCache",
    "CensusMismatch",
    "CensusResult",
    "ComponentSignature",
    "StabilizedCensus",
    "admissible_pairs",
    "census",
    "constructive_witness",
    "expected_counts",
    "expected_stabilized_lacunas",
    "is_lacuna",
    "signature_of",
    "stabilized_census",
]
