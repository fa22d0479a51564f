"""Picard-Lefschetz monodromy on distinguished bases of caps and tubes (n = 2).

A generator gamma_i acts by gamma_i(beta_j) = beta_j + eta_ij beta_i.  On
coefficient vectors this is M_i = I + e_i eta_i, with eta_i the i-th row.
Generators are numbered 1..dim in the public API.

Diagonal entries are 0 for caps (transvections, infinite order when the row
is nonzero) and -2 for tubes (reflections, order two).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .families import Family, SingularityClass

F4_ETA = (
    (0, 1, 0, 0),
    (-1, 0, 0, 0),
    (1, 0, -2, 1),
    (-1, 1, 1, -2),
)

# The printed B_k matrix is 7 x 7 with symbolic signs in k and ellipses.
# Entries are given for k = 7; None marks an ellipsis.
_ = None
B_PRINTED_K = 7
B_PRINTED = (
    (-2, 1, 0, _, _, _, 0),
    (0, 0, (-1) ** 7, 0, _, _, 0),
    (_, (-1) ** 6, 0, (-1) ** 6, 0, _, 0),
    (_, 0, (-1) ** 5, _, _, _, 0),
    (_, _, 0, _, 0, 1, 0),
    (_, _, _, _, -1, 0, -1),
    (0, 0, 0, 0, 0, 1, 0),
)
del _


def b_band_sign(k: int, i: int) -> int:
    """Off-diagonal entry of row i (0-based, i >= 1) of the B_k matrix.

    Reads (-1)^k, (-1)^(k-1), ... from the top and (..., -1, +1) at the
    bottom; both ends agree with (-1)^(k-i-1).
    """
    return (-1) ** (k - i - 1)


def eta_B(k: int) -> tuple[tuple[int, ...], ...]:
    eta = [[0] * k for _ in range(k)]
    eta[0][0] = -2
    if k > 1:
        eta[0][1] = 1
    for i in range(1, k):
        e = b_band_sign(k, i)
        if i - 1 >= 1:
            eta[i][i - 1] = e
        if i + 1 < k:
            eta[i][i + 1] = e
    return tuple(tuple(r) for r in eta)


def eta_C(k: int) -> tuple[tuple[int, ...], ...]:
    eta = [[0] * k for _ in range(k)]
    for i in range(1, k):
        eta[i][i - 1] = 1
        eta[i][i] = -2
        if i + 1 < k:
            eta[i][i + 1] = 1
    return tuple(tuple(r) for r in eta)


@dataclass(frozen=True)
class MonodromyModel:
    cls: SingularityClass
    eta: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...]
    critical_values: tuple[str, ...]
    notes: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return len(self.eta)

    def eta_array(self) -> np.ndarray:
        return np.array(self.eta, dtype=np.int64)

    def to_json(self) -> dict:
        return {
            "class": self.cls.label,
            "dim": self.dim,
            "labels": list(self.labels),
            "critical_values": list(self.critical_values),
            "eta": [list(r) for r in self.eta],
            "notes": list(self.notes),
        }


def eta_matrix(cls: SingularityClass) -> MonodromyModel:
    if cls.is_stabilized:
        raise ValueError("stabilized monodromy matrices are not modelled; use the planar class")
    if cls.family is Family.F4:
        return MonodromyModel(
            cls,
            F4_ETA,
            ("cap", "cap", "tube", "tube"),
            tuple(f"nu_{i}" for i in range(1, 5)),
            ("<Delta_1, Delta_2> = +1",),
        )
    k = cls.k
    names = tuple(f"nu_{i}" for i in range(k))
    if cls.family is Family.B:
        return MonodromyModel(
            cls,
            eta_B(k),
            ("tube",) + ("cap",) * (k - 1),
            names,
            ("band signs (-1)^(k-i-1) extrapolate the k = 7 matrix, whose middle rows are elided",),
        )
    return MonodromyModel(cls, eta_C(k), ("cap",) + ("tube",) * (k - 1), names)


def model_from_eta(eta: Sequence[Sequence[int]], labels: Sequence[str] | None = None) -> MonodromyModel:
    """Synthetic model, e.g. for controls."""
    eta = tuple(tuple(int(v) for v in r) for r in eta)
    n = len(eta)
    labels = tuple(labels) if labels else tuple("cap" if eta[i][i] == 0 else "tube" for i in range(n))
    return MonodromyModel(SingularityClass(Family.C, max(n, 2), 1), eta, labels, tuple(f"nu_{i}" for i in range(1, n + 1)))


def _row(model: MonodromyModel, i: int) -> int:
    if not 1 <= abs(i) <= model.dim:
        raise IndexError(f"generator index {i} outside 1..{model.dim}")
    return abs(i) - 1


def generator(model: MonodromyModel, i: int) -> np.ndarray:
    """M_i = I + e_i eta_i (1-based i)."""
    r = _row(model, i)
    m = np.eye(model.dim, dtype=np.int64)
    m[r, :] += np.array(model.eta[r], dtype=np.int64)
    return m


def generator_inverse(model: MonodromyModel, i: int) -> np.ndarray:
    """M_i^{-1} = I - e_i eta_i / (1 + eta_ii); exact since eta_ii is 0 or -2."""
    r = _row(model, i)
    d = 1 + model.eta[r][r]
    if d not in (1, -1):
        raise ValueError("generator is not unimodular")
    m = np.eye(model.dim, dtype=np.int64)
    m[r, :] -= np.array(model.eta[r], dtype=np.int64) * d
    return m


@dataclass(frozen=True)
class CycleVector:
    """Integer coefficients in the basis beta_1..beta_dim.

    ``coupling`` is an optional variation vector of a class outside the span
    (a relative real cycle): gamma_i adds coupling_i beta_i to it.
    """

    coeffs: tuple[int, ...]
    coupling: tuple[int, ...] | None = None

    def __init__(self, coeffs: Iterable[int], coupling: Iterable[int] | None = None):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in coeffs))
        object.__setattr__(self, "coupling", None if coupling is None else tuple(int(c) for c in coupling))

    @classmethod
    def basis(cls, dim: int, i: int) -> "CycleVector":
        """beta_i, 1-based."""
        v = [0] * dim
        v[i - 1] = 1
        return cls(v)

    @classmethod
    def outside_span(cls, dim: int, coupling: Iterable[int]) -> "CycleVector":
        return cls([0] * dim, coupling)

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs) and not (self.coupling and any(self.coupling))


def _kappa(model: MonodromyModel, r: int, v: Sequence[int], coupling: Sequence[int] | None) -> int:
    base = coupling[r] if coupling else 0
    return base + sum(e * c for e, c in zip(model.eta[r], v))


def _act(model: MonodromyModel, i: int, v: tuple[int, ...], coupling) -> tuple[int, ...]:
    r = _row(model, i)
    kappa = _kappa(model, r, v, coupling)
    if i < 0:
        # v = w + kappa(w) e_r gives kappa(v) = kappa(w) (1 + eta_rr)
        kappa *= 1 + model.eta[r][r]
    out = list(v)
    out[r] = out[r] + kappa if i > 0 else out[r] - kappa
    return tuple(out)


def apply_word(model: MonodromyModel, word: Sequence[int], v: CycleVector) -> CycleVector:
    """Apply gamma_{w_1}, then gamma_{w_2}, ...; a negative index is an inverse."""
    if v.dim != model.dim:
        raise ValueError("vector length does not match the model")
    cur = v.coeffs
    for i in word:
        cur = _act(model, i, cur, v.coupling)
    return CycleVector(cur, v.coupling)


def coupling_graph(model_or_eta) -> np.ndarray:
    eta = model_or_eta.eta_array() if isinstance(model_or_eta, MonodromyModel) else np.asarray(model_or_eta)
    adj = (eta != 0) | (eta.T != 0)
    np.fill_diagonal(adj, False)
    return adj


def coupling_blocks(model_or_eta) -> list[list[int]]:
    """Connected components of the coupling graph, 1-based indices."""
    adj = coupling_graph(model_or_eta)
    n, labels = connected_components(csr_matrix(adj.astype(np.int8)), directed=False)
    return [sorted(int(j) + 1 for j in np.flatnonzero(labels == c)) for c in range(n)]


def is_indecomposable(model_or_eta) -> bool:
    return len(coupling_blocks(model_or_eta)) == 1


def orientation_flip(model: MonodromyModel, flips: Sequence[int]) -> MonodromyModel:
    """Reverse the orientation of the 1-based basis elements in ``flips``: eta -> P eta P."""
    d = np.ones(model.dim, dtype=np.int64)
    for i in flips:
        d[_row(model, i)] = -1
    eta = np.diag(d) @ model.eta_array() @ np.diag(d)
    return MonodromyModel(model.cls, tuple(tuple(int(x) for x in r) for r in eta), model.labels,
                          model.critical_values, model.notes + (f"orientation flipped at {sorted(flips)}",))


def dot_graph(model: MonodromyModel) -> str:
    lines = [f'graph "{model.cls.label}" {{']
    for i, lab in enumerate(model.labels, start=1):
        lines.append(f'  b{i} [label="beta_{i} ({lab})"];')
    for i in range(model.dim):
        for j in range(i + 1, model.dim):
            a, b = model.eta[i][j], model.eta[j][i]
            if a or b:
                lines.append(f'  b{i + 1} -- b{j + 1} [label="{a},{b}"];')
    lines.append("}")
    return "\n".join(lines)


@dataclass(frozen=True)
class RankReport:
    absolute: int
    relative: int
    model_dim: int

    def to_json(self) -> dict:
        return {"absolute": self.absolute, "relative": self.relative, "model_dim": self.model_dim}


def rank_report(cls: SingularityClass) -> RankReport:
    """Ranks of H_1(A cap X minus S) and of the relative group at n = 2.

    The absolute group has one generator per critical point of f and of
    f|_S, plus the extra tube around a point of A cap S that only exists at
    n = 2.
    """
    model = eta_matrix(cls.planar())
    mu = 4 if cls.family is Family.F4 else cls.k
    return RankReport(mu + 1, mu, model.dim)


@dataclass(frozen=True)
class ObstructionVerdict:
    obstructed: bool
    generator: int | None = None
    coupling: int = 0
    word: tuple[int, ...] = ()
    growth: tuple[int, ...] = ()
    states_explored: int = 0

    def to_json(self) -> dict:
        return {
            "obstructed": self.obstructed,
            "generator": self.generator,
            "coupling": self.coupling,
            "word": list(self.word),
            "growth": list(self.growth),
            "states_explored": self.states_explored,
        }


def obstruction(
    model: MonodromyModel,
    pi: CycleVector,
    max_length: int = 6,
    allowed: Iterable[int] | None = None,
    growth_steps: int = 5,
) -> ObstructionVerdict:
    """Search words of length <= max_length for a transvection that grows pi linearly.

    A state v is obstructed by gamma_i when eta_ii = 0 and the coupling
    kappa = c_i + eta_i . v is nonzero: then gamma_i^m adds m kappa beta_i.
    ``allowed`` restricts generators (1-based); words use them and their inverses.
    """
    if pi.is_zero():
        raise ValueError("pi must be nonzero")
    gens = sorted(set(allowed)) if allowed is not None else list(range(1, model.dim + 1))
    letters = [g for g in gens] + [-g for g in gens]
    transvections = [g for g in gens if model.eta[g - 1][g - 1] == 0]
    seen = {pi.coeffs: ()}
    queue = deque([(pi.coeffs, ())])
    while queue:
        v, word = queue.popleft()
        for g in transvections:
            r = g - 1
            kappa = _kappa(model, r, v, pi.coupling)
            if kappa != 0:
                growth = tuple(v[r] + m * kappa for m in range(growth_steps + 1))
                return ObstructionVerdict(True, g, kappa, word, growth, len(seen))
        if len(word) >= max_length:
            continue
        for g in letters:
            w = _act(model, g, v, pi.coupling)
            if w not in seen:
                seen[w] = word + (g,)
                queue.append((w, word + (g,)))
    return ObstructionVerdict(False, states_explored=len(seen))
