"""Reduced density matrices over mode subsets and von Neumann entropy.

The reduced density matrix of a subset is indexed by occupation
patterns restricted to the subset, ordered lexicographically.  Its
(p', p) element is

    sum over environment patterns e of  conj(amp(p' join e)) * amp(p join e),

where "join" recombines subset and environment occupations back into
registry order.  Because bra and ket share the same environment pattern
and the same recombination convention, fermionic reordering parities
enter conjugately and cancel in every matrix element of the
number-sector-diagonal blocks this package evaluates; the kernel
therefore does no sign bookkeeping.  The matrix is Hermitian, positive
semidefinite and trace one by construction.

Entropy is the von Neumann entropy with natural logarithm,
S = -sum(lambda * ln(lambda)), with 0 ln 0 = 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NormalizationError, NumericalInvariantError
from .fock_core import ManyBodyState, OccupationVector

NORM_GATE = 1e-9
EIGENVALUE_FLOOR = -1e-9
DIAGONAL_TOL = 1e-12

ModeSubset = tuple[int, ...]


def normalize_subset(size: int, subset: Sequence[int]) -> ModeSubset:
    """Sorted, validated tuple of distinct mode indices."""
    indices = tuple(int(i) for i in subset)
    if not indices:
        raise ValueError("subset must contain at least one mode")
    if len(set(indices)) != len(indices):
        raise ValueError(f"subset has repeated indices: {indices}")
    for i in indices:
        if not 0 <= i < size:
            raise ValueError(f"mode index {i} outside registry of size {size}")
    return tuple(sorted(indices))


@dataclass
class ReducedDensityMatrix:
    """Density matrix of a mode subset in the pattern basis.

    ``patterns[i]`` is the subset occupation pattern labelling row and
    column i; the ordering is lexicographic with the lowest subset mode
    most significant.
    """

    subset: ModeSubset
    patterns: tuple[OccupationVector, ...]
    matrix: np.ndarray

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def validate(self, tol: float = 1e-12) -> None:
        """Check trace one, Hermiticity and eigenvalue floor."""
        tr = float(np.trace(self.matrix).real)
        if abs(tr - 1.0) > tol:
            raise NumericalInvariantError(f"trace {tr} deviates from 1 beyond {tol}")
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > tol:
            raise NumericalInvariantError("matrix is not Hermitian")
        smallest = float(np.linalg.eigvalsh(self.matrix)[0])
        if smallest < -tol:
            raise NumericalInvariantError(f"negative eigenvalue {smallest}")


def reduced_density_matrix(state: ManyBodyState, subset: Sequence[int]) -> ReducedDensityMatrix:
    """Trace out everything except ``subset`` from a normalized pure state."""
    registry = state.registry
    sub = normalize_subset(len(registry), subset)

    n = state.norm()
    if abs(n - 1.0) > NORM_GATE:
        raise NormalizationError(f"state norm {n} deviates from 1 beyond {NORM_GATE}")

    ranges = [range(registry.radix(i)) for i in sub]
    patterns = tuple(itertools.product(*ranges))
    index = {p: i for i, p in enumerate(patterns)}
    dim = len(patterns)

    env_modes = [i for i in range(len(registry)) if i not in sub]
    groups: dict[tuple[int, ...], list[tuple[int, complex]]] = {}
    for key, amp in state.amplitudes.items():
        occ = registry.unpack(key)
        p = tuple(occ[i] for i in sub)
        e = tuple(occ[j] for j in env_modes)
        groups.setdefault(e, []).append((index[p], amp))

    matrix = np.zeros((dim, dim), dtype=complex)
    for entries in groups.values():
        v = np.zeros(dim, dtype=complex)
        for i, amp in entries:
            v[i] += amp
        matrix += np.outer(v.conj(), v)

    matrix /= float(np.trace(matrix).real)
    return ReducedDensityMatrix(sub, patterns, matrix)


def von_neumann_entropy(rdm: ReducedDensityMatrix) -> float:
    """-sum(lambda ln lambda) over the spectrum, natural log."""
    eigenvalues = np.linalg.eigvalsh(rdm.matrix)
    if float(eigenvalues[0]) < EIGENVALUE_FLOOR:
        raise NumericalInvariantError(
            f"eigenvalue {float(eigenvalues[0])} below floor {EIGENVALUE_FLOOR}"
        )
    lam = np.clip(eigenvalues, 0.0, 1.0)
    lam = lam[lam > 0.0]
    return float(-np.sum(lam * np.log(lam)))


def mode_entanglement(state: ManyBodyState, subset: Sequence[int]) -> float:
    """Entanglement entropy between ``subset`` and the remaining modes."""
    return von_neumann_entropy(reduced_density_matrix(state, subset))


def is_diagonal(rdm: ReducedDensityMatrix, tol: float = DIAGONAL_TOL) -> bool:
    off = rdm.matrix - np.diag(np.diag(rdm.matrix))
    return bool(np.max(np.abs(off)) <= tol) if off.size else True


def diagonal_distribution(rdm: ReducedDensityMatrix) -> np.ndarray:
    """Real diagonal of the matrix, in pattern order."""
    return np.real(np.diag(rdm.matrix)).copy()
