"""Number-conserving second-quantized Hamiltonians on small sectors.

H = sum_ij (T + T')_ij a^dagger_i a_j
    + (1/2) sum_ijlm V_ijlm a^dagger_i a^dagger_j a_m a_l

with T the one-body matrix, T' an external field, and V the two-body
tensor stored sparsely as <ij|V|lm> entries (Hermiticity pairs are
completed at load).  Matrices are assembled on fixed-number sectors by
applying the operator string to each basis vector, so fermionic signs
come from the same kernels as everything else.  A configurable guard
(FOCKENT_SIZE_GUARD, default 5000) bounds the sector dimension.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import SizeGuardError
from .fock_core import (
    ManyBodyState,
    ModeLabel,
    ModeRegistry,
    Species,
    Spin,
    annihilation_kernel,
    creation_kernel,
    enumerate_sector,
    inner_product,
    registry_create,
    sector_dimension,
    _pruned,
)

DEFAULT_SIZE_GUARD = 5000
HERMITICITY_TOL = 1e-12
DEGENERACY_RTOL = 1e-10
PROPER_TOL = 1e-12
TENSOR_PRUNE = 1e-14

TwoBodyKey = tuple[int, int, int, int]


def size_guard() -> int:
    raw = os.environ.get("FOCKENT_SIZE_GUARD")
    return DEFAULT_SIZE_GUARD if raw is None else int(raw)


@dataclass
class SecondQuantizedHamiltonian:
    """One-body + external matrices and a sparse Hermitian two-body tensor."""

    registry: ModeRegistry
    one_body: np.ndarray
    external: np.ndarray | None = None
    two_body: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        m = len(self.registry)
        self.one_body = np.asarray(self.one_body, dtype=complex)
        if self.one_body.shape != (m, m):
            raise ValueError(f"one_body must be {m}x{m}")
        if self.external is None:
            self.external = np.zeros((m, m), dtype=complex)
        else:
            self.external = np.asarray(self.external, dtype=complex)
            if self.external.shape != (m, m):
                raise ValueError(f"external must be {m}x{m}")
        for name, mat in (("one_body", self.one_body), ("external", self.external)):
            if np.max(np.abs(mat - mat.conj().T)) > HERMITICITY_TOL:
                raise ValueError(f"{name} matrix is not Hermitian")
        self.two_body = _complete_two_body(self.two_body, m)

    @property
    def total_one_body(self) -> np.ndarray:
        return self.one_body + self.external


def _complete_two_body(entries: Mapping, num_modes: int) -> dict:
    """Validate index ranges and enforce <ij|V|lm> = conj(<lm|V|ij>)."""
    completed: dict[TwoBodyKey, complex] = {}
    for key, value in entries.items():
        key = tuple(int(x) for x in key)
        if len(key) != 4 or not all(0 <= x < num_modes for x in key):
            raise ValueError(f"two-body key {key} out of range for {num_modes} modes")
        value = complex(value)
        if value == 0:
            continue
        if key in completed and abs(completed[key] - value) > HERMITICITY_TOL:
            raise ValueError(f"conflicting two-body entries at {key}")
        completed[key] = value
    for (i, j, l, m), value in list(completed.items()):
        partner = (l, m, i, j)
        expected = value.conjugate()
        if partner in completed:
            if abs(completed[partner] - expected) > HERMITICITY_TOL:
                raise ValueError(
                    f"two-body entries at {(i, j, l, m)} and {partner} break Hermiticity"
                )
        else:
            completed[partner] = expected
    return completed


@dataclass
class SectorMatrix:
    """Dense Hamiltonian block on one total-number sector (or the full space)."""

    registry: ModeRegistry
    total: int | None
    keys: tuple[int, ...]
    matrix: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.keys)


def _sector_keys(registry: ModeRegistry, total: int | None) -> tuple[int, ...]:
    guard = size_guard()
    if total is None:
        dim = registry.full_dimension()
        if dim > guard:
            raise SizeGuardError(
                f"full space dimension {dim} exceeds guard {guard}", dim, guard
            )
        return tuple(range(dim))
    dim = sector_dimension(registry, total)
    if dim > guard:
        raise SizeGuardError(
            f"sector N={total} dimension {dim} exceeds guard {guard}", dim, guard
        )
    return tuple(registry.pack(occ) for occ in enumerate_sector(registry, total))


def _one_body_terms(h: SecondQuantizedHamiltonian) -> list[tuple[int, int, complex]]:
    t = h.total_one_body
    out = []
    m = len(h.registry)
    for i in range(m):
        for j in range(m):
            if t[i, j] != 0:
                out.append((i, j, complex(t[i, j])))
    return out


def _apply_terms(
    registry: ModeRegistry,
    key: int,
    amp: complex,
    one_body: list[tuple[int, int, complex]],
    two_body: Mapping,
    out: dict[int, complex],
) -> None:
    # T_ij a^dagger_i a_j
    for i, j, t in one_body:
        hit = annihilation_kernel(registry, key, j)
        if hit is None:
            continue
        k1, f1 = hit
        hit = creation_kernel(registry, k1, i)
        if hit is None:
            continue
        k2, f2 = hit
        out[k2] = out.get(k2, 0.0) + amp * t * f1 * f2
    # (1/2) V_ijlm a^dagger_i a^dagger_j a_m a_l
    for (i, j, l, m), v in two_body.items():
        hit = annihilation_kernel(registry, key, l)
        if hit is None:
            continue
        k1, f1 = hit
        hit = annihilation_kernel(registry, k1, m)
        if hit is None:
            continue
        k2, f2 = hit
        hit = creation_kernel(registry, k2, j)
        if hit is None:
            continue
        k3, f3 = hit
        hit = creation_kernel(registry, k3, i)
        if hit is None:
            continue
        k4, f4 = hit
        out[k4] = out.get(k4, 0.0) + amp * 0.5 * v * f1 * f2 * f3 * f4


def hamiltonian_matrix(
    h: SecondQuantizedHamiltonian, total: int | None
) -> SectorMatrix:
    """Dense matrix of H on the fixed-N sector (or full space for None)."""
    keys = _sector_keys(h.registry, total)
    index = {k: i for i, k in enumerate(keys)}
    dim = len(keys)
    matrix = np.zeros((dim, dim), dtype=complex)
    one_body = _one_body_terms(h)
    for col, key in enumerate(keys):
        out: dict[int, complex] = {}
        _apply_terms(h.registry, key, 1.0 + 0.0j, one_body, h.two_body, out)
        for new_key, value in out.items():
            matrix[index[new_key], col] = value
    return SectorMatrix(h.registry, total, keys, matrix)


def apply_hamiltonian(
    h: SecondQuantizedHamiltonian, state: ManyBodyState
) -> ManyBodyState:
    """H |state>, unnormalized."""
    out: dict[int, complex] = {}
    one_body = _one_body_terms(h)
    for key, amp in state.amplitudes.items():
        _apply_terms(h.registry, key, amp, one_body, h.two_body, out)
    return ManyBodyState(h.registry, _pruned(out), state.truncated)


def apply_number_operator(state: ManyBodyState, mode: int) -> ManyBodyState:
    """n_mode |state>, unnormalized."""
    registry = state.registry
    out = {
        key: amp * registry.occupation_at(key, mode)
        for key, amp in state.amplitudes.items()
    }
    return ManyBodyState(registry, _pruned(out), state.truncated)


def energy_expectation(h: SecondQuantizedHamiltonian, state: ManyBodyState) -> float:
    return float(inner_product(state, apply_hamiltonian(h, state)).real)


def _canonicalize_cluster(block: np.ndarray) -> np.ndarray:
    """Rotate a degenerate eigenspace toward occupation-sparse vectors.

    Greedy: repeatedly take the basis direction with the largest weight
    inside the remaining subspace, project, normalize, deflate.  When
    the subspace is spanned by occupation vectors this returns exactly
    those vectors.
    """
    dim, count = block.shape
    projector = block @ block.conj().T
    vectors = []
    for _ in range(count):
        weights = np.real(np.diag(projector))
        b = int(np.argmax(weights))
        v = projector[:, b].copy()
        norm = float(np.linalg.norm(v))
        v /= norm
        vectors.append(v)
        projector = projector - np.outer(v, v.conj())
    return np.column_stack(vectors)


def eigenstates(
    h: SecondQuantizedHamiltonian, total: int | None
) -> list[tuple[float, ManyBodyState]]:
    """Eigenpairs of the sector matrix, energies ascending.

    Near-degenerate clusters (gap below 1e-10 times the spectral
    spread) are re-mixed toward occupation-sparse combinations so that
    a Hamiltonian diagonal in the registry basis yields occupation
    eigenvectors even inside degeneracies.
    """
    sector = hamiltonian_matrix(h, total)
    energies, vectors = np.linalg.eigh(sector.matrix)
    scale = max(1.0, float(energies[-1] - energies[0]))
    threshold = DEGENERACY_RTOL * scale

    clusters: list[list[int]] = [[0]] if len(energies) else []
    for i in range(1, len(energies)):
        if energies[i] - energies[i - 1] < threshold:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    for cluster in clusters:
        if len(cluster) > 1:
            cols = vectors[:, cluster]
            vectors[:, cluster] = _canonicalize_cluster(cols)

    out = []
    for i, energy in enumerate(energies):
        amps = {
            key: complex(vectors[row, i])
            for row, key in enumerate(sector.keys)
            if abs(vectors[row, i]) > 1e-15
        }
        state = ManyBodyState(h.registry, amps).normalize()
        out.append((float(energy), state))
    return out


def evolve_many(
    state: ManyBodyState, h: SecondQuantizedHamiltonian, times: Sequence[float]
) -> list[ManyBodyState]:
    """exp(-i H t) |state> for each t, one eigendecomposition per sector."""
    if state.registry != h.registry:
        raise ValueError("state and Hamiltonian use different registries")
    registry = state.registry
    by_sector: dict[int, dict[int, complex]] = {}
    for key, amp in state.amplitudes.items():
        by_sector.setdefault(registry.total_number(key), {})[key] = amp

    decompositions = []
    for total, amps in sorted(by_sector.items()):
        sector = hamiltonian_matrix(h, total)
        index = {k: i for i, k in enumerate(sector.keys)}
        energies, vectors = np.linalg.eigh(sector.matrix)
        psi = np.zeros(sector.dimension, dtype=complex)
        for key, amp in amps.items():
            psi[index[key]] = amp
        coefficients = vectors.conj().T @ psi
        decompositions.append((sector.keys, energies, vectors, coefficients))

    out = []
    for t in times:
        amps: dict[int, complex] = {}
        for keys, energies, vectors, coefficients in decompositions:
            evolved = vectors @ (np.exp(-1j * energies * t) * coefficients)
            for row, key in enumerate(keys):
                value = complex(evolved[row])
                if abs(value) > 1e-15:
                    amps[key] = amps.get(key, 0.0) + value
        out.append(ManyBodyState(registry, amps, state.truncated))
    return out


def evolve(
    state: ManyBodyState, h: SecondQuantizedHamiltonian, t: float
) -> ManyBodyState:
    return evolve_many(state, h, [t])[0]


@dataclass
class ProperBasisReport:
    """Whether the one-body part is diagonal, and the fixing rotation if not."""

    proper: bool
    off_diagonal: float
    rotation: np.ndarray | None = None
    transformed: SecondQuantizedHamiltonian | None = None


def check_proper_basis(
    h: SecondQuantizedHamiltonian, tol: float = PROPER_TOL
) -> ProperBasisReport:
    """Diagonalize one_body + external and transform the two-body tensor.

    The rotation U satisfies T = U diag(e) U^dagger; new-basis operators
    are a^dagger_mu = sum_i U[i, mu] a^dagger_i, and the transformed
    tensor is V'_abcd = sum conj(U[i,a]) conj(U[j,b]) V_ijlm U[l,c] U[m,d].
    """
    t = h.total_one_body
    off = t - np.diag(np.diag(t))
    off_max = float(np.max(np.abs(off))) if off.size else 0.0
    if off_max <= tol:
        return ProperBasisReport(True, off_max)

    energies, rotation = np.linalg.eigh(t)
    m = len(h.registry)
    dense = np.zeros((m, m, m, m), dtype=complex)
    for (i, j, l, mm), v in h.two_body.items():
        dense[i, j, l, mm] = v
    transformed = np.einsum(
        "ia,jb,ijlm,lc,md->abcd",
        rotation.conj(),
        rotation.conj(),
        dense,
        rotation,
        rotation,
        optimize=True,
    )
    sparse: dict[TwoBodyKey, complex] = {}
    for idx in np.argwhere(np.abs(transformed) > TENSOR_PRUNE):
        key = tuple(int(x) for x in idx)
        sparse[key] = complex(transformed[key])
    new_h = SecondQuantizedHamiltonian(
        h.registry, np.diag(energies.astype(complex)), None, sparse
    )
    return ProperBasisReport(False, off_max, rotation, new_h)


# ---------------------------------------------------------------------------
# JSON interface


def _num(value) -> complex:
    if isinstance(value, (list, tuple)):
        re, im = value
        return complex(float(re), float(im))
    return complex(float(value), 0.0)


def _matrix_from_json(rows, m: int, name: str) -> np.ndarray:
    mat = np.zeros((m, m), dtype=complex)
    if len(rows) != m:
        raise ValueError(f"{name} must have {m} rows")
    for i, row in enumerate(rows):
        if len(row) != m:
            raise ValueError(f"{name} row {i} must have {m} entries")
        for j, value in enumerate(row):
            mat[i, j] = _num(value)
    return mat


def load_hamiltonian(source: str | Path | Mapping) -> SecondQuantizedHamiltonian:
    """Build a Hamiltonian (and its registry) from the JSON description.

    Schema: {"modes": [{"species", "momentum", "spin", "extra", "cutoff"}],
    "one_body": [[...]], "external": [[...]],
    "two_body": [{"ijlm": [i,j,l,m], "value": [re,im]}]}.
    Matrix entries are numbers or [re, im] pairs; "external" and
    "two_body" may be omitted.
    """
    if isinstance(source, (str, Path)):
        payload = json.loads(Path(source).read_text())
    else:
        payload = source
    labels = []
    cutoffs: dict[int, int] = {}
    for pos, spec in enumerate(payload["modes"]):
        species = Species(spec.get("species", "generic"))
        momentum = tuple(int(x) for x in spec.get("momentum", []))
        spin = Spin(spec.get("spin", "none"))
        extra = spec.get("extra")
        labels.append(ModeLabel(species, momentum, spin, extra))
        if species is Species.BOSON:
            cutoffs[pos] = int(spec.get("cutoff", 1))
    registry = registry_create(labels, cutoffs or None)
    m = len(registry)
    one_body = _matrix_from_json(payload["one_body"], m, "one_body")
    external = (
        _matrix_from_json(payload["external"], m, "external")
        if "external" in payload
        else None
    )
    two_body = {
        tuple(int(x) for x in entry["ijlm"]): _num(entry["value"])
        for entry in payload.get("two_body", [])
    }
    return SecondQuantizedHamiltonian(registry, one_body, external, two_body)
