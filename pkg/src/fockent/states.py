"""Constructors for the model states whose entanglement has closed form.

Covers filled Fermi seas, single electron-hole excitations (spinless
and spinful), coherent and number-projected pair-condensate states of
fermions (BCS-like), condensate-plus-pair-excitation states of bosons
(Bogoliubov-like, coherent and number-projected), uniform filled-level
superpositions, and one-particle superpositions.

Mode registries for paired states interleave the two members of each
pair, so pair blocks are contiguous: [k up, -k down, ...] for fermion
pairs and [condensate, q, -q, ...] for boson pairs.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import NormalizationError, TruncationError
from .fock_core import (
    ManyBodyState,
    ModeLabel,
    ModeRegistry,
    Momentum,
    Spin,
    _as_momentum,
    apply_creation,
    basis_state,
    boson,
    electron,
    hole,
    generic,
    negated,
    registry_create,
    superpose,
    vacuum_state,
)

PAIR_TAIL_TOL = 1e-14
COEFF_NORM_TOL = 1e-9
TABLE_NORM_TOL = 1e-12


class TableKind(Enum):
    BCS_G = "bcs_g"
    BOGOLIUBOV_C = "bogoliubov_c"
    BOGOLIUBOV_UV = "bogoliubov_uv"
    EXCITON_A = "exciton_A"


class ExcitonChannel(Enum):
    SPINLESS = "spinless"
    TRIPLET_UP = "triplet_up"
    TRIPLET_ZERO = "triplet_zero"
    TRIPLET_DOWN = "triplet_down"
    SINGLET = "singlet"


@dataclass(frozen=True)
class PairAmplitudeTable:
    """Pair-indexed amplitude collection with kind-specific invariants.

    Keys are momentum tuples (a (k, k') pair of tuples for exciton_A).
    Values are complex amplitudes; the bogoliubov_uv kind stores (u, v)
    pairs with |u|^2 - |v|^2 = 1 per mode.
    """

    kind: TableKind
    values: Mapping

    def __post_init__(self) -> None:
        canonical: dict = {}
        if self.kind is TableKind.EXCITON_A:
            total = 0.0
            for (k, kp), a in self.values.items():
                a = complex(a)
                canonical[(_as_momentum(k), _as_momentum(kp))] = a
                total += abs(a) ** 2
            if abs(total - 1.0) > TABLE_NORM_TOL:
                raise NormalizationError(
                    f"exciton amplitude table has squared sum {total}, expected 1"
                )
        elif self.kind is TableKind.BOGOLIUBOV_UV:
            for k, (u, v) in self.values.items():
                u, v = complex(u), complex(v)
                if abs(abs(u) ** 2 - abs(v) ** 2 - 1.0) > TABLE_NORM_TOL:
                    raise ValueError(
                        f"|u|^2 - |v|^2 = {abs(u)**2 - abs(v)**2} at {k}, expected 1"
                    )
                canonical[_as_momentum(k)] = (u, v)
        else:
            for k, a in self.values.items():
                a = complex(a)
                if self.kind is TableKind.BOGOLIUBOV_C and abs(a) >= 1.0:
                    raise ValueError(f"|c| = {abs(a)} at {k} must be below 1")
                canonical[_as_momentum(k)] = a
        object.__setattr__(self, "values", canonical)

    def pair_indices(self) -> list:
        return sorted(self.values.keys())

    def __len__(self) -> int:
        return len(self.values)


def _c2(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def table_payload(table: PairAmplitudeTable) -> dict:
    """JSON-ready form of a table: {"kind": ..., "entries": [...]}."""
    entries = []
    for key in table.pair_indices():
        value = table.values[key]
        if table.kind is TableKind.EXCITON_A:
            k, kp = key
            entries.append({"k": list(k), "kp": list(kp), "value": _c2(value)})
        elif table.kind is TableKind.BOGOLIUBOV_UV:
            u, v = value
            entries.append({"k": list(key), "u": _c2(u), "v": _c2(v)})
        else:
            entries.append({"k": list(key), "value": _c2(value)})
    return {"kind": table.kind.value, "entries": entries}


def save_amplitude_table(table: PairAmplitudeTable, path: str | Path) -> None:
    Path(path).write_text(json.dumps(table_payload(table), indent=2) + "\n")


def load_amplitude_table(source: str | Path | Mapping) -> PairAmplitudeTable:
    """Read a table from a JSON file path or an already-parsed mapping."""
    if isinstance(source, (str, Path)):
        payload = json.loads(Path(source).read_text())
    else:
        payload = source
    kind = TableKind(payload["kind"])
    values: dict = {}
    for entry in payload["entries"]:
        k = tuple(int(x) for x in entry["k"])
        if kind is TableKind.EXCITON_A:
            kp = tuple(int(x) for x in entry["kp"])
            re, im = entry["value"]
            values[(k, kp)] = complex(re, im)
        elif kind is TableKind.BOGOLIUBOV_UV:
            ur, ui = entry["u"]
            vr, vi = entry["v"]
            values[k] = (complex(ur, ui), complex(vr, vi))
        else:
            re, im = entry["value"]
            values[k] = complex(re, im)
    return PairAmplitudeTable(kind, values)


# ---------------------------------------------------------------------------
# registry builders


def bcs_registry(pair_momenta: Iterable[int | Sequence[int]]) -> ModeRegistry:
    """Fermion-pair registry [k up, -k down] per pair, in the given order."""
    labels = []
    for k in pair_momenta:
        k = _as_momentum(k)
        labels.append(electron(k, Spin.UP))
        labels.append(electron(negated(k), Spin.DOWN))
    return registry_create(labels)


def bogoliubov_registry(
    pair_momenta: Iterable[int | Sequence[int]],
    condensate_cutoff: int,
    pair_cutoff: int,
) -> ModeRegistry:
    """Boson registry [condensate, q, -q, ...] with per-group cutoffs."""
    labels = [boson(0)]
    cutoffs = [condensate_cutoff]
    for q in pair_momenta:
        q = _as_momentum(q)
        if all(x == 0 for x in q):
            raise ValueError("pair momenta must be nonzero; mode 0 is the condensate")
        labels.append(boson(q))
        labels.append(boson(negated(q)))
        cutoffs.extend([pair_cutoff, pair_cutoff])
    return registry_create(labels, cutoffs)


def exciton_registry(
    electron_momenta: Iterable[int | Sequence[int]],
    hole_momenta: Iterable[int | Sequence[int]],
    spinful: bool = False,
) -> ModeRegistry:
    """Electron modes followed by hole modes; spin-resolved when spinful."""
    labels = []
    for k in electron_momenta:
        if spinful:
            labels.append(electron(k, Spin.UP))
            labels.append(electron(k, Spin.DOWN))
        else:
            labels.append(electron(k))
    for kp in hole_momenta:
        if spinful:
            labels.append(hole(kp, Spin.UP))
            labels.append(hole(kp, Spin.DOWN))
        else:
            labels.append(hole(kp))
    return registry_create(labels)


def uniform_registry(num_modes: int) -> ModeRegistry:
    return registry_create([generic(i) for i in range(num_modes)])


# ---------------------------------------------------------------------------
# state constructors


def fermi_sea(registry: ModeRegistry, filled: Sequence[int]) -> ManyBodyState:
    """Single determinant with the given fermionic modes occupied."""
    filled = sorted(set(int(i) for i in filled))
    occupations = [0] * len(registry)
    for i in filled:
        if not registry.modes[i].fermionic:
            raise ValueError(f"mode {i} is bosonic; a filled sea needs fermionic modes")
        occupations[i] = 1
    return basis_state(registry, occupations)


def _single_pair_ket(
    registry: ModeRegistry, first: int, second: int
) -> ManyBodyState:
    # creation product first^dagger second^dagger on the vacuum
    return apply_creation(apply_creation(vacuum_state(registry), second), first)


def exciton_spinless(registry: ModeRegistry, table: PairAmplitudeTable) -> ManyBodyState:
    """Sum over (k, k') of A(k,k') e^dagger(k) h^dagger(k') on the vacuum."""
    if table.kind is not TableKind.EXCITON_A:
        raise ValueError(f"need an exciton_A table, got {table.kind.value}")
    terms = []
    for (k, kp) in table.pair_indices():
        a = table.values[(k, kp)]
        e_idx = registry.index_of(electron(k))
        h_idx = registry.index_of(hole(kp))
        terms.append((a, _single_pair_ket(registry, e_idx, h_idx)))
    return superpose(terms).normalize()


_SQRT_HALF = 1.0 / math.sqrt(2.0)

# (electron spin, hole spin, coefficient) branches per channel
_CHANNEL_BRANCHES = {
    ExcitonChannel.TRIPLET_UP: [(Spin.UP, Spin.UP, 1.0)],
    ExcitonChannel.TRIPLET_DOWN: [(Spin.DOWN, Spin.DOWN, 1.0)],
    ExcitonChannel.TRIPLET_ZERO: [
        (Spin.UP, Spin.DOWN, _SQRT_HALF),
        (Spin.DOWN, Spin.UP, -_SQRT_HALF),
    ],
    ExcitonChannel.SINGLET: [
        (Spin.UP, Spin.DOWN, _SQRT_HALF),
        (Spin.DOWN, Spin.UP, _SQRT_HALF),
    ],
}


def exciton_spinful(
    registry: ModeRegistry, table: PairAmplitudeTable, channel: ExcitonChannel
) -> ManyBodyState:
    """Spin-resolved electron-hole pair state in one spin channel.

    The mixed channels place the pair in (up, down) +/- (down, up)
    branches with weight 1/sqrt(2); the stretched channels use a single
    equal-spin branch and reduce to the spinless case.
    """
    if table.kind is not TableKind.EXCITON_A:
        raise ValueError(f"need an exciton_A table, got {table.kind.value}")
    if channel not in _CHANNEL_BRANCHES:
        raise ValueError(f"unknown spinful channel {channel}")
    terms = []
    for (k, kp) in table.pair_indices():
        a = table.values[(k, kp)]
        for e_spin, h_spin, weight in _CHANNEL_BRANCHES[channel]:
            e_idx = registry.index_of(electron(k, e_spin))
            h_idx = registry.index_of(hole(kp, h_spin))
            terms.append((a * weight, _single_pair_ket(registry, e_idx, h_idx)))
    return superpose(terms).normalize()


def _bcs_pair_modes(registry: ModeRegistry, k: Momentum) -> tuple[int, int]:
    return (
        registry.index_of(electron(k, Spin.UP)),
        registry.index_of(electron(negated(k), Spin.DOWN)),
    )


def bcs_unprojected(registry: ModeRegistry, table: PairAmplitudeTable) -> ManyBodyState:
    """Coherent pair state: normalized product of (1 + g_k P^dagger_k) on vacuum."""
    if table.kind is not TableKind.BCS_G:
        raise ValueError(f"need a bcs_g table, got {table.kind.value}")
    state = vacuum_state(registry)
    for k in table.pair_indices():
        up, down = _bcs_pair_modes(registry, k)
        paired = apply_creation(apply_creation(state, down), up)
        state = superpose([(1.0, state), (table.values[k], paired)])
    return state.normalize()


def bcs_projected(
    registry: ModeRegistry,
    table: PairAmplitudeTable,
    total_number: int,
    unpaired: int | Sequence[int] | None = None,
) -> ManyBodyState:
    """Fixed-N component of the coherent pair state.

    Sums prod(g) over unordered pair subsets of size N/2.  Odd N needs
    ``unpaired``: that (p, up) mode is occupied in every branch and its
    momentum is excluded from the pairing.
    """
    if table.kind is not TableKind.BCS_G:
        raise ValueError(f"need a bcs_g table, got {table.kind.value}")
    if total_number < 0:
        raise ValueError("total particle number must be nonnegative")
    if total_number % 2 == 1 and unpaired is None:
        raise ValueError("odd particle number requires an unpaired mode")
    if total_number % 2 == 0 and unpaired is not None:
        raise ValueError("unpaired mode given but the particle number is even")

    available = table.pair_indices()
    base = vacuum_state(registry)
    if unpaired is not None:
        p = _as_momentum(unpaired)
        base = apply_creation(base, registry.index_of(electron(p, Spin.UP)))
        available = [k for k in available if k != p]
    num_pairs = total_number // 2
    if num_pairs > len(available):
        raise ValueError(
            f"cannot place {num_pairs} pairs into {len(available)} available pair modes"
        )

    terms = []
    for chosen in itertools.combinations(available, num_pairs):
        coefficient = 1.0 + 0.0j
        ket = base
        for k in chosen:
            coefficient *= table.values[k]
            up, down = _bcs_pair_modes(registry, k)
            ket = apply_creation(apply_creation(ket, down), up)
        terms.append((coefficient, ket))
    combined = superpose(terms)
    if combined.is_zero:
        raise NormalizationError(
            "projected pair state vanishes; the amplitude table has no weight "
            f"on any {num_pairs}-pair subset"
        )
    return combined.normalize()


def default_pair_cutoff(ratio_magnitude: float, tol: float = PAIR_TAIL_TOL) -> int:
    """Smallest n with r^(2n) / (1 - r^2) below tol (at least 1)."""
    r = float(ratio_magnitude)
    if not 0.0 <= r < 1.0:
        raise ValueError(f"|v/u| must lie in [0, 1), got {r}")
    if r == 0.0:
        return 1
    n = 1
    scale = 1.0 / (1.0 - r * r)
    while (r ** (2 * n)) * scale >= tol:
        n += 1
    return n


def bogoliubov_truncation_bound(table: PairAmplitudeTable, cutoff: int) -> float:
    """Upper bound on the total squared weight dropped beyond the cutoff.

    Sum over pair modes of r^(2 (cutoff+1)) / (1 - r^2) with r = |v/u|.
    """
    if table.kind is not TableKind.BOGOLIUBOV_UV:
        raise ValueError(f"need a bogoliubov_uv table, got {table.kind.value}")
    bound = 0.0
    for u, v in table.values.values():
        r = abs(v / u)
        bound += (r ** (2 * (cutoff + 1))) / (1.0 - r * r)
    return bound


def bogoliubov_unprojected(
    registry: ModeRegistry,
    table: PairAmplitudeTable,
    cutoff: int | None = None,
) -> ManyBodyState:
    """Condensate with correlated (q, -q) pair excitations, no fixed N.

    Pair occupations carry amplitude prod (-v_q/u_q)^(n_q) up to the
    cutoff (auto-chosen so the dropped geometric tail is below 1e-14).
    The condensate factor is an equal-weight superposition of the even
    occupations the registry admits, so it stays unentangled and the
    state superposes even total numbers only.
    """
    if table.kind is not TableKind.BOGOLIUBOV_UV:
        raise ValueError(f"need a bogoliubov_uv table, got {table.kind.value}")
    condensate = registry.index_of(boson(0))
    pairs = []
    for q in table.pair_indices():
        u, v = table.values[q]
        ratio = -v / u
        r = abs(ratio)
        if r >= 1.0:
            raise ValueError(f"|v/u| = {r} at {q} must be below 1")
        n_max = cutoff if cutoff is not None else default_pair_cutoff(r)
        q_idx = registry.index_of(boson(q))
        nq_idx = registry.index_of(boson(negated(q)))
        mode_cut = min(registry.cutoffs[q_idx], registry.cutoffs[nq_idx])
        if n_max > mode_cut:
            raise TruncationError(
                f"pair cutoff {n_max} exceeds registry cutoff {mode_cut} at {q}"
            )
        pairs.append((q_idx, nq_idx, ratio, n_max))

    even_condensate = range(0, registry.cutoffs[condensate] + 1, 2)
    amplitudes: dict[tuple[int, ...], complex] = {}
    pair_ranges = [range(n_max + 1) for (_, _, _, n_max) in pairs]
    for n0 in even_condensate:
        for ns in itertools.product(*pair_ranges):
            occupations = [0] * len(registry)
            occupations[condensate] = n0
            amp = 1.0 + 0.0j
            for (q_idx, nq_idx, ratio, _), n in zip(pairs, ns):
                occupations[q_idx] = n
                occupations[nq_idx] = n
                amp *= ratio**n
            amplitudes[tuple(occupations)] = amp
    return ManyBodyState.from_amplitudes(registry, amplitudes, normalize=True)


def bogoliubov_projected(
    registry: ModeRegistry, table: PairAmplitudeTable, total_number: int
) -> ManyBodyState:
    """Fixed-N condensate state with pair excitations.

    Sums over occupation patterns (n0, n1, ..., nM) with n0 + sum nj =
    N/2: weight multinomial(N/2; pattern) * prod (-c_j)^(n_j) on the
    ket with 2 n0 condensate particles and n_j in modes q_j and -q_j.
    """
    if table.kind is not TableKind.BOGOLIUBOV_C:
        raise ValueError(f"need a bogoliubov_c table, got {table.kind.value}")
    if total_number % 2 != 0:
        raise ValueError("total particle number must be even")
    half = total_number // 2
    condensate = registry.index_of(boson(0))
    if registry.cutoffs[condensate] < total_number:
        raise TruncationError(
            f"condensate cutoff {registry.cutoffs[condensate]} below required {total_number}"
        )
    pair_modes = []
    for q in table.pair_indices():
        q_idx = registry.index_of(boson(q))
        nq_idx = registry.index_of(boson(negated(q)))
        if min(registry.cutoffs[q_idx], registry.cutoffs[nq_idx]) < half:
            raise TruncationError(
                f"pair cutoff at {q} below required {half}"
            )
        pair_modes.append((q_idx, nq_idx, table.values[q]))

    amplitudes: dict[tuple[int, ...], complex] = {}
    from .analytic import compositions, multinomial

    for pattern in compositions(half, 1 + len(pair_modes)):
        n0, rest = pattern[0], pattern[1:]
        occupations = [0] * len(registry)
        occupations[condensate] = 2 * n0
        amp = complex(multinomial(half, pattern))
        for (q_idx, nq_idx, c), n in zip(pair_modes, rest):
            occupations[q_idx] = n
            occupations[nq_idx] = n
            amp *= (-c) ** n
        if amp != 0:
            amplitudes[tuple(occupations)] = amp
    if not amplitudes:
        raise NormalizationError("projected condensate state vanishes")
    return ManyBodyState.from_amplitudes(registry, amplitudes, normalize=True)


def uniform_filling_state(
    registry: ModeRegistry, num_modes: int, num_filled: int
) -> ManyBodyState:
    """Equal-amplitude superposition of all C(M, K) fillings of M modes."""
    if not 0 <= num_filled <= num_modes:
        raise ValueError(f"cannot fill {num_filled} of {num_modes} modes")
    if num_modes > len(registry):
        raise ValueError(f"registry has only {len(registry)} modes")
    for i in range(num_modes):
        if not registry.modes[i].fermionic:
            raise ValueError(f"mode {i} is bosonic; uniform filling needs fermions")
    amplitudes = {}
    for filled in itertools.combinations(range(num_modes), num_filled):
        occupations = [0] * len(registry)
        for i in filled:
            occupations[i] = 1
        amplitudes[tuple(occupations)] = 1.0
    return ManyBodyState.from_amplitudes(registry, amplitudes, normalize=True)


def single_particle_superposition(
    registry: ModeRegistry, coefficients: Sequence[complex]
) -> ManyBodyState:
    """sum_i c_i |one particle in mode i> for normalized coefficients."""
    if len(coefficients) != len(registry):
        raise ValueError(
            f"{len(coefficients)} coefficients for registry of size {len(registry)}"
        )
    total = sum(abs(complex(c)) ** 2 for c in coefficients)
    if abs(total - 1.0) > COEFF_NORM_TOL:
        raise NormalizationError(f"coefficients have squared sum {total}, expected 1")
    amplitudes = {}
    for i, c in enumerate(coefficients):
        c = complex(c)
        if c == 0:
            continue
        occupations = [0] * len(registry)
        occupations[i] = 1
        amplitudes[tuple(occupations)] = c
    return ManyBodyState.from_amplitudes(registry, amplitudes, normalize=True)


def project_particle_number(state: ManyBodyState, total: int) -> ManyBodyState:
    """Renormalized restriction of a state to one total-number sector."""
    registry = state.registry
    kept = {
        k: a for k, a in state.amplitudes.items() if registry.total_number(k) == total
    }
    if not kept:
        raise NormalizationError(f"state has no amplitude in the N={total} sector")
    return ManyBodyState(registry, kept, state.truncated).normalize()


def total_spin_z_values(state: ManyBodyState) -> set[float]:
    """Distinct S_z = (1/2) sum (n_up - n_down) over the basis terms."""
    registry = state.registry
    out = set()
    for key in state.amplitudes:
        sz = 0.0
        for i, mode in enumerate(registry.modes):
            if mode.spin is Spin.UP:
                sz += 0.5 * registry.occupation_at(key, i)
            elif mode.spin is Spin.DOWN:
                sz -= 0.5 * registry.occupation_at(key, i)
        out.add(sz)
    return out


# ---------------------------------------------------------------------------
# random table generation (used by the command-line scenarios)


def random_exciton_table(
    electron_momenta: Sequence[Momentum],
    hole_momenta: Sequence[Momentum],
    rng: np.random.Generator,
) -> PairAmplitudeTable:
    """Random normalized A(k,k'): uniform magnitudes, uniform phases."""
    values = {}
    for k in electron_momenta:
        for kp in hole_momenta:
            mag = rng.uniform(0.1, 1.0)
            phase = rng.uniform(0.0, 2.0 * math.pi)
            values[(k, kp)] = mag * complex(math.cos(phase), math.sin(phase))
    norm = math.sqrt(sum(abs(v) ** 2 for v in values.values()))
    values = {key: v / norm for key, v in values.items()}
    return PairAmplitudeTable(TableKind.EXCITON_A, values)


def random_bcs_table(
    pair_momenta: Sequence[Momentum],
    rng: np.random.Generator,
    magnitude_range: tuple[float, float] = (0.2, 2.0),
) -> PairAmplitudeTable:
    values = {}
    for k in pair_momenta:
        mag = rng.uniform(*magnitude_range)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        values[k] = mag * complex(math.cos(phase), math.sin(phase))
    return PairAmplitudeTable(TableKind.BCS_G, values)


def random_bogoliubov_c_table(
    pair_momenta: Sequence[Momentum],
    rng: np.random.Generator,
    magnitude_range: tuple[float, float] = (0.1, 0.6),
) -> PairAmplitudeTable:
    values = {}
    for q in pair_momenta:
        mag = rng.uniform(*magnitude_range)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        values[q] = mag * complex(math.cos(phase), math.sin(phase))
    return PairAmplitudeTable(TableKind.BOGOLIUBOV_C, values)


def random_uv_table(
    pair_momenta: Sequence[Momentum],
    rng: np.random.Generator,
    ratio_range: tuple[float, float] = (0.1, 0.8),
) -> PairAmplitudeTable:
    """Random (u, v) with |u|^2 - |v|^2 = 1 and |v/u| in ratio_range."""
    values = {}
    for q in pair_momenta:
        r = rng.uniform(*ratio_range)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        u = complex(1.0 / math.sqrt(1.0 - r * r), 0.0)
        v = r * u * complex(math.cos(phase), math.sin(phase))
        values[q] = (u, v)
    return PairAmplitudeTable(TableKind.BOGOLIUBOV_UV, values)
