"""Occupation-number representation of many-body states.

A state lives over an ordered registry of modes.  Each mode is either
fermionic (occupation 0 or 1) or bosonic (occupation 0..cutoff).  Basis
vectors are occupation vectors (n_0, ..., n_{M-1}) understood as the
ordered product of creation operators, ascending registry index, acting
on the vacuum.  Amplitudes are stored sparsely in a dict keyed by a
mixed-radix packing of the occupation vector, so a fermion-only registry
degenerates to a plain bitmask.

Sign convention: applying a fermionic creation or annihilation operator
at mode i picks up (-1)**(number of occupied fermionic modes with
registry index below i).  The count runs over fermionic modes of every
species; bosonic occupations never contribute a sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    DuplicateModeError,
    NormalizationError,
    RegistryMismatchError,
)

PRUNE_TOL = 1e-15

Momentum = tuple[int, ...]
OccupationVector = tuple[int, ...]


class Species(Enum):
    ELECTRON = "electron"
    HOLE = "hole"
    BOSON = "boson"
    GENERIC = "generic"

    @property
    def fermionic(self) -> bool:
        return self is not Species.BOSON


class Spin(Enum):
    UP = "up"
    DOWN = "down"
    NONE = "none"


def _as_momentum(k: int | Sequence[int]) -> Momentum:
    if isinstance(k, int):
        return (k,)
    return tuple(int(x) for x in k)


@dataclass(frozen=True)
class ModeLabel:
    """Identity of a single mode: species, momentum index, spin, extra tag."""

    species: Species
    momentum: Momentum = ()
    spin: Spin = Spin.NONE
    extra: int | None = None

    @property
    def fermionic(self) -> bool:
        return self.species.fermionic

    def __str__(self) -> str:
        parts = [self.species.value, ",".join(str(x) for x in self.momentum) or "-"]
        if self.spin is not Spin.NONE:
            parts.append(self.spin.value)
        if self.extra is not None:
            parts.append(f"x{self.extra}")
        return ":".join(parts)


def electron(k: int | Sequence[int], spin: Spin = Spin.NONE) -> ModeLabel:
    return ModeLabel(Species.ELECTRON, _as_momentum(k), spin)


def hole(k: int | Sequence[int], spin: Spin = Spin.NONE) -> ModeLabel:
    return ModeLabel(Species.HOLE, _as_momentum(k), spin)


def boson(k: int | Sequence[int]) -> ModeLabel:
    return ModeLabel(Species.BOSON, _as_momentum(k))


def generic(i: int | Sequence[int]) -> ModeLabel:
    return ModeLabel(Species.GENERIC, _as_momentum(i))


def negated(k: Momentum) -> Momentum:
    return tuple(-x for x in k)


@dataclass(frozen=True)
class ModeRegistry:
    """Ordered, immutable collection of distinct mode labels.

    ``cutoffs[i]`` is the largest allowed occupation of mode i; it is 1
    for every fermionic mode.  Derived packing data (radices, strides)
    is precomputed once.
    """

    modes: tuple[ModeLabel, ...]
    cutoffs: tuple[int, ...]
    _strides: tuple[int, ...] = field(init=False, repr=False, compare=False)
    _index: dict = field(init=False, repr=False, compare=False)
    _fermionic: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.modes) != len(self.cutoffs):
            raise ValueError("modes and cutoffs length mismatch")
        index: dict[ModeLabel, int] = {}
        for i, label in enumerate(self.modes):
            if label in index:
                raise DuplicateModeError(f"duplicate mode label {label}")
            index[label] = i
        for i, c in enumerate(self.cutoffs):
            if self.modes[i].fermionic and c != 1:
                raise ValueError(f"fermionic mode {self.modes[i]} must have cutoff 1")
            if not self.modes[i].fermionic and c < 1:
                raise ValueError(f"bosonic mode {self.modes[i]} needs cutoff >= 1")
        strides = []
        acc = 1
        for c in self.cutoffs:
            strides.append(acc)
            acc *= c + 1
        object.__setattr__(self, "_strides", tuple(strides))
        object.__setattr__(self, "_index", index)
        object.__setattr__(
            self, "_fermionic", tuple(i for i, m in enumerate(self.modes) if m.fermionic)
        )

    def __len__(self) -> int:
        return len(self.modes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModeRegistry):
            return NotImplemented
        return self.modes == other.modes and self.cutoffs == other.cutoffs

    def __hash__(self) -> int:
        return hash((self.modes, self.cutoffs))

    def index_of(self, label: ModeLabel) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"mode {label} not in registry") from None

    def radix(self, i: int) -> int:
        return self.cutoffs[i] + 1

    @property
    def fermionic_indices(self) -> tuple[int, ...]:
        return self._fermionic

    def full_dimension(self) -> int:
        return math.prod(c + 1 for c in self.cutoffs)

    def pack(self, occupations: Sequence[int]) -> int:
        self.validate_occupations(occupations)
        return sum(n * s for n, s in zip(occupations, self._strides))

    def unpack(self, key: int) -> OccupationVector:
        out = []
        for c in self.cutoffs:
            key, n = divmod(key, c + 1)
            out.append(n)
        return tuple(out)

    def occupation_at(self, key: int, i: int) -> int:
        return (key // self._strides[i]) % (self.cutoffs[i] + 1)

    def validate_occupations(self, occupations: Sequence[int]) -> None:
        if len(occupations) != len(self.modes):
            raise ValueError(
                f"occupation vector length {len(occupations)} != registry size {len(self.modes)}"
            )
        for i, n in enumerate(occupations):
            if not 0 <= n <= self.cutoffs[i]:
                raise ValueError(
                    f"occupation {n} out of range [0, {self.cutoffs[i]}] at mode {i}"
                )

    def total_number(self, key: int) -> int:
        return sum(self.unpack(key))


def registry_create(
    labels: Iterable[ModeLabel],
    cutoffs: int | Sequence[int] | Mapping[int, int] | None = None,
) -> ModeRegistry:
    """Build a registry.  ``cutoffs`` applies to bosonic modes only.

    Accepts a single int (shared by all bosonic modes), a sequence
    aligned with the bosonic modes in registry order, or a mapping from
    registry position to cutoff.
    """
    labels = tuple(labels)
    bosonic = [i for i, m in enumerate(labels) if not m.fermionic]
    per_mode = [1] * len(labels)
    if bosonic:
        if cutoffs is None:
            raise ValueError("registry has bosonic modes but no cutoffs were given")
        if isinstance(cutoffs, int):
            values = {i: cutoffs for i in bosonic}
        elif isinstance(cutoffs, Mapping):
            values = {i: int(cutoffs[i]) for i in bosonic}
        else:
            seq = list(cutoffs)
            if len(seq) != len(bosonic):
                raise ValueError(
                    f"{len(bosonic)} bosonic modes but {len(seq)} cutoffs given"
                )
            values = dict(zip(bosonic, (int(c) for c in seq)))
        for i, c in values.items():
            per_mode[i] = c
    return ModeRegistry(labels, tuple(per_mode))


@dataclass(eq=False)
class ManyBodyState:
    """Sparse amplitude table over occupation-number basis vectors.

    Treat instances as immutable: every operation returns a new state.
    ``truncated`` records that some amplitude was dropped at a bosonic
    cutoff while the state was being built.
    """

    registry: ModeRegistry
    amplitudes: dict[int, complex]
    truncated: bool = False

    @classmethod
    def from_amplitudes(
        cls,
        registry: ModeRegistry,
        mapping: Mapping[Sequence[int], complex],
        normalize: bool = False,
    ) -> "ManyBodyState":
        amps: dict[int, complex] = {}
        for occ, a in mapping.items():
            key = registry.pack(tuple(occ))
            amps[key] = amps.get(key, 0.0) + complex(a)
        state = cls(registry, _pruned(amps))
        return state.normalize() if normalize else state

    def amplitude(self, occupations: Sequence[int]) -> complex:
        return self.amplitudes.get(self.registry.pack(tuple(occupations)), 0.0)

    def items(self) -> Iterator[tuple[OccupationVector, complex]]:
        for key, a in self.amplitudes.items():
            yield self.registry.unpack(key), a

    @property
    def num_terms(self) -> int:
        return len(self.amplitudes)

    @property
    def is_zero(self) -> bool:
        return not self.amplitudes

    def norm(self) -> float:
        return math.sqrt(sum((a.real * a.real + a.imag * a.imag) for a in self.amplitudes.values()))

    def normalize(self) -> "ManyBodyState":
        n = self.norm()
        if n == 0.0:
            raise NormalizationError("cannot normalize a zero state")
        inv = 1.0 / n
        return ManyBodyState(
            self.registry,
            _pruned({k: a * inv for k, a in self.amplitudes.items()}),
            self.truncated,
        )

    def particle_numbers(self) -> set[int]:
        return {self.registry.total_number(k) for k in self.amplitudes}


def vacuum_state(registry: ModeRegistry) -> ManyBodyState:
    return ManyBodyState(registry, {0: 1.0 + 0.0j})


def basis_state(registry: ModeRegistry, occupations: Sequence[int]) -> ManyBodyState:
    return ManyBodyState(registry, {registry.pack(tuple(occupations)): 1.0 + 0.0j})


def _pruned(amps: dict[int, complex]) -> dict[int, complex]:
    return {k: a for k, a in amps.items() if abs(a) > PRUNE_TOL}


def _fermionic_sign(registry: ModeRegistry, key: int, mode: int) -> float:
    # parity of occupied fermionic modes strictly below `mode`
    count = 0
    for j in registry.fermionic_indices:
        if j >= mode:
            break
        count += registry.occupation_at(key, j)
    return -1.0 if count & 1 else 1.0


def creation_kernel(
    registry: ModeRegistry, key: int, mode: int
) -> tuple[int, complex] | None:
    """Apply a creation operator to one basis key.

    Returns (new_key, factor), or None when the result vanishes or the
    bosonic cutoff is exceeded.
    """
    stride = registry._strides[mode]
    cutoff = registry.cutoffs[mode]
    n = (key // stride) % (cutoff + 1)
    if registry.modes[mode].fermionic:
        if n == 1:
            return None
        return key + stride, _fermionic_sign(registry, key, mode)
    if n == cutoff:
        return None
    return key + stride, math.sqrt(n + 1)


def annihilation_kernel(
    registry: ModeRegistry, key: int, mode: int
) -> tuple[int, complex] | None:
    """Adjoint of :func:`creation_kernel` on one basis key."""
    stride = registry._strides[mode]
    cutoff = registry.cutoffs[mode]
    n = (key // stride) % (cutoff + 1)
    if n == 0:
        return None
    if registry.modes[mode].fermionic:
        return key - stride, _fermionic_sign(registry, key, mode)
    return key - stride, math.sqrt(n)


def apply_creation(state: ManyBodyState, mode: int) -> ManyBodyState:
    """Return a^dagger_mode |state>, unnormalized.

    Fermionic branches already occupied vanish.  Bosonic branches at the
    cutoff are dropped and flagged via ``truncated``.
    """
    registry = state.registry
    out: dict[int, complex] = {}
    truncated = state.truncated
    bosonic = not registry.modes[mode].fermionic
    for key, amp in state.amplitudes.items():
        hit = creation_kernel(registry, key, mode)
        if hit is None:
            if bosonic:
                truncated = True
            continue
        new_key, factor = hit
        out[new_key] = out.get(new_key, 0.0) + amp * factor
    return ManyBodyState(registry, _pruned(out), truncated)


def apply_annihilation(state: ManyBodyState, mode: int) -> ManyBodyState:
    """Return a_mode |state>, unnormalized."""
    registry = state.registry
    out: dict[int, complex] = {}
    for key, amp in state.amplitudes.items():
        hit = annihilation_kernel(registry, key, mode)
        if hit is None:
            continue
        new_key, factor = hit
        out[new_key] = out.get(new_key, 0.0) + amp * factor
    return ManyBodyState(registry, _pruned(out), state.truncated)


def inner_product(bra: ManyBodyState, ket: ManyBodyState) -> complex:
    """<bra|ket> with the bra amplitudes conjugated."""
    if bra.registry != ket.registry:
        raise RegistryMismatchError("inner product between different registries")
    small, large = bra.amplitudes, ket.amplitudes
    if len(small) <= len(large):
        return sum(a.conjugate() * large[k] for k, a in small.items() if k in large)
    return sum(small[k].conjugate() * a for k, a in large.items() if k in small)


def number_expectation(state: ManyBodyState, mode: int) -> float:
    """<n_mode> for a normalized state."""
    registry = state.registry
    return sum(
        registry.occupation_at(key, mode) * (a.real * a.real + a.imag * a.imag)
        for key, a in state.amplitudes.items()
    )


def superpose(terms: Sequence[tuple[complex, ManyBodyState]]) -> ManyBodyState:
    """Linear combination sum(c * state), pruned, unnormalized."""
    if not terms:
        raise ValueError("superpose needs at least one term")
    registry = terms[0][1].registry
    out: dict[int, complex] = {}
    truncated = False
    for coef, state in terms:
        if state.registry != registry:
            raise RegistryMismatchError("superpose over different registries")
        truncated = truncated or state.truncated
        for key, amp in state.amplitudes.items():
            out[key] = out.get(key, 0.0) + coef * amp
    return ManyBodyState(registry, _pruned(out), truncated)


def enumerate_sector(registry: ModeRegistry, total: int) -> list[OccupationVector]:
    """All occupation vectors with the given total particle number.

    Deterministic order: lexicographic with mode 0 most significant.
    """
    out: list[OccupationVector] = []
    cutoffs = registry.cutoffs
    M = len(cutoffs)
    suffix_max = [0] * (M + 1)
    for i in range(M - 1, -1, -1):
        suffix_max[i] = suffix_max[i + 1] + cutoffs[i]

    def rec(i: int, remaining: int, prefix: list[int]) -> None:
        if i == M:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        if remaining > suffix_max[i]:
            return
        for n in range(0, min(cutoffs[i], remaining) + 1):
            prefix.append(n)
            rec(i + 1, remaining - n, prefix)
            prefix.pop()

    rec(0, total, [])
    return out


def sector_dimension(registry: ModeRegistry, total: int) -> int:
    """Count of occupation vectors with the given total, without materializing."""
    ways = [1] + [0] * total
    for c in registry.cutoffs:
        new = [0] * (total + 1)
        for r in range(total + 1):
            w = ways[r]
            if w:
                for n in range(0, min(c, total - r) + 1):
                    new[r + n] += w
        ways = new
    return ways[total]
