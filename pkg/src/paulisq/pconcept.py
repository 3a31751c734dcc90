"""States as p-concepts over measurement distributions.

A state rho is identified with the conditional mean function
f_rho(E) = 2 tr(E rho) - 1 of its +-1 measurement outcomes.  This module
evaluates f, samples outcomes, and computes inner products / squared losses
between two states' p-concepts, either exactly (rational arithmetic on the
stabilizer fast paths, closed forms elsewhere) or by seeded Monte Carlo.

Supported states: stabilizer pure states, products of single-qubit Bloch
vectors, and the maximally mixed state.  Supported measurements: Pauli
effects (I+P)/2 and single-qubit projectors embedded in identities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .pauli import DimensionMismatch, PauliMeasurement, PauliOperator, pauli_trace_sign
from .stabilizer import StabilizerGroup

EXACT_PAULI_ENUMERATION_LIMIT = 6


class ExactUnavailable(RuntimeError):
    """Exact evaluation was requested where no exact path exists."""


# ---------------------------------------------------------------------------
# states


@dataclass(frozen=True)
class BlochVector:
    """A point in the closed unit ball: the state (I + xX + yY + zZ)/2."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.norm() > 1 + 1e-12:
            raise ValueError(f"Bloch vector has norm {self.norm()} > 1")

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def dot(self, other: "BlochVector") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    @classmethod
    def from_iterable(cls, coords) -> "BlochVector":
        x, y, z = coords
        return cls(float(x), float(y), float(z))


ZERO_BLOCH = BlochVector(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class StabilizerState:
    group: StabilizerGroup

    @property
    def n(self) -> int:
        return self.group.n


@dataclass(frozen=True)
class ProductState:
    blochs: tuple[BlochVector, ...]

    def __post_init__(self):
        if not self.blochs:
            raise ValueError("product state needs at least one qubit")

    @property
    def n(self) -> int:
        return len(self.blochs)


@dataclass(frozen=True)
class MaximallyMixed:
    n: int


QuantumState = Union[StabilizerState, ProductState, MaximallyMixed]


# ---------------------------------------------------------------------------
# measurements


@dataclass(frozen=True)
class SingleQubitProjector:
    """Projector onto the pure qubit state at `axis` on one qubit, I elsewhere."""

    n: int
    qubit: int
    axis: BlochVector

    def __post_init__(self):
        if not 0 <= self.qubit < self.n:
            raise ValueError(f"qubit {self.qubit} out of range for n={self.n}")
        if abs(self.axis.norm() - 1.0) > 1e-12:
            raise ValueError(f"projector axis must be unit length, got norm {self.axis.norm()}")


Measurement = Union[PauliMeasurement, SingleQubitProjector]


def parity_measurement(x: int, n: int) -> PauliMeasurement:
    """The effect accepting |y> with probability x.y mod 2.

    Built from the signed Pauli -Z^x (Z on the support of x), so that the
    acceptance probability on a basis state is exactly the parity bit.
    """
    if x >> n:
        raise ValueError(f"parity index {x} exceeds {n} bits")
    return PauliMeasurement(PauliOperator(n, -1, 0, x))


def parity_index(e: PauliMeasurement) -> int:
    """Recover x from a parity measurement; inverse of parity_measurement."""
    p = e.pauli
    if p.sign != -1 or p.x != 0:
        raise ValueError(f"{e} is not a parity measurement")
    return p.z


# ---------------------------------------------------------------------------
# distributions


@dataclass(frozen=True)
class UniformPauli:
    """Uniform over all 2*4^n Pauli effects (I+P)/2, including E=0 and E=I."""

    n: int

    def support(self):
        weight = Fraction(1, 2 * 4**self.n)
        for sign in (1, -1):
            for x in range(1 << self.n):
                for z in range(1 << self.n):
                    yield PauliMeasurement(PauliOperator(self.n, sign, x, z)), weight

    def sample(self, rng) -> PauliMeasurement:
        sign = 1 if rng.integers(0, 2) == 0 else -1
        x = int(rng.integers(0, 1 << self.n))
        z = int(rng.integers(0, 1 << self.n))
        return PauliMeasurement(PauliOperator(self.n, sign, x, z))


@dataclass(frozen=True)
class UniformParity:
    """Uniform over the 2^n parity measurements E_x, x = 0 included."""

    n: int

    def support(self):
        weight = Fraction(1, 2**self.n)
        for x in range(1 << self.n):
            yield parity_measurement(x, self.n), weight

    def sample(self, rng) -> PauliMeasurement:
        return parity_measurement(int(rng.integers(0, 1 << self.n)), self.n)


@dataclass(frozen=True)
class HaarSingleQubitProduct:
    """Pick a qubit uniformly, project it onto a Haar-random pure qubit state."""

    n: int

    def sample(self, rng) -> SingleQubitProjector:
        qubit = int(rng.integers(0, self.n))
        return SingleQubitProjector(self.n, qubit, BlochVector.from_iterable(_sphere_point(rng)))


@dataclass(frozen=True)
class FiniteWeighted:
    """An explicit finite distribution over measurements."""

    items: tuple[tuple[Measurement, object], ...]

    def __post_init__(self):
        total = sum(Fraction(w) if not isinstance(w, float) else w for _, w in self.items)
        if abs(float(total) - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {float(total)}, not 1")

    @property
    def n(self) -> int:
        return self.items[0][0].n

    def support(self):
        yield from self.items

    def sample(self, rng):
        threshold = rng.random()
        acc = 0.0
        for measurement, weight in self.items:
            acc += float(weight)
            if threshold < acc:
                return measurement
        return self.items[-1][0]


MeasurementDistribution = Union[UniformPauli, UniformParity, HaarSingleQubitProduct, FiniteWeighted]


def _sphere_point(rng) -> tuple[float, float, float]:
    # area-uniform: azimuth uniform on [0, 2pi), cos(polar) uniform on [-1, 1]
    cos_theta = rng.uniform(-1.0, 1.0)
    phi = rng.uniform(0.0, 2.0 * math.pi)
    sin_theta = math.sqrt(max(0.0, 1.0 - cos_theta * cos_theta))
    return (math.cos(phi) * sin_theta, math.sin(phi) * sin_theta, cos_theta)


def distribution_support(d: MeasurementDistribution):
    """(measurement, weight) pairs for finite distributions; error otherwise."""
    if isinstance(d, (UniformParity, FiniteWeighted)):
        return list(d.support())
    if isinstance(d, UniformPauli):
        if d.n > EXACT_PAULI_ENUMERATION_LIMIT:
            raise ExactUnavailable(
                f"uniform Pauli support has 2*4^{d.n} elements, over the enumeration budget"
            )
        return list(d.support())
    raise ExactUnavailable(f"{type(d).__name__} has no finite support")


# ---------------------------------------------------------------------------
# f_rho evaluation


def _check_dims(state: QuantumState, e: Measurement):
    if state.n != e.n:
        raise DimensionMismatch(f"state on {state.n} qubits, measurement on {e.n}")


def reduced_bloch(state: QuantumState, qubit: int) -> tuple:
    """Bloch vector of the reduced single-qubit state; exact ints for stabilizers."""
    if isinstance(state, MaximallyMixed):
        return (0, 0, 0)
    if isinstance(state, ProductState):
        return state.blochs[qubit].as_tuple()
    return tuple(
        state.group.trace_pauli(PauliOperator.single(state.n, qubit, kind))
        for kind in ("X", "Y", "Z")
    )


def _product_pauli_trace(state: ProductState, p: PauliOperator) -> float:
    value = float(p.sign)
    for i, b in enumerate(state.blochs):
        kind = p.kind(i)
        if kind == "I":
            continue
        value *= getattr(b, kind.lower())
        if value == 0.0:
            return 0.0
    return value


def f_value(state: QuantumState, e: Measurement):
    """f_rho(E) = 2 tr(E rho) - 1, exact Fraction where the state allows it."""
    _check_dims(state, e)
    if isinstance(e, PauliMeasurement):
        p = e.pauli
        if isinstance(state, StabilizerState):
            return Fraction(state.group.trace_pauli(p))
        if isinstance(state, MaximallyMixed):
            return Fraction(pauli_trace_sign(p), 2**state.n)
        return _product_pauli_trace(state, p)
    bloch = reduced_bloch(state, e.qubit)
    u = e.axis
    return u.x * bloch[0] + u.y * bloch[1] + u.z * bloch[2]


def acceptance_probability(state: QuantumState, e: Measurement):
    f = f_value(state, e)
    if isinstance(f, Fraction):
        return (1 + f) / 2
    return (1.0 + f) / 2.0


def sample_outcome(state: QuantumState, e: Measurement, rng) -> int:
    """One +-1 measurement outcome: +1 with probability tr(E rho)."""
    return 1 if rng.random() < float(acceptance_probability(state, e)) else -1


# ---------------------------------------------------------------------------
# inner products and losses


class Exact:
    """Marker requesting exact evaluation."""

    def __repr__(self):
        return "Exact()"


EXACT = Exact()


@dataclass(frozen=True)
class MonteCarlo:
    samples: int
    seed: int


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    std_error: float
    samples: int

    def __float__(self) -> float:
        return self.value


def _bloch_matrix(state: QuantumState) -> np.ndarray:
    return np.array([reduced_bloch(state, i) for i in range(state.n)], dtype=float)


def _check_state_dims(rho: QuantumState, sigma: QuantumState):
    if rho.n != sigma.n:
        raise DimensionMismatch(f"states on {rho.n} and {sigma.n} qubits")


def _exact_inner(rho: QuantumState, sigma: QuantumState, d: MeasurementDistribution):
    n = rho.n
    if isinstance(d, HaarSingleQubitProduct):
        # E_u[(u.a)(u.b)] = a.b/3 per qubit, so <f,g> = sum_i a_i.b_i / (3n)
        total = sum(
            sum(a * b for a, b in zip(reduced_bloch(rho, i), reduced_bloch(sigma, i)))
            for i in range(n)
        )
        if isinstance(total, int):
            return Fraction(total, 3 * n)
        return total / (3.0 * n)
    if isinstance(d, UniformPauli):
        if isinstance(rho, MaximallyMixed) or isinstance(sigma, MaximallyMixed):
            # f of the mixed state vanishes except at E=0 and E=I, where every
            # state's f is -1 and +1; those two atoms contribute 2/(2*4^n)
            return Fraction(1, 4**n)
        if isinstance(rho, StabilizerState) and isinstance(sigma, StabilizerState):
            from .stabilizer import signed_intersection_counts

            plus, minus = signed_intersection_counts(rho.group, sigma.group)
            return Fraction(plus - minus, 4**n)
    total = None
    for e, w in distribution_support(d):
        term = w * f_value(rho, e) * f_value(sigma, e)
        total = term if total is None else total + term
    return total


def _mc_f_arrays(rho, sigma, d, mode):
    rng = np.random.default_rng(np.random.SeedSequence(mode.seed))
    m = mode.samples
    if isinstance(d, HaarSingleQubitProduct):
        qubits = rng.integers(0, d.n, size=m)
        cos_t = rng.uniform(-1.0, 1.0, size=m)
        phi = rng.uniform(0.0, 2.0 * math.pi, size=m)
        sin_t = np.sqrt(np.clip(1.0 - cos_t**2, 0.0, None))
        u = np.stack([np.cos(phi) * sin_t, np.sin(phi) * sin_t, cos_t], axis=1)
        fr = np.einsum("ij,ij->i", u, _bloch_matrix(rho)[qubits])
        fs = np.einsum("ij,ij->i", u, _bloch_matrix(sigma)[qubits])
        return fr, fs
    fr = np.empty(m)
    fs = np.empty(m)
    for k in range(m):
        e = d.sample(rng)
        fr[k] = float(f_value(rho, e))
        fs[k] = float(f_value(sigma, e))
    return fr, fs


def _mc_estimate(values: np.ndarray) -> MonteCarloEstimate:
    m = len(values)
    std = float(values.std(ddof=1)) if m > 1 else 0.0
    return MonteCarloEstimate(float(values.mean()), std / math.sqrt(m), m)


def inner_product(rho: QuantumState, sigma: QuantumState, d: MeasurementDistribution, mode=EXACT):
    """<f_rho, f_sigma>_D = E_{E~D}[f_rho(E) f_sigma(E)].

    Exact mode uses the stabilizer intersection fast path under uniform Pauli
    measurements, the per-qubit closed form under Haar product measurements,
    and support enumeration for finite distributions.  Monte Carlo mode
    returns a seeded estimate with its standard error.
    """
    _check_state_dims(rho, sigma)
    if isinstance(mode, Exact):
        return _exact_inner(rho, sigma, d)
    fr, fs = _mc_f_arrays(rho, sigma, d, mode)
    return _mc_estimate(fr * fs)


def squared_loss(rho: QuantumState, sigma: QuantumState, d: MeasurementDistribution, mode=EXACT):
    """||f_rho - f_sigma||^2_D, the squared loss of sigma as a hypothesis for rho.

    Under Haar single-qubit measurements this reduces per qubit to
    |a_i - b_i|^2 / (3n), equivalently (4/3n) * trace-distance^2.
    """
    _check_state_dims(rho, sigma)
    if isinstance(mode, Exact):
        if isinstance(d, HaarSingleQubitProduct):
            total = None
            for i in range(rho.n):
                a = reduced_bloch(rho, i)
                b = reduced_bloch(sigma, i)
                term = sum((ai - bi) ** 2 for ai, bi in zip(a, b))
                total = term if total is None else total + term
            if isinstance(total, int):
                return Fraction(total, 3 * rho.n)
            return total / (3.0 * rho.n)
        parts = [
            _exact_inner(rho, rho, d),
            _exact_inner(sigma, sigma, d),
            _exact_inner(rho, sigma, d),
        ]
        return parts[0] + parts[1] - 2 * parts[2]
    fr, fs = _mc_f_arrays(rho, sigma, d, mode)
    return _mc_estimate((fr - fs) ** 2)
