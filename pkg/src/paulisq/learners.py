"""Learning algorithms driven by the statistical-query oracle.

The product-state learner estimates every Bloch coordinate of every qubit
with one sign-threshold query each (3n queries total) under the
pick-a-qubit, Haar-random-projector measurement distribution.  The
basis-state learner is its n-query specialization with a decision margin
wide enough to survive worst-case within-tolerance answers.

The parity side: a planted learning-parity-with-noise instance maps
bijectively onto labeled parity measurements of a computational basis state,
and is solved by GF(2) Gaussian elimination (noiseless) or an exhaustive
maximum-likelihood sweep (noisy, small n) as the classical baselines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .pauli import PauliMeasurement
from .pconcept import (
    BlochVector,
    HaarSingleQubitProduct,
    MonteCarloEstimate,
    ProductState,
    QuantumState,
    SingleQubitProjector,
    StabilizerState,
    parity_index,
    parity_measurement,
)
from .oracle import SQQuery
from .stabilizer import StabilizerGroup


class PromiseViolation(RuntimeError):
    """An oracle answer landed in the dead zone the promise rules out."""


class InconsistentSystem(ValueError):
    """The linear system has no solution over GF(2)."""


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class LearnedHypothesis:
    state: QuantumState
    queries_used: int
    transcript: Optional[list] = None


def normalize_if_outside(x: float, y: float, z: float) -> tuple[float, float, float]:
    """Project a coordinate estimate radially onto the unit sphere if it left
    the ball; for any true point inside the ball this never increases the
    distance to the estimate."""
    r = math.sqrt(x * x + y * y + z * z)
    if r > 1.0:
        return (x / r, y / r, z / r)
    return (x, y, z)


def _axis_sign_query(qubit: int, axis: int):
    """phi(E, Y) = sgn(component `axis` of the projector on `qubit`) * Y.

    This is the sign of 2^{1-n} tr(E (I x ... x (I+P_axis)/2 x ... x I)) - 1/2
    evaluated directly on the sampled projector: measurements on other qubits
    contribute exactly 1/2 and score zero.
    """

    def phi(e, y: int) -> float:
        if isinstance(e, SingleQubitProjector) and e.qubit == qubit:
            component = e.axis.as_tuple()[axis]
            if component > 0:
                return float(y)
            if component < 0:
                return float(-y)
        return 0.0

    return phi


def _require_haar(oracle) -> int:
    d = oracle.distribution
    if not isinstance(d, HaarSingleQubitProduct):
        raise ValueError(
            f"learner needs the Haar single-qubit product distribution, got {type(d).__name__}"
        )
    return d.n


def learn_product_state(oracle, epsilon: float, tau: Optional[float] = None) -> LearnedHypothesis:
    """Learn a product state to squared loss epsilon with exactly 3n queries.

    A clean answer to the (qubit i, axis j) query equals tr(P_j rho_i)/(2n),
    so each Bloch coordinate is 2n times the answer.  Queries are issued at
    tolerance sqrt(eps)/(2n): half the headline sqrt(eps)/n, so that the
    factor-2n coordinate conversion keeps each coordinate within sqrt(eps)
    and the total loss within (1/3n) * sum_i 3 eps = eps.  Passing `tau`
    overrides the issued tolerance; anything looser voids the loss guarantee.
    """
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    n = _require_haar(oracle)
    start = oracle.query_count
    if tau is None:
        tau = math.sqrt(epsilon) / (2 * n)
    blochs = []
    for i in range(n):
        coords = [2 * n * oracle.query(SQQuery(_axis_sign_query(i, j), tau)) for j in range(3)]
        blochs.append(BlochVector(*normalize_if_outside(*coords)))
    used = oracle.query_count - start
    transcript = getattr(oracle, "transcript", None)
    return LearnedHypothesis(ProductState(tuple(blochs)), used, transcript)


def learn_basis_state(oracle) -> LearnedHypothesis:
    """Recover a promised computational basis state exactly with n queries.

    Clean answers are +-1/(2n); issued at tolerance 1/(4n) every answer keeps
    its sign, so thresholding at +-1/(4n) decides each bit even against
    worst-case within-band answers.  An answer strictly inside the open dead
    zone (-1/(4n), 1/(4n)) is impossible under the promise and is reported.
    """
    n = _require_haar(oracle)
    start = oracle.query_count
    tau = 1.0 / (4 * n)
    bits = 0
    for i in range(n):
        answer = oracle.query(SQQuery(_axis_sign_query(i, 2), tau))
        # 1e-9 slack: boundary answers from a worst-case-within-band oracle
        # carry ~1e-10 of deterministic evaluation error and still decide the bit
        if abs(answer) < tau - 1e-9:
            raise PromiseViolation(
                f"answer {answer} for qubit {i} lies in the dead zone; "
                "the hidden state is not a computational basis state"
            )
        if answer < 0:
            bits |= 1 << i
    used = oracle.query_count - start
    state = StabilizerState(StabilizerGroup.basis_state(bits, n))
    return LearnedHypothesis(state, used, getattr(oracle, "transcript", None))


# ---------------------------------------------------------------------------
# single-qubit Haar moment: the identity behind the learner's queries


def haar_sign_moment_mc(
    reference: BlochVector, target: BlochVector, samples: int, rng
) -> MonteCarloEstimate:
    """Monte Carlo estimate of E[ sgn(tr(E psi) - 1/2) (tr(E rho) - 1/2) ]
    over Haar-random single-qubit projectors E.

    For a unit reference vector the exact value is (reference . target)/4.
    """
    if abs(reference.norm() - 1.0) > 1e-9:
        raise ValueError("reference state must be pure (unit Bloch vector)")
    cos_t = rng.uniform(-1.0, 1.0, size=samples)
    phi = rng.uniform(0.0, 2.0 * math.pi, size=samples)
    sin_t = np.sqrt(np.clip(1.0 - cos_t**2, 0.0, None))
    u = np.stack([np.cos(phi) * sin_t, np.sin(phi) * sin_t, cos_t], axis=1)
    vals = np.sign(u @ np.array(reference.as_tuple())) * (u @ np.array(target.as_tuple())) / 2.0
    std = float(vals.std(ddof=1))
    return MonteCarloEstimate(float(vals.mean()), std / math.sqrt(samples), samples)


# ---------------------------------------------------------------------------
# learning parity with noise, embedded as basis-state learning


@dataclass(frozen=True)
class LPNInstance:
    """Noisy parity examples: labels are x . secret mod 2, each flipped
    independently with probability eta."""

    n: int
    eta: float
    examples: tuple[tuple[int, int], ...]
    secret: Optional[int] = None


def _bits_to_string(bits: int, n: int) -> str:
    # coordinate 0 is the leftmost character, matching Pauli string order
    return "".join("1" if (bits >> i) & 1 else "0" for i in range(n))


def _string_to_bits(text: str, n: int) -> int:
    if len(text) != n or set(text) - {"0", "1"}:
        raise ValueError(f"{text!r} is not an {n}-bit string")
    return sum(1 << i for i, ch in enumerate(text) if ch == "1")


def lpn_instance_to_json(instance: LPNInstance) -> dict:
    """The on-disk form: bitstrings for example vectors and the secret."""
    data = {
        "n": instance.n,
        "eta": instance.eta,
        "examples": [[_bits_to_string(x, instance.n), b] for x, b in instance.examples],
    }
    if instance.secret is not None:
        data["secret"] = _bits_to_string(instance.secret, instance.n)
    return data


def lpn_instance_from_json(data: dict) -> LPNInstance:
    n = data["n"]
    examples = tuple((_string_to_bits(x, n), int(b)) for x, b in data["examples"])
    secret = _string_to_bits(data["secret"], n) if "secret" in data else None
    return LPNInstance(n, float(data["eta"]), examples, secret)


def generate_lpn_instance(
    n: int, m: int, eta: float, rng, secret: Optional[int] = None
) -> LPNInstance:
    if secret is None:
        secret = int(rng.integers(0, 1 << n))
    examples = []
    for _ in range(m):
        x = int(rng.integers(0, 1 << n))
        bit = (x & secret).bit_count() & 1
        if eta > 0 and rng.random() < eta:
            bit ^= 1
        examples.append((x, bit))
    return LPNInstance(n, eta, tuple(examples), secret)


def make_lpn_as_state_learning(instance: LPNInstance) -> list[tuple[PauliMeasurement, int]]:
    """Re-express parity examples as measurement-outcome pairs.

    (x, b) becomes (E_x, 2b - 1): measuring the basis state |secret> with the
    parity effect E_x accepts with probability x . secret mod 2, so the
    labeled datasets are the same problem in different clothes, noise
    included.  The mapping is a bijection; see parity_index for the inverse.
    """
    return [
        (parity_measurement(x, instance.n), 2 * bit - 1) for x, bit in instance.examples
    ]


def decode_state_learning_dataset(
    dataset, n: int
) -> list[tuple[int, int]]:
    """Inverse of make_lpn_as_state_learning, bit-exact."""
    return [(parity_index(e), (label + 1) // 2) for e, label in dataset]


@dataclass(frozen=True)
class AffineSolutionSpace:
    """All solutions particular ^ span(basis) of an underdetermined system."""

    particular: int
    nullspace_basis: tuple[int, ...]


ParitySolution = Union[int, AffineSolutionSpace]


def gaussian_elimination_parity(dataset, n: int) -> ParitySolution:
    """Solve x . y = b over GF(2) for the secret y.

    Returns the unique solution as an int bitmask when the examples have full
    rank, otherwise the affine solution space.  Raises InconsistentSystem on
    contradictory examples (noise, or a broken promise).
    """
    rows = [(x, b & 1) for x, b in dataset]
    pivots: dict[int, tuple[int, int]] = {}
    for x, b in rows:
        for col, row in pivots.items():
            if (x >> col) & 1:
                x ^= row[0]
                b ^= row[1]
        if x == 0:
            if b:
                raise InconsistentSystem("contradictory parity examples")
            continue
        col = (x & -x).bit_length() - 1
        pivots[col] = (x, b)
    # back-substitute to reduced form
    cols = sorted(pivots)
    for c in cols:
        x, b = pivots[c]
        for c2 in cols:
            if c2 == c:
                continue
            x2, b2 = pivots[c2]
            if (x2 >> c) & 1:
                pivots[c2] = (x2 ^ x, b2 ^ b)
    solution = 0
    for c, (x, b) in pivots.items():
        if b:
            solution |= 1 << c
    if len(pivots) == n:
        return solution
    free_cols = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free_cols:
        vec = 1 << fc
        for c, (x, _) in pivots.items():
            if (x >> fc) & 1:
                vec |= 1 << c
        basis.append(vec)
    return AffineSolutionSpace(solution, tuple(basis))


@dataclass(frozen=True)
class MaximumLikelihoodSecret:
    best: int
    disagreements: int
    ties: tuple[int, ...]


def _walsh_hadamard_inplace(v: np.ndarray):
    h = 1
    m = len(v)
    while h < m:
        for start in range(0, m, 2 * h):
            a = v[start : start + h].copy()
            b = v[start + h : start + 2 * h].copy()
            v[start : start + h] = a + b
            v[start + h : start + 2 * h] = a - b
        h *= 2


def exhaustive_lpn_solver(instance: LPNInstance, budget: int = 20) -> MaximumLikelihoodSecret:
    """Minimum-disagreement secret over all 2^n candidates.

    Disagreement counts for every candidate at once come from one
    Walsh-Hadamard transform of the signed example histogram, so the sweep
    costs O(2^n n + m) rather than O(2^n m).
    """
    n = instance.n
    if n > budget:
        raise BudgetExceeded(f"2^{n} sweep exceeds budget 2^{budget}")
    m = len(instance.examples)
    hist = np.zeros(1 << n, dtype=np.int64)
    for x, b in instance.examples:
        hist[x] += 1 - 2 * (b & 1)
    _walsh_hadamard_inplace(hist)
    # hist[y] = sum_i (-1)^{b_i + x_i.y}, so disagreements(y) = (m - hist[y])/2
    disagreements = (m - hist) // 2
    best_count = int(disagreements.min())
    ties = tuple(int(y) for y in np.flatnonzero(disagreements == best_count))
    return MaximumLikelihoodSecret(ties[0], best_count, ties)
