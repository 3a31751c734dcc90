"""Signed n-qubit Pauli operators in symplectic bit-vector form.

An operator is stored as a sign in {+1, -1} plus two n-bit masks: bit i of
``x`` / ``z`` gives the X / Z component on qubit i, so qubit i carries
I, X, Y, Z for (x_i, z_i) = (0,0), (1,0), (1,1), (0,1).  Qubit 0 is the
leftmost tensor factor and the leftmost character of the string form.

Products of signed Paulis can pick up imaginary phases, so products are
returned as a :class:`PhasedPauli` carrying the full phase i^k; the
real-signed subset (phase +1 or -1) is what stabilizer groups and Pauli
measurements are built from.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

_PHASES = (1, 1j, -1, -1j)
_KIND_FOR_BITS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS_FOR_KIND = {v: k for k, v in _KIND_FOR_BITS.items()}
_MINUS_CHARS = ("-", "−")


class DimensionMismatch(ValueError):
    """Raised when two operators act on different qubit counts."""


def _check_same_n(a, b) -> int:
    if a.n != b.n:
        raise DimensionMismatch(f"qubit counts differ: {a.n} != {b.n}")
    return a.n


@dataclass(frozen=True)
class PauliOperator:
    """A real-signed Pauli: sign * (tensor product of I/X/Y/Z per qubit)."""

    n: int
    sign: int
    x: int
    z: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one qubit, got n={self.n}")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("x/z bits exceed qubit count")

    @classmethod
    def identity(cls, n: int, sign: int = 1) -> "PauliOperator":
        return cls(n, sign, 0, 0)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str, sign: int = 1) -> "PauliOperator":
        """The operator acting as `kind` on one qubit and I elsewhere."""
        if not 0 <= qubit < n:
            raise ValueError(f"qubit {qubit} out of range for n={n}")
        xb, zb = _BITS_FOR_KIND[kind]
        return cls(n, sign, xb << qubit, zb << qubit)

    @classmethod
    def from_string(cls, text: str) -> "PauliOperator":
        s = text.strip()
        sign = 1
        if s[:1] in _MINUS_CHARS:
            sign, s = -1, s[1:]
        elif s[:1] == "+":
            s = s[1:]
        if not s:
            raise ValueError(f"no Pauli letters in {text!r}")
        x = z = 0
        for i, ch in enumerate(s):
            try:
                xb, zb = _BITS_FOR_KIND[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {ch!r} in {text!r}") from None
            x |= xb << i
            z |= zb << i
        return cls(len(s), sign, x, z)

    def kind(self, qubit: int) -> str:
        return _KIND_FOR_BITS[((self.x >> qubit) & 1, (self.z >> qubit) & 1)]

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def negated(self) -> "PauliOperator":
        return PauliOperator(self.n, -self.sign, self.x, self.z)

    def __str__(self) -> str:
        letters = "".join(self.kind(i) for i in range(self.n))
        return ("+" if self.sign > 0 else "-") + letters

    def phase_exponent(self) -> int:
        """Exponent k with  self == i^k * X^x Z^z  (letter form absorbs i per Y)."""
        return ((0 if self.sign > 0 else 2) + (self.x & self.z).bit_count()) % 4


@dataclass(frozen=True)
class PhasedPauli:
    """A Pauli string together with a phase in {+1, i, -1, -i}.

    ``phase_exp`` is the exponent k of i^k relative to the plain letter
    string (each Y counted as a single letter, not as iXZ).
    """

    n: int
    phase_exp: int
    x: int
    z: int

    @property
    def phase(self) -> complex:
        return _PHASES[self.phase_exp % 4]

    @property
    def is_real_signed(self) -> bool:
        return self.phase_exp % 2 == 0

    def to_operator(self) -> PauliOperator:
        if not self.is_real_signed:
            raise ValueError(f"phase i^{self.phase_exp} is imaginary, not in the real-signed set")
        return PauliOperator(self.n, 1 if self.phase_exp % 4 == 0 else -1, self.x, self.z)

    def __str__(self) -> str:
        letters = "".join(_KIND_FOR_BITS[((self.x >> i) & 1, (self.z >> i) & 1)] for i in range(self.n))
        return ("+", "+i", "-", "-i")[self.phase_exp % 4] + letters


def as_phased(p: PauliOperator | PhasedPauli) -> PhasedPauli:
    if isinstance(p, PhasedPauli):
        return p
    return PhasedPauli(p.n, (0 if p.sign > 0 else 2), p.x, p.z)


def pauli_product(a: PauliOperator | PhasedPauli, b: PauliOperator | PhasedPauli) -> PhasedPauli:
    """Matrix product a*b with exact phase tracking.

    Writing each factor as i^k X^x Z^z, the product picks up (-1) for every
    qubit where a Z of `a` moves past an X of `b`.
    """
    pa, pb = as_phased(a), as_phased(b)
    n = _check_same_n(pa, pb)
    ka = pa.phase_exp + (pa.x & pa.z).bit_count()
    kb = pb.phase_exp + (pb.x & pb.z).bit_count()
    x = pa.x ^ pb.x
    z = pa.z ^ pb.z
    k = ka + kb + 2 * (pa.z & pb.x).bit_count() - (x & z).bit_count()
    return PhasedPauli(n, k % 4, x, z)


def pauli_product_many(ops) -> PhasedPauli:
    ops = list(ops)
    if not ops:
        raise ValueError("empty product")
    return reduce(pauli_product, ops[1:], as_phased(ops[0]))


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    """True iff the symplectic form <a.x, b.z> + <a.z, b.x> vanishes over GF(2)."""
    _check_same_n(a, b)
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) % 2 == 0


def pauli_trace_sign(p: PauliOperator) -> int:
    """tr(P): +-2^n for the signed identity, 0 for every other Pauli string."""
    if p.is_identity:
        return p.sign << p.n
    return 0


@dataclass(frozen=True)
class PauliMeasurement:
    """The two-outcome effect E = (I + P)/2 for a signed Pauli P.

    P = +I...I gives E = I (always accept) and P = -I...I gives E = 0
    (always reject); both are legal measurements here.
    """

    pauli: PauliOperator

    @property
    def n(self) -> int:
        return self.pauli.n

    def __str__(self) -> str:
        return f"(I{self.pauli})/2"
