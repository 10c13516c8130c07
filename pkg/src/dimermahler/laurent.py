"""Bivariate Laurent polynomials with exact coefficients.

A :class:`LaurentPoly2` is an immutable mapping ``(a, b) -> c`` standing for
``sum c * x**a * y**b``.  Coefficients are whatever numbers the caller puts
in: :class:`fractions.Fraction` keeps everything exact, floats and complex
numbers are accepted for numerical work.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Number
from typing import Dict, Iterable, Iterator, Mapping, Tuple

Exponent = Tuple[int, int]


def as_exact(value) -> Number:
    """Coerce ints and rational strings to Fraction; leave floats alone."""
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    return value


class LaurentPoly2:
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Exponent, Number] | Iterable[Tuple[Exponent, Number]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: Dict[Exponent, Number] = {}
        for (a, b), c in items:
            key = (int(a), int(b))
            acc[key] = acc.get(key, 0) + as_exact(c)
        self._terms = {k: v for k, v in sorted(acc.items()) if v != 0}
        self._hash = None

    # construction helpers
    @classmethod
    def constant(cls, c) -> "LaurentPoly2":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, a: int, b: int, c=1) -> "LaurentPoly2":
        return cls({(a, b): c})

    @classmethod
    def from_homogeneous(cls, terms: Mapping[Tuple[int, int, int], Number]) -> "LaurentPoly2":
        """Set Z = 1 in ``sum c X^i Y^j Z^k``."""
        return cls(((i, j), c) for (i, j, _k), c in terms.items())

    # mapping-ish access
    @property
    def terms(self) -> Dict[Exponent, Number]:
        return dict(self._terms)

    def __iter__(self) -> Iterator[Tuple[Exponent, Number]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __getitem__(self, key: Exponent) -> Number:
        return self._terms.get(tuple(key), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Number):
            other = LaurentPoly2.constant(other)
        if not isinstance(other, LaurentPoly2):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    # ring operations
    def _coerce(self, other) -> "LaurentPoly2":
        if isinstance(other, LaurentPoly2):
            return other
        if isinstance(other, (Number, str)):
            return LaurentPoly2.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return LaurentPoly2(list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly2({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (Number, str)) and not isinstance(other, LaurentPoly2):
            c = as_exact(other)
            return LaurentPoly2({k: v * c for k, v in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: Dict[Exponent, Number] = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                key = (a1 + a2, b1 + b2)
                acc[key] = acc.get(key, 0) + c1 * c2
        return LaurentPoly2(acc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            if len(self._terms) == 1 and isinstance(k, int):
                ((a, b), c), = self._terms.items()
                return LaurentPoly2({(a * k, b * k): as_exact(c) ** k})
            raise ValueError("only monomials can be raised to negative powers")
        result = LaurentPoly2.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # transformations
    def shift(self, da: int, db: int) -> "LaurentPoly2":
        """Multiply by the monomial x**da * y**db."""
        return LaurentPoly2({(a + da, b + db): c for (a, b), c in self._terms.items()})

    def inverted(self) -> "LaurentPoly2":
        """The polynomial P(1/x, 1/y)."""
        return LaurentPoly2({(-a, -b): c for (a, b), c in self._terms.items()})

    def map_coefficients(self, f) -> "LaurentPoly2":
        return LaurentPoly2({k: f(v) for k, v in self._terms.items()})

    def substitute_monomials(self, xa: Exponent, yb: Exponent) -> "LaurentPoly2":
        """Substitute x -> x^xa[0] y^xa[1], y -> x^yb[0] y^yb[1]."""
        return LaurentPoly2(
            ((a * xa[0] + b * yb[0], a * xa[1] + b * yb[1]), c) for (a, b), c in self._terms.items()
        )

    # degrees
    def x_range(self) -> Tuple[int, int]:
        xs = [a for a, _ in self._terms]
        return min(xs), max(xs)

    def y_range(self) -> Tuple[int, int]:
        ys = [b for _, b in self._terms]
        return min(ys), max(ys)

    def total_degree(self) -> int:
        return max(a + b for a, b in self._terms)

    def homogenize(self, degree: int | None = None) -> Dict[Tuple[int, int, int], Number]:
        """Return ``Z**degree * P(X/Z, Y/Z)`` as a map ``(i, j, k) -> c``.

        Only meaningful for genuine polynomials (no negative exponents).
        """
        if self.is_zero():
            return {}
        if min(min(a, b) for a, b in self._terms) < 0:
            raise ValueError("homogenize needs nonnegative exponents; shift first")
        d = self.total_degree() if degree is None else degree
        if d < self.total_degree():
            raise ValueError(f"degree {d} below total degree {self.total_degree()}")
        return {(a, b, d - a - b): c for (a, b), c in self._terms.items()}

    def coefficients_in_y(self) -> Dict[int, "LaurentPoly2"]:
        """Split P(x, y) = sum_b p_b(x) y^b; the p_b are returned keyed by b."""
        out: Dict[int, Dict[Exponent, Number]] = {}
        for (a, b), c in self._terms.items():
            out.setdefault(b, {})[(a, 0)] = c
        return {b: LaurentPoly2(t) for b, t in out.items()}

    def norm1(self) -> float:
        return float(sum(abs(c) for c in self._terms.values()))

    # evaluation
    def __call__(self, x, y):
        return self.evaluate(x, y)

    def evaluate(self, x, y):
        """Evaluate at a point; exact for Fraction/int arguments."""
        total = 0
        for (a, b), c in self._terms.items():
            total += c * _power(x, a) * _power(y, b)
        return total

    def evaluate_grid(self, xs, ys):
        """Vectorised evaluation on numpy arrays (broadcasting)."""
        import numpy as np

        xs = np.asarray(xs, dtype=complex)
        ys = np.asarray(ys, dtype=complex)
        total = np.zeros(np.broadcast(xs, ys).shape, dtype=complex)
        for (a, b), c in self._terms.items():
            total = total + complex(c) * xs**a * ys**b
        return total

    # I/O
    def to_json(self) -> dict:
        return {"terms": [{"a": a, "b": b, "c": _num_to_str(c)} for (a, b), c in self._terms.items()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "LaurentPoly2":
        try:
            items = [((int(t["a"]), int(t["b"])), _parse_number(t["c"])) for t in data["terms"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed polynomial JSON: {exc}") from None
        return cls(items)

    def __repr__(self) -> str:
        return f"LaurentPoly2({self.format()})"

    def format(self, names=("x", "y")) -> str:
        if not self._terms:
            return "0"
        return _format_terms(
            [(((names[0], a), (names[1], b)), c) for (a, b), c in self._terms.items()]
        )


def format_homogeneous(terms: Mapping[Tuple[int, int, int], Number]) -> str:
    """Pretty-print ``{(i, j, k): c}`` in X, Y, Z, highest X power first."""
    ordered = sorted(terms.items(), key=lambda kv: (-kv[0][0], -kv[0][1]))
    return _format_terms([((("X", i), ("Y", j), ("Z", k)), c) for (i, j, k), c in ordered if c != 0])


def _format_terms(items) -> str:
    parts = []
    for powers, c in items:
        mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in powers if e != 0)
        neg = _is_negative(c)
        mag = -c if neg else c
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{_num_to_str(mag)}*{mono}"
        else:
            body = _num_to_str(mag)
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts) if parts else "0"


def _is_negative(c) -> bool:
    try:
        return c < 0
    except TypeError:
        return False


def _power(x, k: int):
    if k >= 0:
        return x**k
    if isinstance(x, int):
        x = Fraction(x)
    return 1 / x**(-k)


def _num_to_str(c) -> str:
    if isinstance(c, Fraction):
        return str(c)
    if isinstance(c, complex):
        return repr(c)
    return repr(c) if isinstance(c, float) else str(c)


def _parse_number(v):
    if isinstance(v, str):
        v = v.strip()
        try:
            return Fraction(v)
        except ValueError:
            return float(v)
    if isinstance(v, int):
        return Fraction(v)
    return v

