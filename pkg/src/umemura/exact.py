"""Exact rational arithmetic in Q[r, t].

``BiPoly`` is an immutable polynomial in two commuting indeterminates ``r``
and ``t`` with ``fractions.Fraction`` coefficients.  Terms live in a dict
keyed by ``(deg_r, deg_t)``; zero coefficients are never stored.

Products and exact quotients are computed by Kronecker substitution: the
integer-scaled coefficient array is packed into one big integer
(``t -> X``, ``r -> X**W`` with ``X = 2**(8*nb)``), the big integers are
multiplied or divided with gmpy2, and the result is unpacked.  Evaluation at
``X`` is a ring homomorphism, so a nonzero integer remainder proves
non-divisibility; every packed quotient is confirmed by multiplying back.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Mapping

import gmpy2

from .errors import NotDivisible, ParseError, UnsupportedDivisor

Rational = Fraction

NEG_INF = float("-inf")

__all__ = [
    "Rational",
    "BiPoly",
    "RatFunc",
    "NEG_INF",
    "as_rational",
    "ring_op",
    "exact_div",
    "eval_point",
    "shift_r",
    "differentiate_t",
    "serialize",
    "deserialize",
    "poly_to_doc",
    "poly_from_doc",
]


def as_rational(x) -> Fraction:
    """Coerce int, Fraction or a "p/q" string to Fraction.  Floats are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, _RationalABC):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"exact rational expected, got {type(x).__name__}")


# -- Kronecker packing ------------------------------------------------------

def _nbytes(bits: int) -> int:
    return max(1, (bits + 7) // 8)


def _pack(ints: Mapping[tuple[int, int], int], width: int, nb: int, nslots: int):
    pos = bytearray(nb * nslots)
    neg = bytearray(nb * nslots)
    for (i, j), c in ints.items():
        off = (i * width + j) * nb
        if c > 0:
            pos[off:off + nb] = c.to_bytes(nb, "little")
        else:
            neg[off:off + nb] = (-c).to_bytes(nb, "little")
    return gmpy2.mpz(int.from_bytes(pos, "little")) - gmpy2.mpz(int.from_bytes(neg, "little"))


class _Overflow(Exception):
    pass


def _unpack(value, width: int, nb: int, nslots: int) -> dict[tuple[int, int], int]:
    half = 1 << (8 * nb - 1)
    bias = int.from_bytes((b"\x00" * (nb - 1) + b"\x80") * nslots, "little")
    m = int(value) + bias
    if m < 0 or m.bit_length() > 8 * nb * nslots:
        raise _Overflow
    data = m.to_bytes(nb * nslots, "little")
    out = {}
    for s in range(nslots):
        v = int.from_bytes(data[s * nb:(s + 1) * nb], "little") - half
        if v:
            out[divmod(s, width)] = v
    return out


def _max_bits(ints: Mapping) -> int:
    return max((abs(c).bit_length() for c in ints.values()), default=1)


def _degs(ints: Mapping) -> tuple[int, int]:
    return (max(i for i, _ in ints), max(j for _, j in ints))


def _kron_mul(a: Mapping, b: Mapping) -> dict[tuple[int, int], int]:
    if not a or not b:
        return {}
    if len(a) == 1 or len(b) == 1:
        # monomial times polynomial: no packing needed
        if len(b) != 1:
            a, b = b, a
        ((bi, bj), bc), = b.items()
        return {(i + bi, j + bj): c * bc for (i, j), c in a.items()}
    ar, at = _degs(a)
    br, bt = _degs(b)
    width = at + bt + 1
    nslots = (ar + br + 1) * width
    bits = _max_bits(a) + _max_bits(b) + min(len(a), len(b)).bit_length() + 2
    nb = _nbytes(bits)
    pa = _pack(a, width, nb, nslots)
    pb = _pack(b, width, nb, nslots)
    return _unpack(pa * pb, width, nb, nslots)


# -- BiPoly -----------------------------------------------------------------

class BiPoly:
    """Polynomial in ``r`` and ``t`` over Q.  Immutable."""

    __slots__ = ("_terms", "_intform", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None):
        clean = {}
        if terms:
            for (i, j), c in terms.items():
                if i < 0 or j < 0:
                    raise ValueError("negative exponent")
                c = as_rational(c)
                if c:
                    clean[(int(i), int(j))] = c
        self._terms = clean
        self._intform = None
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "BiPoly":
        p = object.__new__(cls)
        p._terms = terms
        p._intform = None
        p._hash = None
        return p

    @classmethod
    def constant(cls, c) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def t(cls) -> "BiPoly":
        return cls._raw({(0, 1): Fraction(1)})

    @classmethod
    def r(cls) -> "BiPoly":
        return cls._raw({(1, 0): Fraction(1)})

    @classmethod
    def monomial(cls, c, deg_r: int = 0, deg_t: int = 0) -> "BiPoly":
        return cls({(deg_r, deg_t): c})

    @classmethod
    def from_t_coeffs(cls, coeffs: Iterable) -> "BiPoly":
        """Univariate constructor: ``coeffs[j]`` multiplies ``t**j``."""
        return cls({(0, j): c for j, c in enumerate(coeffs)})

    # -- inspection --

    @property
    def terms(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, deg_r: int, deg_t: int) -> Fraction:
        return self._terms.get((deg_r, deg_t), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    @property
    def deg_t(self):
        return max((j for _, j in self._terms), default=NEG_INF)

    @property
    def deg_r(self):
        return max((i for i, _ in self._terms), default=NEG_INF)

    def is_constant(self) -> bool:
        return all(k == (0, 0) for k in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get((0, 0), Fraction(0))

    def coeff_t(self, k: int) -> "BiPoly":
        """Coefficient of ``t**k`` as a polynomial in ``r``."""
        return BiPoly._raw({(i, 0): c for (i, j), c in self._terms.items() if j == k})

    def leading_coeff_t(self) -> "BiPoly":
        if not self._terms:
            return BiPoly()
        return self.coeff_t(self.deg_t)

    def canonical_terms(self) -> list[tuple[tuple[int, int], Fraction]]:
        """Terms sorted by (deg_t, deg_r) descending."""
        return sorted(self._terms.items(), key=lambda kv: (kv[0][1], kv[0][0]), reverse=True)

    def _ints(self):
        if self._intform is None:
            den = math.lcm(*(c.denominator for c in self._terms.values())) if self._terms else 1
            ints = {k: c.numerator * (den // c.denominator) for k, c in self._terms.items()}
            self._intform = (den, ints)
        return self._intform

    # -- ring operations --

    @staticmethod
    def _coerce(other):
        if isinstance(other, BiPoly):
            return other
        if isinstance(other, (int, Fraction)) or isinstance(other, _RationalABC):
            return BiPoly.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return BiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly._raw({k: -c for k, c in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> "BiPoly":
        c = as_rational(c)
        if not c:
            return BiPoly()
        return BiPoly._raw({k: v * c for k, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return BiPoly()
        da, ia = self._ints()
        db, ib = other._ints()
        prod = _kron_mul(ia, ib)
        den = da * db
        return BiPoly._raw({k: Fraction(v, den) for k, v in prod.items()})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("nonnegative integer exponent required")
        result = BiPoly.constant(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, BiPoly):
            return self._terms == other._terms
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __floordiv__(self, other):
        return exact_div(self, self._coerce(other))

    # -- calculus and substitution --

    def diff_t(self) -> "BiPoly":
        return BiPoly._raw({(i, j - 1): c * j for (i, j), c in self._terms.items() if j})

    def eval(self, t0, r0) -> Fraction:
        t0 = as_rational(t0)
        r0 = as_rational(r0)
        tp: dict[int, Fraction] = {}
        rp: dict[int, Fraction] = {}
        total = Fraction(0)
        for (i, j), c in self._terms.items():
            if j not in tp:
                tp[j] = t0 ** j
            if i not in rp:
                rp[i] = r0 ** i
            total += c * rp[i] * tp[j]
        return total

    def eval_float(self, t0: float, r0: float) -> float:
        return sum(float(c) * r0 ** i * t0 ** j for (i, j), c in self._terms.items())

    def subs_r(self, r0) -> "BiPoly":
        """Substitute the number ``r0`` for ``r``; result is free of r."""
        r0 = as_rational(r0)
        out: dict[tuple[int, int], Fraction] = {}
        for (i, j), c in self._terms.items():
            v = out.get((0, j), 0) + c * r0 ** i
            if v:
                out[(0, j)] = v
            else:
                out.pop((0, j), None)
        return BiPoly._raw(out)

    def shift_r(self, c) -> "BiPoly":
        """Substitute ``r -> r + c``."""
        return _shift(self, as_rational(c), axis=0)

    def shift_t(self, c) -> "BiPoly":
        """Substitute ``t -> t + c``."""
        return _shift(self, as_rational(c), axis=1)

    def mul_t_power(self, k: int) -> "BiPoly":
        return BiPoly._raw({(i, j + k): c for (i, j), c in self._terms.items()})

    # -- display --

    def __repr__(self):
        return f"BiPoly({self.to_text()!r})"

    def __str__(self):
        return self.to_text()

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (i, j), c in self.canonical_terms():
            mono = []
            if j:
                mono.append("t" if j == 1 else f"t^{j}")
            if i:
                mono.append("r" if i == 1 else f"r^{i}")
            mag = abs(c)
            if mono and mag == 1:
                body = "*".join(mono)
            else:
                body = "*".join([str(mag)] + mono)
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def _shift(p: BiPoly, c: Fraction, axis: int) -> BiPoly:
    if not c:
        return p
    out: dict[tuple[int, int], Fraction] = {}
    cpow = [Fraction(1)]
    for (i, j), coef in p.items():
        e = (i, j)[axis]
        while len(cpow) <= e:
            cpow.append(cpow[-1] * c)
        for k in range(e + 1):
            v = coef * math.comb(e, k) * cpow[e - k]
            key = (k, j) if axis == 0 else (i, k)
            s = out.get(key, 0) + v
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return BiPoly._raw(out)


# -- exact division ---------------------------------------------------------

def _schoolbook_div(p: BiPoly, d: BiPoly) -> BiPoly:
    """Division in Q[r][t] by a divisor with constant leading t-coefficient."""
    lc = d.leading_coeff_t().constant_value()
    dt = d.deg_t
    rem = p
    q = BiPoly()
    while rem and rem.deg_t >= dt:
        k = rem.deg_t - dt
        step = rem.coeff_t(rem.deg_t).scale(1 / lc).mul_t_power(k)
        q = q + step
        rem = rem - step * d
    if rem:
        raise NotDivisible(f"nonzero remainder of t-degree {rem.deg_t}")
    return q


def _swap(p: BiPoly) -> BiPoly:
    return BiPoly._raw({(j, i): c for (i, j), c in p.items()})


def exact_div(p: BiPoly, d: BiPoly) -> BiPoly:
    """Return ``q`` with ``p == q * d``.

    ``d`` must have a leading t-coefficient free of r, or else a leading
    r-coefficient free of t.  Raises NotDivisible
    when the remainder in Q[r][t] is nonzero.
    """
    if not d:
        raise ZeroDivisionError("division by the zero polynomial")
    lc = d.leading_coeff_t()
    if not lc.is_constant():
        # with the roles of r and t swapped the divisor may still qualify
        if _swap(d).leading_coeff_t().is_constant():
            return _swap(exact_div(_swap(p), _swap(d)))
        raise UnsupportedDivisor("leading coefficients of divisor in t and in r are both non-constant")
    if not p:
        return BiPoly()
    if d.is_constant():
        return p.scale(1 / d.constant_value())
    if p.deg_t < d.deg_t or p.deg_r < d.deg_r:
        raise NotDivisible("divisor degree exceeds dividend degree")

    dp, ip = p._ints()
    dd, idd = d._ints()
    g = math.gcd(*idd.values())
    idd = {k: v // g for k, v in idd.items()}
    # Gauss's lemma: with a primitive integer divisor the quotient of an
    # integer polynomial is integral whenever it exists.
    width = p.deg_t + 1
    rows = p.deg_r - d.deg_r + 1
    nslots_p = (p.deg_r + 1) * width
    nslots_q = rows * width
    base_bits = max(_max_bits(ip), _max_bits(idd))
    extra = 64
    for _ in range(4):
        nb = _nbytes(base_bits + extra)
        np_ = _pack(ip, width, nb, nslots_p)
        nd_ = _pack(idd, width, nb, nslots_p)
        quo, rem = gmpy2.f_divmod(np_, nd_)
        if rem:
            raise NotDivisible("nonzero remainder")
        try:
            iq = _unpack(quo, width, nb, nslots_q)
        except _Overflow:
            iq = None
        if iq is not None and _kron_mul(iq, idd) == ip:
            den = g * dp
            return BiPoly._raw({k: Fraction(v * dd, den) for k, v in iq.items()})
        extra *= 4
    return _schoolbook_div(p, d)


# -- functional surface -----------------------------------------------------

def ring_op(a: BiPoly, b, op: str) -> BiPoly:
    """``op`` is one of add, sub, mul, neg, scalar_mul (``b`` a Rational then)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "scalar_mul":
        return a.scale(b)
    raise ValueError(f"unknown op {op!r}")


def differentiate_t(p: BiPoly) -> BiPoly:
    return p.diff_t()


def eval_point(p: BiPoly, t0, r0) -> Fraction:
    return p.eval(t0, r0)


def shift_r(p: BiPoly, c) -> BiPoly:
    return p.shift_r(c)


# -- documents --------------------------------------------------------------

def _fmt_rational(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def poly_to_doc(p: BiPoly) -> dict:
    return {
        "vars": ["r", "t"],
        "terms": [{"c": _fmt_rational(c), "e": [i, j]} for (i, j), c in p.canonical_terms()],
    }


def _parse_int(s: str, path: str) -> int:
    s = s.strip()
    body = s[1:] if s[:1] in "+-" else s
    if not body.isdigit() or not body.isascii():
        raise ParseError(f"not a decimal integer: {s!r}", path=path)
    return int(s)


def poly_from_doc(doc, pos=None) -> BiPoly:
    if not isinstance(doc, dict):
        raise ParseError("document must be an object", pos=pos)
    if doc.get("vars") != ["r", "t"]:
        raise ParseError('"vars" must be ["r", "t"]', pos=pos, path="vars")
    terms = doc.get("terms")
    if not isinstance(terms, list):
        raise ParseError('"terms" must be a list', pos=pos, path="terms")
    out: dict[tuple[int, int], Fraction] = {}
    for idx, term in enumerate(terms):
        path = f"terms[{idx}]"
        if not isinstance(term, dict) or set(term) != {"c", "e"}:
            raise ParseError("term must have exactly keys c and e", pos=idx, path=path)
        c, e = term["c"], term["e"]
        if not isinstance(c, str):
            raise ParseError("coefficient must be a string", pos=idx, path=path + ".c")
        num, _, den = c.partition("/")
        n = _parse_int(num, path + ".c")
        d = _parse_int(den, path + ".c") if den else 1
        if d <= 0:
            raise ParseError("denominator must be positive", pos=idx, path=path + ".c")
        if (not isinstance(e, list) or len(e) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in e)):
            raise ParseError("exponent must be [deg_r, deg_t]", pos=idx, path=path + ".e")
        key = (e[0], e[1])
        if key in out:
            raise ParseError("duplicate exponent", pos=idx, path=path + ".e")
        out[key] = Fraction(n, d)
    return BiPoly(out)


def serialize(p: BiPoly) -> str:
    return json.dumps(poly_to_doc(p), separators=(",", ":"))


def deserialize(text: str) -> BiPoly:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, pos=exc.pos) from None
    return poly_from_doc(doc)


# -- rational functions -----------------------------------------------------

class RatFunc:
    """Unreduced quotient ``num / den`` of BiPolys.

    No GCD normalization is done; equality is tested by cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num = BiPoly._coerce(num)
        den = BiPoly._coerce(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        self.num = num
        self.den = den

    @staticmethod
    def _lift(x) -> "RatFunc":
        return x if isinstance(x, RatFunc) else RatFunc(x)

    def is_zero(self) -> bool:
        return not self.num

    def __eq__(self, other):
        other = self._lift(other)
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        raise TypeError("RatFunc is unhashable: equality is not structural")

    def __add__(self, other):
        other = self._lift(other)
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if not other.num:
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def diff_t(self) -> "RatFunc":
        """Quotient rule, no cancellation."""
        return RatFunc(self.num.diff_t() * self.den - self.num * self.den.diff_t(), self.den * self.den)

    def eval(self, t0, r0=0) -> Fraction:
        d = self.den.eval(t0, r0)
        if not d:
            raise ZeroDivisionError(f"pole at t={t0}")
        return self.num.eval(t0, r0) / d

    def subs_r(self, r0) -> "RatFunc":
        return RatFunc(self.num.subs_r(r0), self.den.subs_r(r0))

    def __repr__(self):
        return f"RatFunc(({self.num.to_text()}) / ({self.den.to_text()}))"
