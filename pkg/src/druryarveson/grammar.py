"""Text forms for staircase sets and polynomials.

Sets::

    gens: 2,0; 1,1; 0,2     complement generators
    slab: axis=1 N=4        {n : n_axis <= N}, axes 1-based
    rect: 1,2               the rectangle R_(1,2)
    full                    all of N^d
    point                   {0}

Polynomials are ``+``/``-`` separated terms ``c * z1^a1 * ... * zd^ad`` with
real or parenthesized complex coefficients, e.g. ``1 + (0+2i)*z1*z2^2``.
"""

from __future__ import annotations

import re

from .opmodel import Polynomial
from .staircase import StaircaseSet


class GrammarError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


def _parse_index_list(body: str, text: str, offset: int) -> list[tuple[int, ...]]:
    out = []
    pos = offset
    for chunk in body.split(";"):
        if chunk.strip():
            try:
                out.append(tuple(int(c) for c in chunk.split(",")))
            except ValueError:
                raise GrammarError("expected comma-separated integers", text, pos) from None
            if any(c < 0 for c in out[-1]):
                raise GrammarError("exponents must be nonnegative", text, pos)
        pos += len(chunk) + 1
    return out


def parse_set(text: str, d: int | None = None) -> StaircaseSet:
    """Parse the set grammar; ``d`` is needed for ``full``, ``point`` and ``slab``."""
    s = text.strip()
    lead = len(text) - len(text.lstrip())
    head, sep, body = s.partition(":")
    kind = head.strip().lower()
    offset = lead + len(head) + len(sep)

    def need_d():
        if d is None:
            raise GrammarError(f"'{kind}' needs the dimension d", text, lead)
        return d

    if not sep:
        if kind == "full":
            return StaircaseSet.full(need_d())
        if kind == "point":
            return StaircaseSet.point(need_d())
        raise GrammarError(f"unknown set form {kind!r}", text, lead)
    if kind == "gens":
        gens = _parse_index_list(body, text, offset)
        dims = {len(g) for g in gens}
        if not gens:
            return StaircaseSet.full(need_d())
        if len(dims) != 1:
            raise GrammarError("generators have inconsistent dimensions", text, offset)
        gd = dims.pop()
        if d is not None and gd != d:
            raise GrammarError(f"generators have dimension {gd}, expected {d}", text, offset)
        return StaircaseSet(gd, tuple(gens))
    if kind == "rect":
        m = _parse_index_list(body, text, offset)
        if len(m) != 1:
            raise GrammarError("rect takes exactly one index", text, offset)
        if d is not None and len(m[0]) != d:
            raise GrammarError(f"rect corner has dimension {len(m[0])}, expected {d}", text, offset)
        return StaircaseSet.rectangle(m[0])
    if kind == "slab":
        fields = dict(re.findall(r"(\w+)\s*=\s*(-?\d+)", body))
        if set(fields) != {"axis", "N"}:
            raise GrammarError("slab needs 'axis=<j> N=<n>'", text, offset)
        dim = need_d()
        axis, N = int(fields["axis"]), int(fields["N"])
        if not 1 <= axis <= dim:
            raise GrammarError(f"axis {axis} outside 1..{dim}", text, offset)
        if N < 0:
            raise GrammarError("N must be >= 0", text, offset)
        return StaircaseSet.slab(dim, axis - 1, N)
    raise GrammarError(f"unknown set form {kind!r}", text, lead)


_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(rf"\(\s*([+-]?\s*{_NUMBER})?\s*(?:([+-])\s*({_NUMBER})?\s*[ij])?\s*\)")
_IMAG = re.compile(rf"({_NUMBER})?[ij]")
_REAL = re.compile(_NUMBER)
_VAR = re.compile(r"z(\d+)(?:\s*\^\s*(\d+))?")


class _PolyParser:
    def __init__(self, text: str, d: int | None):
        self.text = text
        self.pos = 0
        self.d = d

    def error(self, msg: str):
        raise GrammarError(msg, self.text, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def factor(self):
        """Return ('coef', complex) or ('var', axis, power)."""
        self.skip()
        m = _COMPLEX.match(self.text, self.pos)
        if m and (m.group(1) or m.group(2)):
            re_part = float(m.group(1).replace(" ", "")) if m.group(1) else 0.0
            im_part = 0.0
            if m.group(2):
                im_part = float(m.group(3)) if m.group(3) else 1.0
                if m.group(2) == "-":
                    im_part = -im_part
            self.pos = m.end()
            return ("coef", complex(re_part, im_part))
        m = _VAR.match(self.text, self.pos)
        if m:
            axis = int(m.group(1))
            if axis < 1:
                self.error("variables are numbered from z1")
            self.pos = m.end()
            return ("var", axis, int(m.group(2)) if m.group(2) else 1)
        m = _IMAG.match(self.text, self.pos)
        if m and m.end() > self.pos:
            self.pos = m.end()
            return ("coef", complex(0, float(m.group(1)) if m.group(1) else 1.0))
        m = _REAL.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return ("coef", complex(float(m.group(0))))
        self.error("expected a coefficient or a variable z<j>")

    def term(self, sign: float):
        coef = complex(sign)
        exps: dict[int, int] = {}
        while True:
            f = self.factor()
            if f[0] == "coef":
                coef *= f[1]
            else:
                exps[f[1]] = exps.get(f[1], 0) + f[2]
            if self.peek() == "*":
                self.pos += 1
                continue
            return coef, exps

    def parse(self) -> Polynomial:
        terms = []
        sign = 1.0
        if self.peek() in "+-" and self.peek():
            sign = -1.0 if self.peek() == "-" else 1.0
            self.pos += 1
        if not self.peek():
            self.error("empty polynomial")
        while True:
            terms.append(self.term(sign))
            c = self.peek()
            if not c:
                break
            if c not in "+-":
                self.error(f"unexpected character {c!r}")
            sign = -1.0 if c == "-" else 1.0
            self.pos += 1
        top = max((a for _, e in terms for a in e), default=1)
        d = self.d if self.d is not None else top
        if top > d:
            self.pos = 0
            self.error(f"variable z{top} exceeds dimension {d}")
        coeffs: dict[tuple[int, ...], complex] = {}
        for coef, exps in terms:
            k = tuple(exps.get(j + 1, 0) for j in range(d))
            coeffs[k] = coeffs.get(k, 0) + coef
        return Polynomial(d, coeffs)


def parse_poly(text: str, d: int | None = None) -> Polynomial:
    return _PolyParser(text, d).parse()


def _format_coef(c: complex) -> tuple[str, str]:
    """Return (sign, magnitude text) for a coefficient."""
    if c.imag == 0:
        r = c.real
        return ("-" if r < 0 else "+"), repr(abs(r))
    im = c.imag
    op = "-" if im < 0 else "+"
    return "+", f"({c.real!r}{op}{abs(im)!r}i)"


def format_poly(Q: Polynomial) -> str:
    """Canonical text; :func:`parse_poly` with the same ``d`` inverts it."""
    if not Q.coeffs:
        return "0.0"
    parts = []
    for k, c in Q.terms():
        sign, mag = _format_coef(c)
        vars_ = [f"z{j + 1}" if a == 1 else f"z{j + 1}^{a}" for j, a in enumerate(k) if a]
        body = "*".join([mag] + vars_)
        if not parts:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


def format_set(X: StaircaseSet) -> str:
    return X.to_grammar()
