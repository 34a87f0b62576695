"""Polynomial text syntax: declared variables, ``+ - * ^``, integers, parentheses.

Juxtaposition is rejected: ``"x y"`` and ``"2x"`` are syntax errors.
"""

from __future__ import annotations

import re

from .errors import PolySyntaxError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break  # only trailing whitespace
        ws_start = pos
        num, name, sym = m.groups()
        start = m.start(1) if num else m.start(2) if name else m.start(3)
        if num:
            out.append(("num", int(num), start, ws_start))
        elif name:
            out.append(("var", name, start, ws_start))
        else:
            out.append(("sym", sym, start, ws_start))
        pos = m.end()
    out.append(("end", None, len(text), pos))
    return out


def _padd(f, g, p, sign=1):
    out = dict(f)
    for e, c in g.items():
        v = (out.get(e, 0) + sign * c) % p
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _pmul(f, g, p):
    out = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            v = (out.get(e, 0) + c1 * c2) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


MAX_EXPONENT = 100


def parse_poly(text: str, variables, p: int) -> dict:
    """Parse ``text`` into a term dict over the given variables, mod ``p``."""
    toks = _tokenize(text)
    n = len(variables)
    index = {v: i for i, v in enumerate(variables)}
    zero = (0,) * n
    pos = 0

    def peek():
        return toks[pos]

    def advance():
        nonlocal pos
        t = toks[pos]
        pos += 1
        return t

    def fail(msg, col):
        raise PolySyntaxError(msg, col + 1, text)

    def expr():
        f = term()
        while peek()[0] == "sym" and peek()[1] in "+-":
            sign = 1 if advance()[1] == "+" else -1
            f = _padd(f, term(), p, sign)
        return f

    def term():
        f = factor()
        while peek()[0] == "sym" and peek()[1] == "*":
            advance()
            f = _pmul(f, factor(), p)
        return f

    def factor():
        t = peek()
        if t[0] == "sym" and t[1] in "+-":
            advance()
            f = factor()
            return f if t[1] == "+" else {e: (-c) % p for e, c in f.items()}
        return power()

    def power():
        base = atom()
        if peek()[0] == "sym" and peek()[1] == "^":
            advance()
            t = advance()
            if t[0] != "num":
                fail("exponent must be a non-negative integer", t[2])
            if t[1] > MAX_EXPONENT:
                fail(f"exponent larger than {MAX_EXPONENT}", t[2])
            out = {zero: 1}
            for _ in range(t[1]):
                out = _pmul(out, base, p)
            return out
        return base

    def atom():
        t = advance()
        kind, val, col, _ = t
        if kind == "num":
            c = val % p
            return {zero: c} if c else {}
        if kind == "var":
            if val not in index:
                raise PolySyntaxError(f"unknown variable {val!r}", col + 1, text)
            e = [0] * n
            e[index[val]] = 1
            return {tuple(e): 1}
        if kind == "sym" and val == "(":
            f = expr()
            t2 = advance()
            if t2[0] != "sym" or t2[1] != ")":
                fail("expected ')'", t2[2])
            return f
        if kind == "end":
            fail("unexpected end of polynomial", col)
        fail(f"unexpected {val!r}", col)

    if not text.strip():
        fail("empty polynomial", 0)
    result = expr()
    t = peek()
    if t[0] != "end":
        if t[0] in ("num", "var") or (t[0] == "sym" and t[1] == "("):
            # juxtaposition: point at the gap if there is one
            col = t[3] if t[3] < t[2] else t[2]
            fail("missing '*' between factors", col)
        fail(f"unexpected {t[1]!r}", t[2])
    return result
