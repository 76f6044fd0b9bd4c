"""Plain-text definition files.

A file is a list of sections. Blank lines and ``#`` comments are ignored.

    [groupoid]
    objects = x y
    arrow e : x -> x          # name : domain -> range
    compose g h = k           # g after h
    builtin = pair 3          # instead of explicit arrows

    [cocycle]
    g h = root(1,4)           # unlisted composable pairs default to 1

    [fiber]
    full = 2                  # or: diagonal = 2, or repeated  matrix = 1 0 ; 0 0

    [subalgebra]
    B = units                 # or: B = arrows a b

    [generators]
    n = span 0.7071*1 0.7071i*0 ; 1*1
    use = signature           # also: bisections, sampled 200

    [checks]
    stable ipi_stable

Complex literals are ``a``, ``bi`` or ``a+bi``; ``root(k,n)`` is exp(2 pi i k/n)
and ``sqrt(x)`` is a real square root. A coefficient may be a product of
such factors joined by ``*``, followed by ``*arrow``.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DefinitionSyntaxError, UnknownCheck, UnresolvedReference
from .groupoid import (FiniteGroupoid, cyclic_group, discrete_groupoid, from_product,
                       group_groupoid, pair_groupoid, symmetric_group, translation_groupoid)

SECTIONS = ("groupoid", "cocycle", "fiber", "subalgebra", "generators", "checks")
CHECKS = ("surjection", "semiopen", "weakly_open", "quantic", "stable", "ipi_stable", "recover_G")
GENERATOR_SOURCES = ("bisections", "signature", "sampled")


@dataclass(eq=False)
class DefinitionFile:
    groupoid: FiniteGroupoid
    cocycle: np.ndarray | None = None
    fiber: np.ndarray | None = None
    subalgebra: tuple[str, ...] | None = None  # arrow names; None means the units
    generators: dict[str, list[np.ndarray]] = field(default_factory=dict)
    generator_sources: list[str] = field(default_factory=list)
    checks: list[str] = field(default_factory=list)
    source: str = ""

    def arrow_index(self, name: str) -> int:
        names = list(self.groupoid.arrow_names)
        if name not in names:
            raise UnresolvedReference(f"unknown arrow {name!r}")
        return names.index(name)


# -- literals -----------------------------------------------------------------------

def parse_factor(text: str) -> complex:
    text = text.strip()
    m = re.fullmatch(r"root\(\s*(-?\d+)\s*,\s*(\d+)\s*\)", text)
    if m:
        k, n = int(m.group(1)), int(m.group(2))
        if n == 0:
            raise ValueError("root(k, 0) is undefined")
        return cmath.exp(2j * math.pi * k / n)
    m = re.fullmatch(r"sqrt\(\s*([0-9.eE+-]+)\s*\)", text)
    if m:
        return complex(math.sqrt(float(m.group(1))))
    if text in ("i", "+i"):
        return 1j
    if text == "-i":
        return -1j
    if "i" in text:
        if not text.endswith("i"):
            raise ValueError(text)
        body = text[:-1]
        if body.endswith(("+", "-")):
            body += "1"
        return complex(body + "j")
    return complex(float(text))


def format_complex(z: complex) -> str:
    re_, im = float(z.real) + 0.0, float(z.imag) + 0.0
    if im == 0:
        return repr(re_)
    sign = "-" if math.copysign(1.0, im) < 0 else "+"
    return f"{re_!r}{sign}{abs(im)!r}i"


def _split_factors(text: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "*" and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return out


# -- parser ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.sections: dict[str, list[tuple[int, str]]] = {}

    def error(self, lineno: int, line: str, col_text: str | None, expected: str):
        col = line.find(col_text) + 1 if col_text and col_text in line else 1
        raise DefinitionSyntaxError(lineno, max(col, 1), expected)

    def split_sections(self):
        current = None
        for lineno, raw in enumerate(self.lines, 1):
            line = raw.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            stripped = line.strip()
            if stripped.startswith("["):
                m = re.fullmatch(r"\[\s*(\w+)\s*\]", stripped)
                if not m:
                    self.error(lineno, raw, stripped, "section header like [groupoid]")
                name = m.group(1)
                if name not in SECTIONS:
                    self.error(lineno, raw, name, "one of " + ", ".join(SECTIONS))
                if name in self.sections:
                    self.error(lineno, raw, name, "each section at most once")
                current = name
                self.sections[name] = []
                continue
            if current is None:
                self.error(lineno, raw, stripped, "a section header before content")
            self.sections[current].append((lineno, line))

    def key_value(self, lineno: int, line: str) -> tuple[str, str]:
        if "=" not in line:
            self.error(lineno, line, line.strip(), "'key = value'")
        key, value = line.split("=", 1)
        return key.strip(), value.strip()

    # groupoid
    def groupoid(self) -> FiniteGroupoid:
        lines = self.sections.get("groupoid")
        if lines is None:
            raise DefinitionSyntaxError(len(self.lines) + 1, 1, "a [groupoid] section")
        objects: list[str] = []
        arrows: list[tuple[str, str, str]] = []
        compose: dict[tuple[str, str], str] = {}
        builtin = None
        for lineno, line in lines:
            words = line.split()
            head = words[0]
            if head == "arrow":
                m = re.fullmatch(r"\s*arrow\s+(\S+)\s*:\s*(\S+)\s*->\s*(\S+)\s*", line)
                if not m:
                    self.error(lineno, line, "arrow", "'arrow NAME : DOMAIN -> RANGE'")
                arrows.append((m.group(1), m.group(2), m.group(3)))
            elif head == "compose":
                m = re.fullmatch(r"\s*compose\s+(\S+)\s+(\S+)\s*=\s*(\S+)\s*", line)
                if not m:
                    self.error(lineno, line, "compose", "'compose G H = K'")
                compose[(m.group(1), m.group(2))] = m.group(3)
            else:
                key, value = self.key_value(lineno, line)
                if key == "objects":
                    objects = value.split()
                elif key == "builtin":
                    builtin = (lineno, line, value)
                else:
                    self.error(lineno, line, key, "objects, arrow, compose or builtin")
        if builtin is not None:
            if arrows or objects:
                self.error(builtin[0], builtin[1], "builtin", "either builtin or explicit arrows")
            return self._builtin(*builtin)
        if not objects:
            raise ValueError("at least one object required")
        return _explicit_groupoid(objects, arrows, compose)

    def _builtin(self, lineno: int, line: str, value: str) -> FiniteGroupoid:
        words = value.split()
        try:
            kind, args = words[0], [int(w) for w in words[1:] if w.lstrip("-").isdigit()]
            flags = [w for w in words[1:] if not w.lstrip("-").isdigit()]
        except IndexError:
            self.error(lineno, line, "=", "a builtin name")
        if args and args[0] < 1:
            raise ValueError("at least one object required")
        if kind == "pair" and len(args) == 1:
            return pair_groupoid(args[0])
        if kind == "discrete" and len(args) == 1:
            return discrete_groupoid(args[0])
        if kind == "cyclic" and len(args) == 1:
            return group_groupoid(cyclic_group(args[0]))
        if kind == "symmetric" and len(args) == 1:
            return group_groupoid(symmetric_group(args[0])[0])
        if kind == "translation" and args and flags in (["free"], ["trivial"]):
            n = args[0]
            if flags == ["free"]:
                action = cyclic_group(n)
            else:
                k = args[1] if len(args) > 1 else 1
                action = np.tile(np.arange(k), (n, 1))
            return translation_groupoid(cyclic_group(n), action)
        self.error(lineno, line, kind, "pair N, discrete N, cyclic N, symmetric N "
                                       "or translation N free|trivial [K]")

    def cocycle(self, G: FiniteGroupoid) -> np.ndarray | None:
        lines = self.sections.get("cocycle")
        if lines is None:
            return None
        names = list(G.arrow_names)
        c = np.ones((G.arrow_count, G.arrow_count), dtype=complex)
        for lineno, line in lines:
            key, value = self.key_value(lineno, line)
            pair = key.split()
            if len(pair) != 2:
                self.error(lineno, line, key, "'G H = value'")
            for a in pair:
                if a not in names:
                    raise UnresolvedReference(f"line {lineno}: unknown arrow {a!r}")
            c[names.index(pair[0]), names.index(pair[1])] = self._number(lineno, line, value)
        return c

    def _number(self, lineno: int, line: str, text: str) -> complex:
        z = 1 + 0j
        for f in _split_factors(text):
            try:
                z *= parse_factor(f)
            except ValueError:
                self.error(lineno, line, f.strip() or text, "a complex literal, root(k,n) or sqrt(x)")
        return z

    def fiber(self) -> np.ndarray | None:
        lines = self.sections.get("fiber")
        if lines is None:
            return None
        mats = []
        for lineno, line in lines:
            key, value = self.key_value(lineno, line)
            if key in ("full", "diagonal"):
                if mats or not value.isdigit() or int(value) < 1:
                    self.error(lineno, line, value or key, "a positive size, once")
                q = int(value)
                if key == "full":
                    return np.array([np.eye(q)[[i]].T @ np.eye(q)[[j]] for i in range(q) for j in range(q)],
                                    dtype=complex)
                return np.array([np.diag(np.eye(q)[i]) for i in range(q)], dtype=complex)
            if key != "matrix":
                self.error(lineno, line, key, "full, diagonal or matrix")
            rows = [r.split() for r in value.split(";")]
            try:
                m = np.array([[self._number(lineno, line, x) for x in r] for r in rows], dtype=complex)
            except ValueError:
                self.error(lineno, line, value, "a square matrix")
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                self.error(lineno, line, value, "a square matrix with rows split by ';'")
            mats.append(m)
        if not mats:
            return None
        if len({m.shape for m in mats}) != 1:
            raise DefinitionSyntaxError(lines[0][0], 1, "matrices of one size")
        return np.array(mats)

    def subalgebra(self, G: FiniteGroupoid) -> tuple[str, ...] | None:
        lines = self.sections.get("subalgebra")
        if lines is None:
            return None
        out = None
        for lineno, line in lines:
            key, value = self.key_value(lineno, line)
            if key != "B":
                self.error(lineno, line, key, "'B = units' or 'B = arrows ...'")
            words = value.split()
            if words == ["units"]:
                out = None
            elif words and words[0] == "arrows":
                for a in words[1:]:
                    if a not in G.arrow_names:
                        raise UnresolvedReference(f"line {lineno}: unknown arrow {a!r}")
                out = tuple(words[1:])
            else:
                self.error(lineno, line, value or "=", "'units' or 'arrows NAME ...'")
        return out

    def generators(self, G: FiniteGroupoid, fiber_dim: int):
        lines = self.sections.get("generators", [])
        named: dict[str, list[np.ndarray]] = {}
        sources: list[str] = []
        names = list(G.arrow_names)
        for lineno, line in lines:
            key, value = self.key_value(lineno, line)
            if key == "use":
                words = value.split()
                if not words or words[0] not in GENERATOR_SOURCES or \
                        (words[0] == "sampled") != (len(words) == 2 and words[-1].isdigit()):
                    self.error(lineno, line, value or "=", "bisections, signature or 'sampled N'")
                sources.append(" ".join(words))
                continue
            if not value.startswith("span"):
                self.error(lineno, line, value or "=", "'span VECTOR ; VECTOR ...'")
            vecs = []
            for chunk in value[4:].split(";"):
                v = np.zeros(G.arrow_count * fiber_dim, dtype=complex)
                for term in chunk.split():
                    parts = _split_factors(term)
                    arrow = parts[-1]
                    comp = 0
                    if "." in arrow and arrow.rsplit(".", 1)[0] in names:
                        arrow, comp_s = arrow.rsplit(".", 1)
                        comp = int(comp_s)
                    if arrow not in names:
                        raise UnresolvedReference(f"line {lineno}: unknown arrow {arrow!r}")
                    coef = self._number(lineno, line, "*".join(parts[:-1])) if len(parts) > 1 else 1
                    v[names.index(arrow) * fiber_dim + comp] += coef
                vecs.append(v)
            named[key] = vecs
        return named, sources

    def checks(self) -> list[str]:
        out = []
        for lineno, line in self.sections.get("checks", []):
            for m in re.finditer(r"[^\s,]+", line):
                if m.group(0) not in CHECKS:
                    raise UnknownCheck(f"line {lineno}, col {m.start() + 1}: unknown check "
                                       f"{m.group(0)!r}; known: {', '.join(CHECKS)}")
                out.append(m.group(0))
        return out


def _explicit_groupoid(objects, arrows, compose) -> FiniteGroupoid:
    obj_index = {o: i for i, o in enumerate(objects)}
    names = [a[0] for a in arrows]
    if len(set(names)) != len(names):
        raise UnresolvedReference("duplicate arrow name")
    index = {a: i for i, a in enumerate(names)}
    d, r = [], []
    for name, dom, ran in arrows:
        for o in (dom, ran):
            if o not in obj_index:
                raise UnresolvedReference(f"arrow {name!r} uses unknown object {o!r}")
        d.append(obj_index[dom])
        r.append(obj_index[ran])
    for (g, h), k in compose.items():
        for a in (g, h, k):
            if a not in index:
                raise UnresolvedReference(f"compose uses unknown arrow {a!r}")

    def product(g: int, h: int) -> int:
        key = (names[g], names[h])
        if key not in compose:
            raise UnresolvedReference(f"missing 'compose {key[0]} {key[1]} = ...'")
        return index[compose[key]]

    return from_product(len(objects), d, r, product, names, objects)


def parse_text(text: str) -> DefinitionFile:
    p = _Parser(text)
    p.split_sections()
    G = p.groupoid()
    fiber = p.fiber()
    fiber_dim = 1 if fiber is None else fiber.shape[0]
    cocycle = p.cocycle(G)
    if fiber is not None and cocycle is not None:
        raise DefinitionSyntaxError(p.sections["cocycle"][0][0], 1,
                                    "either a cocycle or a fiber, not both")
    gens, sources = p.generators(G, fiber_dim)
    return DefinitionFile(G, cocycle, fiber, p.subalgebra(G), gens, sources, p.checks(), text)


def parse(path) -> DefinitionFile:
    return parse_text(Path(path).read_text())


def serialize(df: DefinitionFile) -> str:
    G = df.groupoid
    objs = list(G.object_names) or [str(x) for x in range(G.object_count)]
    names = list(G.arrow_names) or [f"a{g}" for g in range(G.arrow_count)]
    out = ["[groupoid]", "objects = " + " ".join(objs)]
    out += [f"arrow {names[g]} : {objs[G.d[g]]} -> {objs[G.r[g]]}" for g in range(G.arrow_count)]
    for g in range(G.arrow_count):
        for h in range(G.arrow_count):
            k = G.compose[g, h]
            if k >= 0:
                out.append(f"compose {names[g]} {names[h]} = {names[k]}")
    if df.cocycle is not None:
        out.append("\n[cocycle]")
        for g in range(G.arrow_count):
            for h in range(G.arrow_count):
                if G.compose[g, h] >= 0 and df.cocycle[g, h] != 1:
                    out.append(f"{names[g]} {names[h]} = {format_complex(df.cocycle[g, h])}")
    if df.fiber is not None:
        out.append("\n[fiber]")
        for m in df.fiber:
            rows = " ; ".join(" ".join(format_complex(z) for z in row) for row in m)
            out.append(f"matrix = {rows}")
    if df.subalgebra is not None:
        out += ["\n[subalgebra]", "B = arrows " + " ".join(df.subalgebra)]
    if df.generators or df.generator_sources:
        out.append("\n[generators]")
        f = 1 if df.fiber is None else df.fiber.shape[0]
        for name, vecs in df.generators.items():
            chunks = []
            for v in vecs:
                terms = []
                for c in np.flatnonzero(v):
                    arrow = names[c // f] + (f".{c % f}" if f > 1 else "")
                    terms.append(f"{format_complex(v[c])}*{arrow}")
                chunks.append(" ".join(terms))
            out.append(f"{name} = span " + " ; ".join(chunks))
        out += [f"use = {s}" for s in df.generator_sources]
    if df.checks:
        out += ["\n[checks]", " ".join(df.checks)]
    return "\n".join(out) + "\n"


def same_definition(a: DefinitionFile, b: DefinitionFile) -> bool:
    Ga, Gb = a.groupoid, b.groupoid

    def arr(x):
        return None if x is None else np.asarray(x)

    def close(x, y):
        if x is None or y is None:
            return x is None and y is None
        return x.shape == y.shape and np.allclose(x, y, atol=1e-15)

    ca, cb = arr(a.cocycle), arr(b.cocycle)
    if ca is not None and cb is not None:
        mask = Ga.compose >= 0
        cocycles_ok = np.allclose(ca[mask], cb[mask], atol=1e-15)
    else:
        cocycles_ok = ca is None and cb is None
    return (Ga.object_count == Gb.object_count and Ga.d == Gb.d and Ga.r == Gb.r
            and np.array_equal(Ga.compose, Gb.compose) and Ga.arrow_names == Gb.arrow_names
            and cocycles_ok and close(arr(a.fiber), arr(b.fiber))
            and a.subalgebra == b.subalgebra and a.checks == b.checks
            and a.generator_sources == b.generator_sources
            and a.generators.keys() == b.generators.keys()
            and all(len(a.generators[k]) == len(b.generators[k])
                    and all(np.allclose(x, y, atol=1e-15) for x, y in zip(a.generators[k], b.generators[k]))
                    for k in a.generators))


def groupoid_text(G: FiniteGroupoid) -> str:
    """The [groupoid] section alone, for exporting computed groupoids."""
    return serialize(DefinitionFile(G))
