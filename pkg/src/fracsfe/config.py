"""Run configuration: a flat ``key = value`` format with ``[section]`` headers.

Example::

    [problem]
    N = 2
    s = 0.5
    a = 0
    L = 40
    n = 128
    symmetry = radial
    init = gaussian
    init_amplitude = 3
    init_width = 2

    [nonlinearity]
    mass_case = zero
    term = -1, 1
    term = 1, 2

    [solver]
    mode = single
    max_iter = 20000

    [output]
    directory = out
    dump_fields = true
    csv = true

Values are numbers, booleans, bare or quoted strings, or comma separated
lists (optionally in brackets).  ``#`` starts a comment.
"""
from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from typing import Optional

from .errors import FracSFEError, ParseError, ValidationError
from .nonlinearity import MassCase, NonlinearitySpec, find_zeta1
from .solver import SolverConfig
from .spectral import FracParams, Grid
from .symmetry import SymmetryClass

SECTIONS = ("problem", "nonlinearity", "solver", "output")
MODES = ("single", "continuation", "multistart")
INITS = ("gaussian", "tent", "file")

_SOLVER_FIELDS = {f.name: f for f in dataclasses.fields(SolverConfig)}
_KEYS = {
    "problem": {"N", "s", "a", "L", "n", "symmetry", "init", "init_amplitude", "init_width",
                "init_file", "plateau"},
    "nonlinearity": {"mass_case", "term", "zeta2", "eps_schedule", "xi0"},
    "solver": set(_SOLVER_FIELDS) - {"eps_schedule"} | {"mode", "k"},
    "output": {"directory", "dump_fields", "csv"},
}
_REPEATABLE = {("nonlinearity", "term")}

_SECTION_RE = re.compile(r"^\[\s*([A-Za-z_][A-Za-z0-9_]*)\s*\]$")
_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class RunConfig:
    dim: int
    s: float
    a: float
    side: float
    pts: int
    mass_case: MassCase
    terms: tuple
    symmetry: SymmetryClass
    solver: SolverConfig
    zeta2: Optional[float] = None
    xi0: Optional[float] = None
    mode: str = "single"
    k: int = 3
    init: str = "gaussian"
    init_amplitude: float = 1.0
    init_width: Optional[float] = None
    init_file: Optional[str] = None
    plateau: float = 1.5
    directory: str = "out"
    dump_fields: bool = True
    csv: bool = True
    raw: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def grid(self) -> Grid:
        return Grid(self.dim, self.side, self.pts)

    @property
    def frac(self) -> FracParams:
        return FracParams(self.s, self.a)

    def spec(self) -> NonlinearitySpec:
        base = NonlinearitySpec(self.terms, self.mass_case, xi0=self.xi0,
                                crit_exp=self.frac.critical_exponent(self.dim) - 1.0)
        if self.zeta2 is not None:
            return dataclasses.replace(base, zeta2=self.zeta2)
        return base


# -- lexical layer ------------------------------------------------------------------
def _strip_comment(line: str) -> str:
    quote = None
    for i, ch in enumerate(line):
        if ch in "\"'":
            quote = None if quote == ch else (ch if quote is None else quote)
        elif ch == "#" and quote is None:
            return line[:i]
    return line


def _scalar(text: str, line: int, col: int):
    t = text.strip()
    if not t:
        raise ParseError(line, col, "empty value")
    if len(t) >= 2 and t[0] == t[-1] and t[0] in "\"'":
        return t[1:-1]
    low = t.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        pass
    if any(c in t for c in "[]=,\"'"):
        raise ParseError(line, col, f"malformed value {t!r}")
    return t


def _value(text: str, line: int, col: int):
    t = text.strip()
    if t.startswith("[") != t.endswith("]"):
        raise ParseError(line, col, "unbalanced brackets")
    bracketed = t.startswith("[")
    if bracketed:
        t = t[1:-1]
    if "," in t or bracketed:
        items, offset = [], col + (1 if bracketed else 0)
        for piece in t.split(","):
            items.append(_scalar(piece, line, offset))
            offset += len(piece) + 1
        return items
    return _scalar(t, line, col)


def parse_sections(text: str) -> dict:
    """Lexical pass: ``{section: {key: [(value, line), ...]}}``."""
    out = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        stripped = body.strip()
        if not stripped:
            continue
        col = len(body) - len(body.lstrip()) + 1
        if stripped.startswith("["):
            m = _SECTION_RE.match(stripped)
            if not m:
                raise ParseError(lineno, col, f"malformed section header {stripped!r}")
            section = m.group(1).lower()
            if section not in SECTIONS:
                raise ParseError(lineno, col + 1, f"unknown section [{section}]")
            out.setdefault(section, {})
            continue
        if "=" not in body:
            raise ParseError(lineno, col, "expected 'key = value'")
        if section is None:
            raise ParseError(lineno, col, "key outside of any section")
        eq = body.index("=")
        key = body[:eq].strip()
        if not _KEY_RE.match(key):
            raise ParseError(lineno, col, f"malformed key {key!r}")
        if key not in _KEYS[section]:
            raise ParseError(lineno, col, f"unknown key {key!r} in [{section}]")
        entries = out[section].setdefault(key, [])
        if entries and (section, key) not in _REPEATABLE:
            raise ParseError(lineno, col, f"duplicate key {key!r} in [{section}]")
        vcol = eq + 2 + (len(body[eq + 1:]) - len(body[eq + 1:].lstrip()))
        entries.append((_value(body[eq + 1:], lineno, vcol), lineno))
    return out


# -- semantic layer ------------------------------------------------------------------
class _Reader:
    """Pulls typed values out of the lexical dict and records every violation."""

    def __init__(self, sections: dict):
        self.sections = sections
        self.errs = []

    def get(self, section, key, kind, default=None, required=False):
        entries = self.sections.get(section, {}).get(key)
        if not entries:
            if required:
                self.errs.append(f"[{section}] {key} is required")
            return default
        value, line = entries[0]
        try:
            return _coerce(value, kind)
        except (TypeError, ValueError):
            self.errs.append(f"[{section}] {key} (line {line}): expected {kind.__name__ if isinstance(kind, type) else kind}")
            return default


def _coerce(value, kind):
    if kind is bool:
        if not isinstance(value, bool):
            raise TypeError
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeError
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeError
        return float(value)
    if kind is str:
        if not isinstance(value, str):
            raise TypeError
        return value
    if kind == "floats":
        vals = value if isinstance(value, list) else [value]
        return tuple(_coerce(v, float) for v in vals)
    raise ValueError(kind)


def _solver_config(rd: _Reader, eps_schedule):
    kwargs = {}
    for name, fld in _SOLVER_FIELDS.items():
        if name == "eps_schedule":
            continue
        default = fld.default
        if isinstance(default, tuple):
            kind = "floats"
        else:
            kind = type(default)
        val = rd.get("solver", name, kind)
        if val is not None:
            kwargs[name] = val
    if eps_schedule is not None:
        kwargs["eps_schedule"] = eps_schedule
    try:
        return SolverConfig(**kwargs)
    except ValidationError as exc:
        rd.errs.extend(f"[solver] {v}" for v in exc.violations)
    except (TypeError, ValueError) as exc:
        rd.errs.append(f"[solver] {exc}")
    return None


def parse_config(text: str) -> RunConfig:
    """Parse and validate; raises ParseError or ValidationError listing every violation."""
    sections = parse_sections(text)
    rd = _Reader(sections)
    errs = rd.errs
    N = rd.get("problem", "N", int, required=True)
    s = rd.get("problem", "s", float, required=True)
    a = rd.get("problem", "a", float, 0.0)
    L = rd.get("problem", "L", float, required=True)
    n = rd.get("problem", "n", int, required=True)
    sym_text = rd.get("problem", "symmetry", str, "radial")
    init = rd.get("problem", "init", str, "gaussian")
    init_amplitude = rd.get("problem", "init_amplitude", float, 1.0)
    init_width = rd.get("problem", "init_width", float)
    init_file = rd.get("problem", "init_file", str)
    plateau = rd.get("problem", "plateau", float, 1.5)
    mass = rd.get("nonlinearity", "mass_case", str, required=True)
    zeta2 = rd.get("nonlinearity", "zeta2", float)
    xi0 = rd.get("nonlinearity", "xi0", float)
    eps_schedule = rd.get("nonlinearity", "eps_schedule", "floats")
    mode = rd.get("solver", "mode", str, "single")
    k = rd.get("solver", "k", int, 3)
    directory = rd.get("output", "directory", str, "out")
    dump_fields = rd.get("output", "dump_fields", bool, True)
    csv = rd.get("output", "csv", bool, True)

    terms = []
    for value, line in sections.get("nonlinearity", {}).get("term", []):
        try:
            c, p = _coerce(value, "floats")
            terms.append((c, p))
        except (TypeError, ValueError):
            errs.append(f"[nonlinearity] term (line {line}): expected 'coeff, exponent'")
    if not terms and "nonlinearity" in sections:
        errs.append("[nonlinearity] at least one term is required")

    if N is not None and N < 1:
        errs.append("N must be >= 1")
    if s is not None and not 0.0 < s <= 1.0:
        errs.append("s must lie in (0, 1]")
    if a is not None and a < 0.0:
        errs.append("a must be >= 0")
    if L is not None and not L > 0.0:
        errs.append("L must be positive")
    if n is not None and (n < 4 or n % 2):
        errs.append("n must be an even integer >= 4")
    if N is not None and s is not None and N <= 2 * s:
        errs.append(f"N > 2s is required, got N = {N}, s = {s}")

    try:
        sym = SymmetryClass.parse(sym_text)
    except ValueError:
        errs.append(f"unknown symmetry {sym_text!r}")
        sym = None
    if sym is not None and N is not None:
        errs.extend(sym.violations(N))

    try:
        mass_case = MassCase(mass) if mass is not None else None
    except ValueError:
        errs.append(f"mass_case must be 'zero' or 'positive', got {mass!r}")
        mass_case = None
    if mass_case is MassCase.ZERO and a not in (None, 0.0):
        errs.append("zero mass requires a = 0")
    if mass_case is MassCase.POSITIVE and a is not None and not a > 0.0:
        errs.append("positive mass requires a > 0")

    if mode not in MODES:
        errs.append(f"mode must be one of {', '.join(MODES)}")
    if k is not None and k < 1:
        errs.append("k must be >= 1")
    if init not in INITS:
        errs.append(f"init must be one of {', '.join(INITS)}")
    if init == "file" and not init_file:
        errs.append("init = file needs init_file")
    if init == "tent" and sym is not None and not sym.is_block:
        errs.append("init = tent needs a block symmetry class")
    if init_width is not None and not init_width > 0.0:
        errs.append("init_width must be positive")
    if not plateau > 0.0:
        errs.append("plateau must be positive")

    solver = _solver_config(rd, eps_schedule)

    cfg = None
    structural = None not in (N, s, a, L, n, sym, mass_case) and terms
    if structural and not errs:
        try:
            cfg = RunConfig(N, s, a, L, n, mass_case, tuple(terms), sym, solver, zeta2, xi0, mode, k,
                            init, init_amplitude, init_width, init_file, plateau,
                            directory, dump_fields, csv, raw=sections)
            spec = cfg.spec()
            fp = cfg.frac
            errs.extend(spec.violations(N, fp))
            if zeta2 is not None:
                z1 = find_zeta1(dataclasses.replace(spec, zeta2=None), fp if a > 0 else None, t_scan=zeta2)
                if not zeta2 > z1:
                    errs.append(f"zeta2 = {zeta2} must exceed zeta1 = {z1}")
        except (FracSFEError, ValueError) as exc:
            errs.append(str(exc))
    if errs:
        raise ValidationError(errs)
    return cfg


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
