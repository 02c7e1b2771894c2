"""Scenario configuration files.

Format is flat ``key = value`` text, one entry per line, ``#`` starts a
comment. Values may be numeric expressions using ``pi``, ``sqrt`` and
complex literals (``0.1+0.05j``)::

    scenario = damped
    kappa = 1e8/75

Unspecified keys take per-scenario defaults (see :data:`DEFAULTS`). A CSV
written by ``sim run`` carries its config in ``#@`` header lines and can be
passed back to ``load_config`` to regenerate it.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .errors import ConfigError, DimensionError
from .evolve import TimeGrid
from .hilbert import ModeDims
from .measures import BellStateId
from .model import CouplerParams
from .series import CONFIG_PREFIX

SCENARIOS = ("truncation", "probabilities", "bell_fidelities", "entropy", "chsh", "damped")
METHODS = ("integrate", "spectral")

_CHI_DAMPED = 1e8

_CLOSED = dict(
    chi_a=25.0,
    chi_b=25.0,
    alpha=math.pi / 25,
    epsilon=math.pi / 25,
    kappa_a=0.0,
    kappa_b=0.0,
    time_unit="1/chi",
    dim_a=10,
    dim_b=10,
    t_start=0.0,
    t_end=50.0,
    n_steps=2000,
    method="integrate",
    initial=(2, 0),
)

DEFAULTS = {
    "truncation": dict(_CLOSED),
    "probabilities": dict(_CLOSED, targets=((2, 0), (0, 2), (1, 2))),
    "bell_fidelities": dict(_CLOSED, targets=("B1", "B2", "P1", "P2")),
    "entropy": dict(_CLOSED),
    "chsh": dict(_CLOSED),
    "damped": dict(
        _CLOSED,
        chi_a=_CHI_DAMPED,
        chi_b=_CHI_DAMPED,
        alpha=_CHI_DAMPED / 20,
        epsilon=_CHI_DAMPED / 40,
        kappa_a=_CHI_DAMPED / 500,
        kappa_b=_CHI_DAMPED / 500,
        time_unit="s",
        dim_a=6,
        dim_b=6,
        t_end=2e-6,
        targets=("B1", "B2"),
    ),
}

# Shorthands expanding to both modes.
_PAIRED = {"chi": ("chi_a", "chi_b"), "kappa": ("kappa_a", "kappa_b"), "dims": ("dim_a", "dim_b")}

KNOWN_KEYS = frozenset(
    {"scenario", "output_path", "targets"} | set(_CLOSED) | set(_PAIRED)
)


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    params: CouplerParams = field(default_factory=CouplerParams)
    dims: ModeDims = field(default_factory=ModeDims)
    grid: TimeGrid = field(default_factory=TimeGrid)
    targets: tuple = ()
    method: str = "integrate"
    initial: tuple[int, int] = (2, 0)
    output_path: Optional[str] = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}", field="scenario")
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; expected one of {METHODS}", field="method")
        n, m = self.initial
        if not (0 <= n < self.dims.dim_a and 0 <= m < self.dims.dim_b):
            raise ConfigError(f"initial Fock pair {self.initial} outside dims {self.dims.shape}", field="initial")
        if self.scenario == "truncation":
            if self.initial != (2, 0):
                raise ConfigError("truncation compares against the closed form, which starts in |2,0>", field="initial")
            a, e = complex(self.params.alpha), complex(self.params.epsilon)
            if a.imag or e.imag or a.real < 0 or e.real < 0:
                raise ConfigError("truncation needs real, non-negative alpha and epsilon", field="alpha/epsilon")
        if self.scenario == "probabilities":
            for n, m in self.targets:
                if not (0 <= n < self.dims.dim_a and 0 <= m < self.dims.dim_b):
                    raise ConfigError(f"target ({n}, {m}) outside dims {self.dims.shape}", field="targets")
        if self.scenario in ("bell_fidelities", "damped"):
            if not self.targets:
                raise ConfigError("at least one target state is required", field="targets")
            for t in self.targets:
                BellStateId(t)

    def with_overrides(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)

    def to_lines(self) -> list[str]:
        """Canonical ``key = value`` lines; ``load_config`` reads them back."""
        p, d, g = self.params, self.dims, self.grid
        lines = [
            f"scenario = {self.scenario}",
            f"chi_a = {_num(p.chi_a)}",
            f"chi_b = {_num(p.chi_b)}",
            f"alpha = {_num(p.alpha)}",
            f"epsilon = {_num(p.epsilon)}",
            f"kappa_a = {_num(p.kappa_a)}",
            f"kappa_b = {_num(p.kappa_b)}",
            f"time_unit = {p.time_unit}",
            f"dim_a = {d.dim_a}",
            f"dim_b = {d.dim_b}",
            f"t_start = {_num(g.t_start)}",
            f"t_end = {_num(g.t_end)}",
            f"n_steps = {g.n_steps}",
            f"method = {self.method}",
            f"initial = {self.initial[0]},{self.initial[1]}",
        ]
        if self.targets:
            lines.append(f"targets = {_format_targets(self.targets)}")
        return lines


def _num(x) -> str:
    x = complex(x)
    if x.imag == 0:
        return format(x.real, ".17g")
    return f"{format(x.real, '.17g')}{format(x.imag, '+.17g')}j"


def _format_targets(targets) -> str:
    if targets and isinstance(targets[0], tuple):
        return "; ".join(f"{n},{m}" for n, m in targets)
    return ", ".join(BellStateId(t).value for t in targets)


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_NAMES = {"pi": math.pi, "e": math.e}


def parse_number(text: str) -> complex | float:
    """Evaluate a restricted arithmetic expression (no names beyond pi, e, sqrt)."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            return node.value
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id == "sqrt"
            and len(node.args) == 1
        ):
            return math.sqrt(ev(node.args[0]))
        raise ValueError(f"unsupported expression element {ast.dump(node)[:40]}")

    value = ev(ast.parse(text.strip(), mode="eval"))
    if isinstance(value, complex) and value.imag == 0:
        value = value.real
    return value


def _parse_pair(text: str) -> tuple[int, int]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected 'n,m', got {text!r}")
    return int(parts[0]), int(parts[1])


def _parse_targets(text: str) -> tuple:
    text = text.strip()
    if ";" in text or text[:1].isdigit():
        return tuple(_parse_pair(chunk) for chunk in text.split(";") if chunk.strip())
    names = tuple(chunk.strip() for chunk in text.split(",") if chunk.strip())
    for name in names:
        try:
            BellStateId(name)
        except ValueError:
            raise ValueError(f"unknown target state {name!r}") from None
    return names


def _real(key, value):
    if isinstance(value, complex):
        raise ConfigError(f"must be real, got {value}", field=key)
    return float(value)


def parse_entries(lines) -> dict[str, tuple[str, int]]:
    """Map key -> (raw value, line number), rejecting unknown and repeated keys."""
    entries = {}
    for lineno, raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}", field=key, line=lineno)
        if key in entries:
            raise ConfigError(f"key {key!r} given twice", field=key, line=lineno)
        entries[key] = (value.strip(), lineno)
    return entries


def build_config(entries: dict[str, tuple[str, int]]) -> ScenarioConfig:
    if "scenario" not in entries:
        raise ConfigError("missing required key", field="scenario")
    scenario = entries["scenario"][0]
    if scenario not in SCENARIOS:
        raise ConfigError(
            f"unknown scenario {scenario!r}; expected one of {SCENARIOS}",
            field="scenario",
            line=entries["scenario"][1],
        )
    values = dict(DEFAULTS[scenario])

    # Shorthands first so explicit per-mode keys win.
    ordered = sorted(entries.items(), key=lambda kv: kv[0] not in _PAIRED)
    for key, (raw, lineno) in ordered:
        if key == "scenario":
            continue
        try:
            if key in ("time_unit", "method", "output_path"):
                parsed = raw
            elif key == "targets":
                parsed = _parse_targets(raw)
            elif key == "initial":
                parsed = _parse_pair(raw)
            elif key == "dims":
                parsed = _parse_pair(raw)
            elif key in ("dim_a", "dim_b", "n_steps"):
                parsed = int(raw)
            else:
                parsed = parse_number(raw)
        except (ValueError, SyntaxError, TypeError, ZeroDivisionError) as exc:
            raise ConfigError(f"cannot parse {raw!r}: {exc}", field=key, line=lineno) from None
        if key == "dims":
            values["dim_a"], values["dim_b"] = parsed
        elif key in _PAIRED:
            for k in _PAIRED[key]:
                values[k] = parsed
        else:
            values[key] = parsed

    def line_of(*keys):
        for k in keys:
            if k in entries:
                return entries[k][1]
        return None

    try:
        params = CouplerParams(
            chi_a=_real("chi_a", values["chi_a"]),
            chi_b=_real("chi_b", values["chi_b"]),
            epsilon=values["epsilon"],
            alpha=values["alpha"],
            kappa_a=_real("kappa_a", values["kappa_a"]),
            kappa_b=_real("kappa_b", values["kappa_b"]),
            time_unit=values["time_unit"],
        )
    except ConfigError as exc:
        if exc.line is None and exc.field:
            raise ConfigError(str(exc), line=line_of(exc.field, "kappa")) from None
        raise
    try:
        dims = ModeDims(values["dim_a"], values["dim_b"])
    except DimensionError as exc:
        raise ConfigError(str(exc), field="dims", line=line_of("dim_a", "dim_b", "dims")) from None
    try:
        grid = TimeGrid(_real("t_start", values["t_start"]), _real("t_end", values["t_end"]), values["n_steps"])
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc), field="grid", line=line_of("t_end", "t_start", "n_steps")) from None
    try:
        return ScenarioConfig(
            scenario=scenario,
            params=params,
            dims=dims,
            grid=grid,
            targets=tuple(values.get("targets", ())),
            method=values["method"],
            initial=tuple(values["initial"]),
            output_path=values.get("output_path"),
        )
    except ConfigError as exc:
        raise ConfigError(str(exc), line=line_of(exc.field or "")) from None
    except ValueError as exc:
        raise ConfigError(str(exc), field="targets", line=line_of("targets")) from None


def read_config_lines(path) -> list[tuple[int, str]]:
    """Numbered config lines; CSV outputs contribute only their ``#@`` header."""
    path = Path(path)
    text = path.read_text()
    numbered = list(enumerate(text.splitlines(), start=1))
    if any(line.startswith(CONFIG_PREFIX) for _, line in numbered):
        return [(n, line[len(CONFIG_PREFIX):]) for n, line in numbered if line.startswith(CONFIG_PREFIX)]
    return numbered


def load_config(path) -> ScenarioConfig:
    try:
        lines = read_config_lines(path)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return build_config(parse_entries(lines))


def config_from_text(text: str) -> ScenarioConfig:
    return build_config(parse_entries(enumerate(text.splitlines(), start=1)))
