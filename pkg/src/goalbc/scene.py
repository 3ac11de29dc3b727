"""Requirement scenes, the boundary-condition checker and BC reduction."""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import cached_property

from .buchi import LassoTrace
from .ltl import Formula, Not, TraceFormula, atoms_of, conj, formula_size
from .oracle import equiv, implies, is_sat
from .parser import LtlSyntaxError, parse


class SceneError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Scene:
    name: str
    atoms: tuple[str, ...]
    fusible: tuple[str, ...]
    domain: tuple[tuple[str, Formula], ...]
    goals: tuple[tuple[str, Formula], ...]

    def __post_init__(self):
        if not self.goals:
            raise SceneError("a scene needs at least one goal")
        names = [n for n, _ in self.goals]
        if len(set(names)) != len(names):
            raise SceneError("duplicate goal name")
        known = set(self.atoms)
        if not set(self.fusible) <= known:
            raise SceneError(f"fusible atoms {sorted(set(self.fusible) - known)} are not declared")
        for label, f in self.domain + self.goals:
            extra = atoms_of(f) - known
            if extra:
                raise SceneError(f"{label} uses undeclared atoms {sorted(extra)}")

    @property
    def n(self) -> int:
        return len(self.goals)

    @property
    def goal_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.goals)

    @property
    def goal_formulas(self) -> tuple[Formula, ...]:
        return tuple(f for _, f in self.goals)

    @cached_property
    def dom(self) -> Formula:
        """Conjunction of the domain properties (``true`` when there are none)."""
        return conj(f for _, f in self.domain)

    @cached_property
    def all_goals(self) -> Formula:
        return conj(self.goal_formulas)

    def others(self, i: int) -> Formula:
        """Conjunction of every goal except goal ``i`` (0-based)."""
        return conj(f for k, f in enumerate(self.goal_formulas) if k != i)

    def goal_index(self, name: str) -> int:
        return self.goal_names.index(name)

    def reduced(self, scope) -> Scene:
        """Keep the goals in ``scope`` and demote the rest to domain properties."""
        scope = set(scope)
        keep = tuple((n, f) for n, f in self.goals if n in scope)
        moved = tuple((n, f) for n, f in self.goals if n not in scope)
        return Scene(self.name, self.atoms, self.fusible, self.domain + moved, keep)

    def with_fusible(self, fusible) -> Scene:
        return Scene(self.name, self.atoms, tuple(fusible), self.domain, self.goals)


# --------------------------------------------------------------------------
# scene files

_SECTION_RE = re.compile(r"^\[(\w+)\]$")
_ENTRY_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.+)$")
_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _strip_comment(line: str) -> str:
    out, quoted = [], False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out).strip()


def _string_value(raw: str, lineno: int) -> str:
    if len(raw) < 2 or raw[0] != '"' or raw[-1] != '"':
        raise SceneError(f"expected a quoted string, got {raw}", lineno)
    return raw[1:-1]


def _list_value(raw: str, lineno: int) -> tuple[str, ...]:
    if not (raw.startswith("[") and raw.endswith("]")):
        raise SceneError(f"expected a list like [a, b], got {raw}", lineno)
    items = [x.strip() for x in raw[1:-1].split(",") if x.strip()]
    for x in items:
        if not _IDENT_RE.match(x):
            raise SceneError(f"bad identifier {x!r}", lineno)
    return tuple(items)


def load_scene(text: str) -> Scene:
    """Parse the ``[scene]`` / ``[domain]`` / ``[goals]`` text format."""
    section = None
    meta: dict[str, object] = {}
    entries: dict[str, list[tuple[str, Formula]]] = {"domain": [], "goals": []}
    seen: dict[str, set[str]] = {"domain": set(), "goals": set()}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(line)
        if not line:
            continue
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1)
            if section not in ("scene", "domain", "goals"):
                raise SceneError(f"unknown section [{section}]", lineno)
            continue
        m = _ENTRY_RE.match(line)
        if m is None or section is None:
            raise SceneError(f"cannot read {line!r}", lineno)
        key, raw = m.group(1), m.group(2).strip()
        if section == "scene":
            if key == "name":
                meta["name"] = _string_value(raw, lineno)
            elif key in ("atoms", "fusible"):
                meta[key] = _list_value(raw, lineno)
            else:
                raise SceneError(f"unknown key {key!r} in [scene]", lineno)
            continue
        if key in seen[section]:
            raise SceneError(f"duplicate name {key!r} in [{section}]", lineno)
        seen[section].add(key)
        try:
            f = parse(_string_value(raw, lineno))
        except LtlSyntaxError as e:
            raise SceneError(f"{key}: {e}", lineno) from e
        entries[section].append((key, f))
    if "atoms" not in meta:
        raise SceneError("[scene] must declare atoms")
    atoms = meta["atoms"]
    return Scene(
        name=str(meta.get("name", "")),
        atoms=atoms,
        fusible=meta.get("fusible", atoms),
        domain=tuple(entries["domain"]),
        goals=tuple(entries["goals"]),
    )


def dump_scene(s: Scene) -> str:
    lines = ["[scene]", f'name = "{s.name}"', f"atoms = [{', '.join(s.atoms)}]"]
    lines.append(f"fusible = [{', '.join(s.fusible)}]")
    for title, items in (("domain", s.domain), ("goals", s.goals)):
        lines.append(f"[{title}]")
        lines.extend(f'{n} = "{f}"' for n, f in items)
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# boundary conditions


@dataclass(frozen=True)
class BcVerdict:
    logical_inconsistency: bool
    minimality: tuple[bool, ...]
    non_triviality: bool

    @property
    def is_bc(self) -> bool:
        return self.logical_inconsistency and all(self.minimality) and self.non_triviality

    def to_json(self) -> dict:
        return {
            "is_bc": self.is_bc,
            "logical_inconsistency": self.logical_inconsistency,
            "minimality": list(self.minimality),
            "non_triviality": self.non_triviality,
        }


class BcKind(enum.Enum):
    SYNTACTIC = "Syntactic"
    TRACE_FORMULA = "TraceFormula"
    WORD = "Word"


@dataclass(frozen=True)
class BoundaryCondition:
    kind: BcKind
    scope: tuple[str, ...]
    formula: Formula | None = None
    word: LassoTrace | None = None
    conflict_atom: str | None = None
    verdict: BcVerdict | None = None
    trace: TraceFormula | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind is BcKind.WORD:
            if self.word is None or self.formula is not None:
                raise ValueError("a Word BC carries a word and no formula")
        elif self.formula is None:
            raise ValueError(f"a {self.kind.value} BC needs a formula")

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.formula is not None:
            out["formula"] = self.formula.text
        if self.word is not None:
            out["word"] = self.word.to_json()
        out["scope"] = list(self.scope)
        if self.conflict_atom is not None:
            out["conflict_atom"] = self.conflict_atom
        out["verdict"] = None if self.verdict is None else self.verdict.to_json()
        return out


def _check_atoms(s: Scene, f: Formula) -> None:
    extra = atoms_of(f) - set(s.atoms)
    if extra:
        raise SceneError(f"formula uses atoms {sorted(extra)} not declared in the scene")


def validate_bc(s: Scene, f: Formula) -> BcVerdict:
    """Check logical inconsistency, per-goal minimality and non-triviality."""
    _check_atoms(s, f)
    inconsistent = not is_sat(conj([s.dom, s.all_goals, f]))
    minimal = tuple(is_sat(conj([s.dom, s.others(i), f])) for i in range(s.n))
    nontrivial = not equiv(f, Not(s.all_goals))
    return BcVerdict(inconsistent, minimal, nontrivial)


def is_bc(s: Scene, f: Formula) -> bool:
    """``validate_bc(s, f).is_bc`` without evaluating clauses past a failure."""
    _check_atoms(s, f)
    if is_sat(conj([s.dom, s.all_goals, f])):
        return False
    if not all(is_sat(conj([s.dom, s.others(i), f])) for i in range(s.n)):
        return False
    return not equiv(f, Not(s.all_goals))


def find_extra_goals(s: Scene) -> list[str]:
    """Goals implied by the domain together with the remaining goals."""
    return [
        name
        for i, (name, g) in enumerate(s.goals)
        if implies(conj([s.dom, s.others(i)]), g)
    ]


def has_influential_dom(s: Scene) -> bool:
    return bool(s.domain) and not implies(s.all_goals, s.dom)


def ngd(s: Scene) -> Formula:
    """The negation of the domain and goals, ``!(Dom & G)``."""
    if not s.domain:
        return Not(s.all_goals)
    return Not(conj([s.dom, s.all_goals]))


def is_witness(s: Scene, f: Formula, bc: Formula) -> bool:
    """``f`` witnesses ``bc`` when ``bc & !f`` is no longer a BC."""
    return not is_bc(s, conj([bc, Not(f)]))


def more_general(f1: Formula, f2: Formula) -> bool:
    return implies(f2, f1) and not equiv(f1, f2)


def _order_key(b: BoundaryCondition):
    return (formula_size(b.formula), b.formula.text)


def contrasty_reduce(s: Scene, bcs: list[BoundaryCondition]) -> list[BoundaryCondition]:
    """Drop BCs that have a witness among the kept ones.

    BCs are visited smallest first. Among mutual witnesses the smaller one
    survives. Word BCs carry no formula and pass through untouched. The
    result keeps the input order.
    """
    formulas = [b for b in bcs if b.formula is not None]
    if len(formulas) < 2:
        return list(bcs)
    order = sorted(range(len(formulas)), key=lambda k: _order_key(formulas[k]))
    memo: dict[tuple[int, int], bool] = {}

    def wit(w: int, b: int) -> bool:
        if (w, b) not in memo:
            memo[w, b] = is_witness(s, formulas[w].formula, formulas[b].formula)
        return memo[w, b]

    rank = {k: r for r, k in enumerate(order)}

    def dominates(w: int, b: int) -> bool:
        return wit(w, b) and (rank[w] < rank[b] or not wit(b, w))

    kept: list[int] = []
    for b in order:
        if any(dominates(w, b) for w in kept):
            continue
        kept = [k for k in kept if not dominates(b, k)]
        kept.append(b)
    # an element dropped earlier may have lost its witness since
    for b in order:
        if b not in kept and not any(wit(w, b) for w in kept):
            kept.append(b)
    keep_ids = {id(formulas[k]) for k in kept}
    return [b for b in bcs if b.formula is None or id(b) in keep_ids]
