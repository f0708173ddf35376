"""Scenario files: the lattice data and expected values a verification run works from."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

from k3cone import _linalg as la
from k3cone.conegeom import HTPredicate, SearchBox
from k3cone.hilbscheme import HilbLattice, build_hilb
from k3cone.quadlat import DegenerateFormError, LatticeError, LatVec

BUILTINS = ("hilb3-deg6", "hilb2-deg4")

REQUIRED = ("name", "surface_gram", "hilb_n", "polarizations")
OPTIONAL = (
    "mori_generators",
    "ample_generators",
    "ht_predicates",
    "search_box",
    "claim_ids",
    "curve_denominators",
    "expected_operators",
    "pell_t_max",
    "orbit_steps",
    "description",
)


class ScenarioError(ValueError):
    """Base class for scenario input problems."""


class ScenarioParseError(ScenarioError):
    pass


class ScenarioSchemaError(ScenarioError):
    pass


class ScenarioDegenerateError(ScenarioError):
    pass


def _rat_list(value, where: str) -> tuple[Fraction, ...]:
    try:
        return la.vector(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ScenarioSchemaError(f"{where}: {exc}") from None


def _int_matrix(value, where: str) -> tuple[tuple[int, ...], ...]:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise ScenarioSchemaError(f"{where}: expected a list of lists")
    out = []
    for row in value:
        if not all(isinstance(c, int) and not isinstance(c, bool) for c in row):
            raise ScenarioSchemaError(f"{where}: entries must be integers, got {row}")
        out.append(tuple(row))
    return tuple(out)


@dataclass(frozen=True)
class Scenario:
    name: str
    surface_gram: tuple[tuple[int, ...], ...]
    hilb_n: int
    polarizations: tuple[tuple[int, ...], ...]
    mori_generators: tuple[tuple[Fraction, ...], ...] = ()
    ample_generators: tuple[tuple[Fraction, ...], ...] = ()
    ht_predicates: tuple[HTPredicate, ...] = ()
    search_box: SearchBox | None = None
    claim_ids: tuple[str, ...] = ()
    curve_denominators: tuple[int, ...] | None = None
    expected_operators: dict = field(default_factory=dict)
    pell_t_max: int = 10**6
    orbit_steps: int = 20
    description: str = ""

    def hilb(self) -> HilbLattice:
        return build_hilb(self.surface_gram, self.hilb_n, self.polarizations)

    def vectors(self, hl: HilbLattice, key: str) -> list[LatVec]:
        return [hl.lattice.vec(c) for c in getattr(self, key)]

    def expected_matrix(self, key: str):
        m = self.expected_operators.get(key)
        return None if m is None else la.matrix(m)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {
            "name": self.name,
            "surface_gram": [list(r) for r in self.surface_gram],
            "hilb_n": self.hilb_n,
            "polarizations": [list(p) for p in self.polarizations],
            "mori_generators": [[la.fmt(c) for c in v] for v in self.mori_generators],
            "ample_generators": [[la.fmt(c) for c in v] for v in self.ample_generators],
            "ht_predicates": [p.to_dict() for p in self.ht_predicates],
            "claim_ids": list(self.claim_ids),
            "pell_t_max": self.pell_t_max,
            "orbit_steps": self.orbit_steps,
        }
        if self.search_box is not None:
            d["search_box"] = self.search_box.to_dict()
        if self.curve_denominators is not None:
            d["curve_denominators"] = list(self.curve_denominators)
        if self.expected_operators:
            d["expected_operators"] = {
                k: [[la.fmt(c) for c in row] for row in m] for k, m in self.expected_operators.items()
            }
        if self.description:
            d["description"] = self.description
        return d

    @classmethod
    def from_dict(cls, d: Any) -> "Scenario":
        if not isinstance(d, dict):
            raise ScenarioSchemaError("scenario must be a JSON object")
        unknown = sorted(set(d) - set(REQUIRED) - set(OPTIONAL))
        if unknown:
            raise ScenarioSchemaError(f"unknown field(s): {', '.join(unknown)}")
        missing = [k for k in REQUIRED if k not in d]
        if missing:
            raise ScenarioSchemaError(f"missing field(s): {', '.join(missing)}")
        if not isinstance(d["name"], str) or not d["name"]:
            raise ScenarioSchemaError("name: expected a nonempty string")
        gram = _int_matrix(d["surface_gram"], "surface_gram")
        n = d["hilb_n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 2:
            raise ScenarioSchemaError(f"hilb_n: expected an integer >= 2, got {n!r}")
        pols = _int_matrix(d["polarizations"], "polarizations")
        try:
            hl = build_hilb(gram, n, pols)
        except DegenerateFormError as exc:
            raise ScenarioDegenerateError(f"surface_gram: {exc}") from None
        except LatticeError as exc:
            raise ScenarioSchemaError(f"surface_gram/polarizations: {exc}") from None
        rank = hl.lattice.rank

        def vecs(key):
            out = []
            for i, v in enumerate(d.get(key, [])):
                vv = _rat_list(v, f"{key}[{i}]")
                if len(vv) != rank:
                    raise ScenarioSchemaError(f"{key}[{i}]: expected {rank} coordinates")
                out.append(vv)
            return tuple(out)

        try:
            preds = tuple(HTPredicate.from_dict(p) for p in d.get("ht_predicates", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioSchemaError(f"ht_predicates: {exc}") from None
        box = None
        if "search_box" in d:
            try:
                box = SearchBox.from_dict(d["search_box"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ScenarioSchemaError(f"search_box: {exc}") from None
        claim_ids = d.get("claim_ids", [])
        if not isinstance(claim_ids, list) or not all(isinstance(c, str) for c in claim_ids):
            raise ScenarioSchemaError("claim_ids: expected a list of strings")
        from k3cone.claims import REGISTRY  # claims imports this module

        bad = [c for c in claim_ids if c not in REGISTRY]
        if bad:
            raise ScenarioSchemaError(f"claim_ids: unknown claim(s) {', '.join(bad)}")
        dens = d.get("curve_denominators")
        if dens is not None:
            if not isinstance(dens, list) or len(dens) != rank or not all(isinstance(x, int) and x > 0 for x in dens):
                raise ScenarioSchemaError(f"curve_denominators: expected {rank} positive integers")
            dens = tuple(dens)
        ops = d.get("expected_operators", {})
        if not isinstance(ops, dict):
            raise ScenarioSchemaError("expected_operators: expected an object")
        ops_parsed = {}
        for k, m in ops.items():
            try:
                mm = la.matrix(m)
            except (TypeError, ValueError) as exc:
                raise ScenarioSchemaError(f"expected_operators.{k}: {exc}") from None
            if len(mm) != rank or any(len(r) != rank for r in mm):
                raise ScenarioSchemaError(f"expected_operators.{k}: expected a {rank}x{rank} matrix")
            ops_parsed[k] = mm
        for key in ("pell_t_max", "orbit_steps"):
            v = d.get(key)
            if v is not None and (not isinstance(v, int) or isinstance(v, bool) or v < 1):
                raise ScenarioSchemaError(f"{key}: expected a positive integer")
        return cls(
            name=d["name"],
            surface_gram=gram,
            hilb_n=n,
            polarizations=pols,
            mori_generators=vecs("mori_generators"),
            ample_generators=vecs("ample_generators"),
            ht_predicates=preds,
            search_box=box,
            claim_ids=tuple(claim_ids),
            curve_denominators=dens,
            expected_operators=ops_parsed,
            pell_t_max=d.get("pell_t_max", 10**6),
            orbit_steps=d.get("orbit_steps", 20),
            description=d.get("description", ""),
        )


def loads(text: str) -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"invalid JSON: {exc}") from None
    return Scenario.from_dict(data)


def load_scenario(path_or_name: str | Path) -> Scenario:
    """Load a scenario from a JSON file, or one of the built-in names."""
    if str(path_or_name) in BUILTINS:
        text = resources.files("k3cone.data").joinpath(f"{path_or_name}.json").read_text("utf-8")
        return loads(text)
    try:
        text = Path(path_or_name).read_text("utf-8")
    except FileNotFoundError:
        raise ScenarioParseError(f"no such scenario file or built-in: {path_or_name}") from None
    except UnicodeDecodeError as exc:
        raise ScenarioParseError(f"{path_or_name}: not UTF-8 ({exc})") from None
    return loads(text)


def dump_scenario(scn: Scenario) -> str:
    return json.dumps(scn.to_dict(), indent=2, sort_keys=True) + "\n"
