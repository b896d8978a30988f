"""Model configuration files and the shipped fixtures.

A model file is TOML: a group presentation, the CM data (H_F, H_K and
the conjugation), a reciprocity block (synthetic or explicit) and a list
of torus blocks.  The schema is validated strictly; unknown keys are
rejected before any computation runs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .abelian import AbHom, FinAb, hom_from_pairs
from .actions import TorusModel, make_torus
from .cm import CMContext, cm_context
from .errors import ConfigError
from .groups import DEFAULT_MAX_ORDER, make_group
from .plectic import GaloisContext
from .recip import RecipModel, synthesize_cartesian_model

MODEL_DIR_ENV = "PLECTIC_CM_MODEL_DIR"
SCHEMA_VERSION = 1


@dataclass
class ModelBundle:
    """A fully validated model: contexts, reciprocity data and tori."""

    id: str
    description: str
    context: GaloisContext
    cm: CMContext
    recip: RecipModel
    tori: dict[str, TorusModel]
    source: str

    def torus(self, name: str) -> TorusModel:
        if name not in self.tori:
            raise ConfigError(f"model {self.id!r} has no torus named {name!r}")
        return self.tori[name]


def _expect_keys(table: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(table) - allowed
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)} in {where}")
    missing = required - set(table)
    if missing:
        raise ConfigError(f"missing keys {sorted(missing)} in {where}")


def _names(value, where: str) -> list[str]:
    if not isinstance(value, list):
        raise ConfigError(f"{where} must be a list of element names")
    return [str(x) for x in value]


def _matrix(value, where: str) -> tuple[tuple[int, ...], ...]:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise ConfigError(f"{where} must be a list of integer rows")
    return tuple(tuple(int(x) for x in r) for r in value)


def _finab_with_rec(block: dict, quotient, where: str) -> tuple[FinAb, AbHom]:
    """Parse {factors = [...], rec = [names]} into a group and its
    reciprocity map onto the given abelianization model."""
    _expect_keys(block, {"factors", "rec"}, {"factors", "rec"}, where)
    group = FinAb(tuple(int(d) for d in block["factors"]))
    names = _names(block["rec"], f"{where}.rec")
    if len(names) != group.rank:
        raise ConfigError(f"{where}.rec needs one element name per factor")
    parent = quotient.source.parent
    cols = [quotient.project(parent.index_of(n)) for n in names]
    try:
        rec = AbHom.from_columns(group, quotient.group, cols)
    except ValueError as exc:
        raise ConfigError(f"{where}.rec is not well defined: {exc}") from None
    return group, rec


def _load_toml(path: Path) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def parse_model(raw: dict, source: str = "<memory>") -> ModelBundle:
    _expect_keys(raw, {"schema", "id", "description", "group", "cm", "recip", "torus"},
                 {"schema", "id", "group", "cm", "recip"}, "the model file")
    if int(raw["schema"]) != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {raw['schema']}")
    model_id = str(raw["id"])
    description = str(raw.get("description", ""))

    gblock = raw["group"]
    _expect_keys(gblock, {"units_mod", "table", "max_order"}, set(), "[group]")
    max_order = int(gblock.get("max_order", DEFAULT_MAX_ORDER))
    presentation = {k: v for k, v in gblock.items() if k in ("units_mod", "table")}
    if len(presentation) != 1:
        raise ConfigError("[group] needs exactly one of units_mod or table")
    try:
        gamma = make_group(presentation, max_order=max_order)
    except Exception as exc:
        raise ConfigError(f"[group] is invalid: {exc}") from exc

    cmblock = raw["cm"]
    _expect_keys(cmblock, {"h_f", "h_k", "conjugation", "section"},
                 {"h_f", "h_k", "conjugation"}, "[cm]")
    from .groups import subgroup

    h_f = subgroup(gamma, _names(cmblock["h_f"], "[cm].h_f"))
    section = None
    if "section" in cmblock:
        section = [gamma.index_of(n) for n in _names(cmblock["section"], "[cm].section")]
    context = GaloisContext(gamma, h_f, section=section)
    cm = cm_context(context, _names(cmblock["h_k"], "[cm].h_k"), str(cmblock["conjugation"]))

    recip = _parse_recip(raw["recip"], cm, model_id)

    tori: dict[str, TorusModel] = {}
    for i, tblock in enumerate(raw.get("torus", [])):
        where = f"[[torus]] #{i}"
        _expect_keys(tblock, {"name", "vz", "i_r"}, {"name", "vz", "i_r"}, where)
        name = str(tblock["name"])
        if name in tori:
            raise ConfigError(f"duplicate torus name {name!r}")
        vz = tblock["vz"]
        i_r = tblock["i_r"]
        if not isinstance(vz, str):
            vz = [[int(x) for x in row] for row in vz]
        if not isinstance(i_r, str):
            i_r = [[int(x) for x in row] for row in i_r]
        try:
            tori[name] = make_torus(recip, name, vz, i_r)
        except Exception as exc:
            raise ConfigError(f"{where} ({name!r}) is invalid: {exc}") from exc

    return ModelBundle(model_id, description, context, cm, recip, tori, source)


def _parse_recip(block: dict, cm: CMContext, model_id: str) -> RecipModel:
    mode = block.get("mode")
    if mode == "synthetic":
        _expect_keys(block, {"mode", "i_f"}, {"mode"}, "[recip]")
        i_f = rec_f = None
        if "i_f" in block:
            i_f, rec_f = _finab_with_rec(block["i_f"], cm.h_f_ab, "[recip.i_f]")
        return synthesize_cartesian_model(cm, i_f=i_f, rec_f=rec_f, name=model_id)
    if mode != "explicit":
        raise ConfigError("[recip].mode must be 'synthetic' or 'explicit'")

    _expect_keys(block, {"mode", "i_q", "i_f", "i_k", "maps", "class_group"},
                 {"mode", "i_q", "i_f", "i_k", "maps"}, "[recip]")
    from .groups import Subgroup, abelianization

    gamma = cm.base.gamma
    gamma_ab = abelianization(Subgroup(gamma, tuple(gamma.elements())))
    i_q, rec_q = _finab_with_rec(block["i_q"], gamma_ab, "[recip.i_q]")
    i_f, rec_f = _finab_with_rec(block["i_f"], cm.h_f_ab, "[recip.i_f]")
    i_k, rec_k = _finab_with_rec(block["i_k"], cm.h_k_ab, "[recip.i_k]")

    maps = block["maps"]
    _expect_keys(maps, {"n_kf", "i_kf", "i_fq", "sign_f", "chi_cyc"},
                 {"n_kf", "i_kf", "i_fq", "sign_f", "chi_cyc"}, "[recip.maps]")

    def hom(rows, dom, cod, what):
        try:
            return AbHom(dom, cod, _matrix(rows, what))
        except ValueError as exc:
            raise ConfigError(f"{what} is not well defined: {exc}") from None

    n_kf = hom(maps["n_kf"], i_k, i_f, "[recip.maps].n_kf")
    i_kf = hom(maps["i_kf"], i_f, i_k, "[recip.maps].i_kf")
    i_fq = hom(maps["i_fq"], i_q, i_f, "[recip.maps].i_fq")
    sign_f = hom(maps["sign_f"], cm.sign_group, i_f, "[recip.maps].sign_f")

    pairs = []
    for entry in maps["chi_cyc"]:
        if not isinstance(entry, list) or len(entry) != 2:
            raise ConfigError("[recip.maps].chi_cyc entries must be [element, vector] pairs")
        el, vec = entry
        pairs.append((gamma_ab.project(gamma.index_of(str(el))),
                      tuple(int(x) for x in vec)))
    try:
        chi_cyc = hom_from_pairs(gamma_ab.group, i_q, pairs)
    except Exception as exc:
        raise ConfigError(f"[recip.maps].chi_cyc is invalid: {exc}") from exc

    cl_k = cl_map = None
    if "class_group" in block:
        cblock = block["class_group"]
        _expect_keys(cblock, {"factors", "cl_map"}, {"factors", "cl_map"},
                     "[recip.class_group]")
        cl_k = FinAb(tuple(int(d) for d in cblock["factors"]))
        cl_map = hom(cblock["cl_map"], i_k, cl_k, "[recip.class_group].cl_map")

    return RecipModel(
        cm, i_q=i_q, i_f=i_f, i_k=i_k,
        rec_q=rec_q, rec_f=rec_f, rec_k=rec_k,
        n_kf=n_kf, i_kf=i_kf, i_fq=i_fq,
        sign_f=sign_f, chi_cyc=chi_cyc,
        cl_k=cl_k, cl_map=cl_map, name=model_id,
    )


# ---------------------------------------------------------------------------
# Fixture registry
# ---------------------------------------------------------------------------

def _fixture_dir() -> Path:
    return Path(__file__).parent / "fixtures"


def available_models() -> dict[str, Path]:
    """Shipped fixtures plus any *.toml in the model directory env var."""
    out: dict[str, Path] = {}
    fixtures = _fixture_dir()
    if fixtures.is_dir():
        for path in sorted(fixtures.glob("*.toml")):
            out[path.stem] = path
    extra = os.environ.get(MODEL_DIR_ENV)
    if extra:
        for path in sorted(Path(extra).glob("*.toml")):
            out[path.stem] = path
    return out


def load_model(name_or_path: Union[str, Path]) -> ModelBundle:
    """Load a model by fixture id or by path to a TOML file."""
    path = Path(name_or_path)
    if not path.suffix == ".toml" or not path.exists():
        registry = available_models()
        key = str(name_or_path)
        if key in registry:
            path = registry[key]
        elif not path.exists():
            known = ", ".join(sorted(registry)) or "none"
            raise ConfigError(f"unknown model {key!r} (known: {known})")
    raw = _load_toml(path)
    bundle = parse_model(raw, source=str(path))
    return bundle
