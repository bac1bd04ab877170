"""Stable JSON document formats for instances, subsets, witnesses, and
polynomials.

Every numeric leaf is emitted as a decimal string so arbitrary-precision
values survive any JSON reader; serialization is byte-deterministic (sorted
keys, fixed indentation, trailing newline). Loaders accept both strings and
plain JSON numbers for count-like fields.
"""

from __future__ import annotations

import json

from .errors import InputError, ParseError
from .fields import ExtField, PrimeField, QQ, Rationals
from .rscodes import BddInstance, Poly, SymSSInstance, make_poly

FORMAT_VERSION = "1"


def to_text(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("expected a JSON object at the top level")
    return doc


def _expect_format(doc: dict, name: str) -> None:
    got = doc.get("format")
    if got != name:
        raise ParseError(f"expected a {name!r} document, got {got!r}")


def _as_int(value, what: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ParseError(f"bad integer for {what}: {value!r}") from None


def _str_list(values) -> list:
    return [str(v) for v in values]


# ---------------------------------------------------------------- fields

def field_to_json(field) -> dict:
    if isinstance(field, Rationals):
        return {"kind": "rational"}
    if isinstance(field, PrimeField):
        return {"kind": "prime", "p": str(field.p)}
    if isinstance(field, ExtField):
        return {
            "kind": "ext",
            "p": str(field.p),
            "ell": str(field.ell),
            "modulus": [str(c) for c in field.modulus],
        }
    raise InputError(f"cannot serialize field {field!r}")


def field_from_json(doc) -> object:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ParseError("field descriptor must be an object with a 'kind'")
    kind = doc["kind"]
    if kind == "rational":
        return QQ
    if kind == "prime":
        return PrimeField(_as_int(doc.get("p"), "p"))
    if kind == "ext":
        modulus = doc.get("modulus")
        if not isinstance(modulus, list):
            raise ParseError("ext field descriptor needs a 'modulus' list")
        return ExtField(
            _as_int(doc.get("p"), "p"),
            _as_int(doc.get("ell"), "ell"),
            modulus=tuple(_as_int(c, "modulus coefficient") for c in modulus),
        )
    raise ParseError(f"unknown field kind {kind!r}")


def _values_to_json(field, values) -> list:
    return [field.to_str(v) for v in values]


def _values_from_json(field, values, what: str) -> tuple:
    if not isinstance(values, list):
        raise ParseError(f"{what} must be a list")
    try:
        return tuple(field.from_str(str(v)) for v in values)
    except (InputError, ParseError) as exc:
        raise ParseError(f"bad {what} entry: {exc}") from None


# ------------------------------------------------------------- instances

def mss_to_json(inst, provenance: dict | None = None) -> dict:
    doc = {
        "format": "mss-instance",
        "version": FORMAT_VERSION,
        "field": field_to_json(inst.field),
        "elements": _values_to_json(inst.field, inst.elements),
        "k": str(inst.k),
        "targets": _values_to_json(inst.field, inst.targets),
    }
    if provenance is not None:
        doc["provenance"] = provenance
    return doc


def mss_from_json(doc: dict):
    from .reduction import MssInstance

    _expect_format(doc, "mss-instance")
    field = field_from_json(doc.get("field"))
    return MssInstance(
        field=field,
        elements=_values_from_json(field, doc.get("elements"), "elements"),
        k=_as_int(doc.get("k"), "k"),
        targets=_values_from_json(field, doc.get("targets"), "targets"),
    )


def symss_to_json(inst: SymSSInstance) -> dict:
    return {
        "format": "symss-instance",
        "version": FORMAT_VERSION,
        "field": field_to_json(inst.field),
        "elements": _values_to_json(inst.field, inst.elements),
        "k": str(inst.k),
        "targets": _values_to_json(inst.field, inst.targets),
    }


def symss_from_json(doc: dict) -> SymSSInstance:
    _expect_format(doc, "symss-instance")
    field = field_from_json(doc.get("field"))
    return SymSSInstance(
        field=field,
        elements=_values_from_json(field, doc.get("elements"), "elements"),
        k=_as_int(doc.get("k"), "k"),
        targets=_values_from_json(field, doc.get("targets"), "targets"),
    )


def bdd_to_json(inst: BddInstance) -> dict:
    return {
        "format": "bdd-instance",
        "version": FORMAT_VERSION,
        "field": field_to_json(inst.field),
        "points": _values_to_json(inst.field, inst.points),
        "targets": _values_to_json(inst.field, inst.targets),
        "K": str(inst.K),
        "d": str(inst.d),
    }


def bdd_from_json(doc: dict) -> BddInstance:
    _expect_format(doc, "bdd-instance")
    field = field_from_json(doc.get("field"))
    return BddInstance(
        field=field,
        points=_values_from_json(field, doc.get("points"), "points"),
        targets=_values_from_json(field, doc.get("targets"), "targets"),
        K=_as_int(doc.get("K"), "K"),
        d=_as_int(doc.get("d"), "d"),
    )


# ------------------------------------------------- subsets / assignments

def subset_to_json(positions) -> dict:
    return {
        "format": "subset",
        "version": FORMAT_VERSION,
        "positions": _str_list(positions),
    }


def subset_from_json(doc: dict) -> tuple:
    _expect_format(doc, "subset")
    positions = doc.get("positions")
    if not isinstance(positions, list):
        raise ParseError("subset document needs a 'positions' list")
    return tuple(_as_int(p, "position") for p in positions)


def assignment_to_json(bits) -> dict:
    return {
        "format": "assignment",
        "version": FORMAT_VERSION,
        "bits": _str_list(bits),
    }


def assignment_from_json(doc: dict) -> tuple:
    _expect_format(doc, "assignment")
    bits = doc.get("bits")
    if not isinstance(bits, list):
        raise ParseError("assignment document needs a 'bits' list")
    out = tuple(_as_int(b, "bit") for b in bits)
    if any(b not in (0, 1) for b in out):
        raise ParseError("assignment bits must be 0 or 1")
    return out


# ------------------------------------------------- polynomials / witnesses

def poly_to_json(p: Poly, field) -> dict:
    return {
        "format": "polynomial",
        "version": FORMAT_VERSION,
        "field": field_to_json(field),
        "coeffs": _values_to_json(field, p.coeffs),
    }


def poly_from_json(doc: dict):
    _expect_format(doc, "polynomial")
    field = field_from_json(doc.get("field"))
    coeffs = _values_from_json(field, doc.get("coeffs"), "coeffs")
    return make_poly(coeffs, field), field


def witness_to_json(witness) -> dict:
    field = witness.field
    doc = {
        "format": "pte-witness",
        "version": FORMAT_VERSION,
        "field": field_to_json(field),
        "degree": str(witness.degree),
        "x": _values_to_json(field, witness.X),
        "y": _values_to_json(field, witness.Y),
        "a": None if witness.a is None else field.to_str(witness.a),
        "b": None if witness.b is None else field.to_str(witness.b),
    }
    return doc


def witness_from_json(doc: dict):
    from .pte import PteWitness

    _expect_format(doc, "pte-witness")
    field = field_from_json(doc.get("field"))
    a = doc.get("a")
    b = doc.get("b")
    return PteWitness(
        X=_values_from_json(field, doc.get("x"), "x"),
        Y=_values_from_json(field, doc.get("y"), "y"),
        degree=_as_int(doc.get("degree"), "degree"),
        a=None if a is None else field.from_str(str(a)),
        b=None if b is None else field.from_str(str(b)),
        field=field,
    )


# ------------------------------------------------------------ provenance

def make_provenance(sat_text: str, d: int, transport: dict | None = None) -> dict:
    return {"sat": sat_text, "d": str(d), "transport": transport}


def provenance_to_artifacts(doc: dict):
    """Rebuild construction artifacts from an instance document's
    provenance block by re-running the deterministic construction."""
    from .reduction import sat_to_mss
    from .satss import parse_one_in_three

    prov = doc.get("provenance")
    if not isinstance(prov, dict) or "sat" not in prov or "d" not in prov:
        raise InputError(
            "instance document carries no construction provenance; "
            "produce it with the reduce subcommand"
        )
    sat = parse_one_in_three(str(prov["sat"]))
    d = _as_int(prov["d"], "provenance d")
    _, art = sat_to_mss(sat, d)
    elements = doc.get("elements")
    if isinstance(elements, list) and len(elements) != len(art.origins):
        raise InputError(
            "instance does not match its provenance: "
            f"{len(elements)} elements vs {len(art.origins)} constructed"
        )
    return art
