"""JSON descriptors (a ``kind`` tag plus parameters) for weights, sets and measures."""

import json
import os
from fractions import Fraction

from . import subsets
from . import weights as W
from .errors import DescriptorError
from .lazy import LazyFactorial

WEIGHT_SHORTHANDS = {"identity", "ceil_sqrt"}
SET_SHORTHANDS = {"evens", "odds", "naturals", "squares", "powers", "empty"}


def canonical(obj):
    """Byte-stable JSON text: sorted keys, no spaces."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def load(text):
    """Inline JSON, a path to a JSON file, or a bare shorthand word."""
    text = text.strip()
    if text[:1] in "{[":
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise DescriptorError(f"bad inline JSON: {exc}") from None
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            try:
                return json.load(fh)
            except json.JSONDecodeError as exc:
                raise DescriptorError(f"bad JSON in {text}: {exc}") from None
    return text


def _num(x):
    if isinstance(x, dict) and "factorial" in x:
        return LazyFactorial(int(x["factorial"]), int(x.get("shift", 0)))
    if isinstance(x, bool) or not isinstance(x, int):
        raise DescriptorError(f"expected an integer, got {x!r}")
    return x


def _frac(x):
    if isinstance(x, list) and len(x) == 2:
        return Fraction(int(x[0]), int(x[1]))
    if isinstance(x, dict) and "num" in x:
        return Fraction(int(x["num"]), int(x["den"]))
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise DescriptorError(f"expected a rational, got {x!r}")


def _need(d, *keys):
    missing = [k for k in keys if k not in d]
    if missing:
        raise DescriptorError(f"descriptor {d.get('kind')!r} is missing {', '.join(missing)}")


def _catalog_role(d, default_role):
    from . import catalog
    return catalog.role_of(d["name"], d.get("role", default_role), d.get("steps"))


def weight(d):
    """Build a WeightFn from a descriptor (dict, or a shorthand/catalog name)."""
    if isinstance(d, str):
        from . import catalog
        if d in WEIGHT_SHORTHANDS:
            d = {"kind": d}
        elif d in catalog.names():
            d = {"kind": "catalog", "name": d}
        else:
            raise DescriptorError(f"unknown weight {d!r}")
    if not isinstance(d, dict) or "kind" not in d:
        raise DescriptorError(f"weight descriptor needs a kind tag: {d!r}")
    kind = d["kind"]
    if kind == "identity":
        return W.Identity()
    if kind == "affine":
        _need(d, "a")
        return W.Affine(int(d["a"]), int(d.get("b", 0)))
    if kind == "constant":
        _need(d, "value")
        return W.Constant(int(d["value"]))
    if kind == "floor_scale":
        _need(d, "c", "base")
        return W.FloorScale(_frac(d["c"]), weight(d["base"]))
    if kind == "max":
        _need(d, "args")
        if len(d["args"]) != 2:
            raise DescriptorError("max takes exactly two weights")
        return W.Max(weight(d["args"][0]), weight(d["args"][1]))
    if kind == "override":
        _need(d, "base", "prefix")
        return W.TableOverride(weight(d["base"]), d["prefix"])
    if kind == "ceil_sqrt":
        return W.CeilSqrt(int(d.get("offset", 0)))
    if kind == "table":
        _need(d, "values")
        return W.TableWeight(d["values"])
    if kind == "count":
        _need(d, "set")
        return W.Count(subset(d["set"]))
    if kind == "checkpoints":
        _need(d, "set")
        return W.NextCheckpoint(subset(d["set"]))
    if kind == "plateau":
        _need(d, "pieces")
        gap = d.get("gap", "identity")
        pieces = [(_num(a), _num(b), _num(v)) for a, b, v in d["pieces"]]
        w = W.Plateau(pieces, gap=tuple(gap) if isinstance(gap, list) else gap)
        w._descriptor = d
        return w
    if kind == "from_measures":
        _need(d, "measures")
        from .farah import weight_from_measures
        w = weight_from_measures(measures(d["measures"]))
        w._descriptor = d
        return w
    if kind == "catalog":
        _need(d, "name")
        w = _catalog_role(d, None)
        if not isinstance(w, W.WeightFn):
            raise DescriptorError(f"catalog role of {d['name']!r} is not a weight")
        w._descriptor = d
        return w
    raise DescriptorError(f"unknown weight kind {kind!r}")


def subset(d):
    """Build a SubsetStream from a descriptor."""
    if isinstance(d, str):
        if d in SET_SHORTHANDS:
            d = {"kind": d}
        else:
            raise DescriptorError(f"unknown set {d!r}")
    if isinstance(d, list):
        return subsets.finite(d)
    if not isinstance(d, dict) or "kind" not in d:
        raise DescriptorError(f"set descriptor needs a kind tag: {d!r}")
    kind = d["kind"]
    simple = {"evens": subsets.evens, "odds": subsets.odds, "squares": subsets.squares,
              "empty": subsets.empty}
    if kind in simple:
        s = simple[kind]()
    elif kind == "naturals":
        s = subsets.naturals(int(d.get("start", 0)))
    elif kind == "arithmetic":
        s = subsets.arithmetic(int(d.get("start", 0)), int(d.get("step", 1)))
    elif kind == "powers":
        s = subsets.powers(int(d.get("base", 2)))
    elif kind == "finite":
        _need(d, "elements")
        s = subsets.finite(d["elements"])
    elif kind == "intervals":
        _need(d, "blocks")
        s = subsets.BlockUnion([(a, b) for a, b in d["blocks"]], name="intervals")
    elif kind == "dyadic_runs":
        s = subsets.dyadic_runs(d.get("side", "after"))
    elif kind == "ad_branch":
        _need(d, "word")
        s = subsets.ad_branch(d["word"])
    elif kind == "catalog":
        _need(d, "name", "role")
        s = _catalog_role(d, d["role"])
        if not isinstance(s, subsets.SubsetStream):
            raise DescriptorError(f"catalog role {d['role']!r} of {d['name']!r} is not a set")
    else:
        raise DescriptorError(f"unknown set kind {kind!r}")
    s.descriptor = d
    return s


def measures(d):
    """Build a MeasureSeq from ``{"kind": "measures", "levels": ...}``, a Farah build, or a catalog entry."""
    from . import farah
    if isinstance(d, str):
        d = {"kind": "catalog", "name": d}
    if isinstance(d, list):
        d = {"kind": "measures", "levels": d}
    kind = d.get("kind")
    if kind == "measures":
        _need(d, "levels")
        ms = farah.from_json(d["levels"])
    elif kind == "farah":
        _need(d, "weight", "levels")
        ms = farah.farah_measures(weight(d["weight"]), int(d["levels"]))
    elif kind == "catalog":
        _need(d, "name")
        ms = _catalog_role(d, "measures")
        if not isinstance(ms, farah.MeasureSeq):
            raise DescriptorError(f"{d['name']!r} carries no measures")
    else:
        raise DescriptorError(f"unknown measure kind {kind!r}")
    ms.descriptor = d
    return ms


def emit(obj):
    """Descriptor of a weight, set or measure sequence."""
    if isinstance(obj, W.WeightFn):
        return obj.descriptor()
    d = getattr(obj, "descriptor", None)
    if d is None:
        raise DescriptorError(f"{obj!r} has no serializable descriptor")
    return d
