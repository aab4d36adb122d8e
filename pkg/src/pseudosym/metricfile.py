"""YAML metric files.

Example::

    name: robinson-trautman
    coordinates: [t, r, x3, x4]
    parameters: [a, b, q]
    constants: []
    nonzero: [r, f]
    jets:
      - name: f
        depends_on: [x3, x4]
        # optional, closes the jet under differentiation:
        # rules: {x3: f, x4: f}
    metric:
      "1,1": -2*(a - 2*b*r - q/r)
      "1,2": 1
      "3,3": -r^2/f^2
      "x4,x4": -r^2/f^2

Metric keys are pairs of 1-based positions or coordinate names.  Missing
components are zero and the symmetric partner is implied; giving both (i,j)
and (j,i) with different expressions is an error.  Expressions follow the
grammar in :mod:`pseudosym.parser`.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

import yaml

from .expr import ZERO
from .parser import ParseError
from .symbols import ContextError, JetSpec, SymbolContext
from .tensor import ComponentTensor, DegenerateMetricError, MetricSpec, SymmetryError

SECTIONS = ("name", "coordinates", "parameters", "constants", "nonzero", "jets", "metric")


class MetricFileError(ValueError):
    def __init__(self, section: str, message: str):
        super().__init__(f"[{section}] {message}")
        self.section = section


def _names(doc: dict, key: str) -> list[str]:
    val = doc.get(key) or []
    if not isinstance(val, list) or not all(isinstance(v, str) for v in val):
        raise MetricFileError(key, "expected a list of names")
    return val


def _index(part: str, coords: list[str]) -> int:
    part = part.strip()
    if part in coords:
        return coords.index(part)
    try:
        i = int(part)
    except ValueError:
        raise MetricFileError("metric", f"unknown coordinate {part!r}") from None
    if not 1 <= i <= len(coords):
        raise MetricFileError("metric", f"index {i} out of range 1..{len(coords)}")
    return i - 1


def metric_from_dict(doc: Any, jet_depth: int = 4) -> MetricSpec:
    if not isinstance(doc, dict):
        raise MetricFileError("document", "top level must be a mapping")
    unknown = set(doc) - set(SECTIONS)
    if unknown:
        raise MetricFileError(sorted(unknown)[0], "unknown section")
    name = str(doc.get("name") or "metric")
    coords = _names(doc, "coordinates")
    if not coords:
        raise MetricFileError("coordinates", "at least one coordinate is required")
    jets = []
    for k, spec in enumerate(doc.get("jets") or []):
        if not isinstance(spec, dict) or "name" not in spec:
            raise MetricFileError("jets", f"entry {k + 1} needs a name")
        deps = spec.get("depends_on") or []
        rules = spec.get("rules")
        if rules is not None:
            if not isinstance(rules, dict):
                raise MetricFileError("jets", f"rules of {spec['name']!r} must be a mapping")
            rules = {str(c): str(e) for c, e in rules.items()}
        jets.append(JetSpec(str(spec["name"]), tuple(deps), rules))
    try:
        ctx = SymbolContext(
            coords,
            _names(doc, "parameters"),
            _names(doc, "constants"),
            jets,
            namespace=f"file:{name}",
            jet_depth=jet_depth,
            nonzero=_names(doc, "nonzero"),
        )
        for nz in ctx.nonzero:
            ctx.parse(nz)
    except (ContextError, ParseError) as exc:
        raise MetricFileError("symbols", str(exc)) from None

    entries = doc.get("metric")
    if not isinstance(entries, dict) or not entries:
        raise MetricFileError("metric", "expected a nonempty mapping of components")
    n = len(coords)
    rows = [[ZERO] * n for _ in range(n)]
    given: dict[tuple[int, int], Any] = {}
    for key, text in entries.items():
        parts = str(key).split(",")
        if len(parts) != 2:
            raise MetricFileError("metric", f"key {key!r} is not a pair i,j")
        i, j = (_index(p, coords) for p in parts)
        try:
            val = ctx.parse(str(text))
        except ParseError as exc:
            raise MetricFileError("metric", f"component {key}: {exc}") from None
        for a, b in ((i, j), (j, i)):
            if (a, b) in given and given[a, b] != val:
                raise MetricFileError("metric", f"conflicting expressions for ({a + 1},{b + 1})")
            given[a, b] = val
            rows[a][b] = val
    try:
        g = ComponentTensor.from_matrix(rows, symmetry="symmetric-pair", name="g")
        m = MetricSpec(ctx, g, name, tuple(f"{v} != 0" for v in ctx.nonzero))
        m.ginv
    except (SymmetryError, DegenerateMetricError) as exc:
        raise MetricFileError("metric", str(exc)) from None
    return m


def load_metric(path: str | Path, jet_depth: int = 4) -> MetricSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise MetricFileError("file", f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise MetricFileError("file", f"invalid YAML: {exc}") from None
    return metric_from_dict(doc, jet_depth)
