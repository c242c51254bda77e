"""JSON documents for histograms, decompositions, witnesses, trees and reports."""

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from dickesim.errors import SchemaError
from dickesim.types import CountHistogram, Leaf, LocalSetting, SettingDecomposition, Splitter, SplitterTree, WitnessSpec

FORMAT_VERSION = 1


def dump_document(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_document(path: Path, doc: dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_document(doc), encoding="utf-8")


def read_document(path: Path, kind: str | None = None) -> dict[str, Any]:
    root = f"{path.name}:$"
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}", root) from e
    if not isinstance(data, dict):
        raise SchemaError("document must be an object", root)
    version = _field(data, "format_version", int, root)
    if version != FORMAT_VERSION:
        raise SchemaError(f"unsupported format_version {version}", f"{root}.format_version")
    if kind is not None and data.get("kind") != kind:
        raise SchemaError(f"expected a {kind} document, got {data.get('kind')!r}", f"{root}.kind")
    return data


def _field(data: dict[str, Any], key: str, types: type | tuple[type, ...], path: str, optional: bool = False) -> Any:
    if key not in data:
        if optional:
            return None
        raise SchemaError("missing field", f"{path}.{key}")
    value = data[key]
    if optional and value is None:
        return None
    if isinstance(value, bool) and bool not in (types if isinstance(types, tuple) else (types,)):
        raise SchemaError(f"expected {_type_name(types)}, got bool", f"{path}.{key}")
    if not isinstance(value, types):
        raise SchemaError(f"expected {_type_name(types)}, got {type(value).__name__}", f"{path}.{key}")
    return value


def _type_name(types: type | tuple[type, ...]) -> str:
    if isinstance(types, tuple):
        return " or ".join(t.__name__ for t in types)
    return types.__name__


def _number_list(data: dict[str, Any], key: str, path: str, length: int | None = None) -> list[float]:
    values = _field(data, key, list, path)
    if length is not None and len(values) != length:
        raise SchemaError(f"expected {length} entries, got {len(values)}", f"{path}.{key}")
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, int | float):
            raise SchemaError(f"expected a number, got {type(v).__name__}", f"{path}.{key}[{i}]")
    return [float(v) for v in values]


def setting_to_list(setting: LocalSetting) -> list[Any]:
    return [b if isinstance(b, str) else [float(b[0]), float(b[1])] for b in setting.bases]


def setting_from_list(values: Any, path: str) -> LocalSetting:
    if not isinstance(values, list) or not values:
        raise SchemaError("expected a nonempty list of bases", path)
    bases: list[Any] = []
    for i, basis in enumerate(values):
        if isinstance(basis, str):
            bases.append(basis)
        elif isinstance(basis, list) and len(basis) == 2 and all(isinstance(x, int | float) for x in basis):
            bases.append((float(basis[0]), float(basis[1])))
        else:
            raise SchemaError("expected an axis name or a [theta, phi] pair", f"{path}[{i}]")
    try:
        return LocalSetting(tuple(bases))
    except ValueError as e:
        raise SchemaError(str(e), path) from e


def histogram_to_dict(hist: CountHistogram, theory: np.ndarray | None = None) -> dict[str, Any]:
    counts = [float(c) for c in hist.counts] if hist.exact else [int(c) for c in hist.counts]
    doc: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "kind": "histogram",
        "setting": setting_to_list(hist.setting),
        "label": hist.label,
        "counts": counts,
        "duration": hist.duration,
        "efficiencies": [float(e) for e in hist.efficiencies],
        "seed": hist.seed,
        "exact": hist.exact,
    }
    if theory is not None:
        doc["theory"] = [float(p) for p in theory]
    return doc


def histogram_from_dict(data: dict[str, Any], path: str = "$") -> CountHistogram:
    setting = setting_from_list(_field(data, "setting", list, path), f"{path}.setting")
    exact = bool(_field(data, "exact", bool, path, optional=True) or False)
    counts = _number_list(data, "counts", path, 2**setting.num_sites)
    if not exact:
        for i, c in enumerate(data["counts"]):
            if not isinstance(c, int):
                raise SchemaError("sampled histograms hold integer counts", f"{path}.counts[{i}]")
    efficiencies = _number_list(data, "efficiencies", path, 2 * setting.num_sites)
    try:
        return CountHistogram(
            setting=setting,
            counts=np.array(counts),
            duration=float(_field(data, "duration", (int, float), path, optional=True) or 0.0),
            efficiencies=np.array(efficiencies),
            seed=_field(data, "seed", int, path, optional=True),
            exact=exact,
            label=_field(data, "label", str, path, optional=True),
        )
    except ValueError as e:
        raise SchemaError(str(e), path) from e


def decomposition_to_dict(decomposition: SettingDecomposition) -> dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "decomposition",
        "num_qubits": decomposition.num_qubits,
        "target": decomposition.target,
        "residual": decomposition.residual,
        "directions": [list(d) for d in decomposition.directions],
        "coefficients": [list(row) for row in decomposition.coefficients],
    }


def decomposition_from_dict(data: dict[str, Any], path: str = "$") -> SettingDecomposition:
    n = _field(data, "num_qubits", int, path)
    directions = _field(data, "directions", list, path)
    coefficients = _field(data, "coefficients", list, path)
    parsed_dirs = [tuple(_number_list({"d": d}, "d", f"{path}.directions[{i}]", 3)) for i, d in enumerate(directions)]
    parsed_coeffs = [
        _number_list({"c": c}, "c", f"{path}.coefficients[{i}]", n + 1) for i, c in enumerate(coefficients)
    ]
    try:
        return SettingDecomposition(
            num_qubits=n,
            directions=parsed_dirs,  # type: ignore[arg-type]
            coefficients=parsed_coeffs,
            residual=float(_field(data, "residual", (int, float), path)),
            target=_field(data, "target", str, path, optional=True),
        )
    except ValueError as e:
        raise SchemaError(str(e), path) from e


def witness_to_dict(spec: WitnessSpec) -> dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "witness",
        "name": spec.name,
        "witness_kind": spec.kind,
        "alpha": spec.alpha,
        "coefficients": [[str(c) for c in row] for row in spec.coefficients] if spec.coefficients else None,
        "target": spec.target,
        "num_qubits": spec.num_qubits,
        "settings": list(spec.settings),
    }


def witness_from_dict(data: dict[str, Any], path: str = "$") -> WitnessSpec:
    kind = _field(data, "witness_kind", str, path)
    if kind not in ("projector", "j2", "moments", "ghz-two-setting", "subspace"):
        raise SchemaError(f"unknown witness kind {kind!r}", f"{path}.witness_kind")
    raw_coeffs = _field(data, "coefficients", list, path, optional=True)
    coefficients = None
    if raw_coeffs is not None:
        try:
            coefficients = tuple(tuple(Fraction(c) for c in row) for row in raw_coeffs)
        except (TypeError, ValueError, ZeroDivisionError) as e:
            raise SchemaError("coefficients must be rational strings such as '-1/45'", f"{path}.coefficients") from e
    return WitnessSpec(
        kind=kind,
        alpha=float(_field(data, "alpha", (int, float), path)),
        coefficients=coefficients,
        target=_field(data, "target", str, path, optional=True),
        name=_field(data, "name", str, path, optional=True),
        num_qubits=_field(data, "num_qubits", int, path, optional=True) or 6,
        settings=list(_field(data, "settings", list, path, optional=True) or []),
    )


def tree_to_dict(node: SplitterTree | Splitter | Leaf) -> dict[str, Any]:
    if isinstance(node, SplitterTree):
        return tree_to_dict(node.root)
    if isinstance(node, Leaf):
        return {"mode": node.mode}
    return {
        "name": node.name,
        "ratio": node.ratio,
        "first": tree_to_dict(node.first),
        "second": tree_to_dict(node.second),
    }


def _node_from_dict(data: Any, path: str) -> Splitter | Leaf:
    if not isinstance(data, dict):
        raise SchemaError("expected a splitter or leaf object", path)
    if "mode" in data:
        return Leaf(_field(data, "mode", str, path))
    try:
        return Splitter(
            name=_field(data, "name", str, path),
            ratio=float(_field(data, "ratio", (int, float), path)),
            first=_node_from_dict(data.get("first"), f"{path}.first"),
            second=_node_from_dict(data.get("second"), f"{path}.second"),
        )
    except ValueError as e:
        if isinstance(e, SchemaError):
            raise
        raise SchemaError(str(e), path) from e


def tree_from_dict(data: Any, path: str = "$") -> SplitterTree:
    root = _node_from_dict(data, path)
    if isinstance(root, Leaf):
        raise SchemaError("tree root must be a splitter", path)
    return SplitterTree(root)


def report_to_dict(report: dict[str, Any]) -> dict[str, Any]:
    return {"kind": "report", **report, "format_version": FORMAT_VERSION}


def read_histograms(paths: list[Path]) -> list[CountHistogram]:
    out = []
    for path in paths:
        data = read_document(path, "histogram")
        out.append(histogram_from_dict(data, f"{path.name}:$"))
    return out


def observable_to_dict(terms: dict[str, float], label: str | None = None) -> dict[str, Any]:
    """Observables are stored as Pauli-string coefficients, e.g. {"XXIIII": 0.5}."""
    return {
        "format_version": FORMAT_VERSION,
        "kind": "observable",
        "label": label,
        "num_qubits": len(next(iter(terms))) if terms else 0,
        "terms": dict(terms),
    }


def observable_terms_from_dict(data: dict[str, Any], path: str = "$") -> dict[str, float]:
    n = _field(data, "num_qubits", int, path)
    raw = _field(data, "terms", dict, path)
    if not raw:
        raise SchemaError("expected at least one Pauli term", f"{path}.terms")
    terms: dict[str, float] = {}
    for label, coeff in raw.items():
        where = f"{path}.terms.{label}"
        if len(label) != n or any(c not in "IXYZ" for c in label):
            raise SchemaError(f"expected a Pauli string of {n} letters from IXYZ", where)
        if isinstance(coeff, bool) or not isinstance(coeff, int | float):
            raise SchemaError(f"expected a number, got {type(coeff).__name__}", where)
        terms[label] = float(coeff)
    return terms
