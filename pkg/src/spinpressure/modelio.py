"""Model-file parsing and deterministic report/CSV emission.

Model files are TOML (or JSON with the same schema): a `kind` key selecting
spin_chain / sft / riesz, a `metadata` table, and a `payload` table holding
the kind-specific fields.  Complex matrices are nested row-major arrays of
[re, im] pairs; hermitian inputs may give the lower triangle only and are
mirrored.
"""

from __future__ import annotations

import json
import math

try:
    import tomllib
except ModuleNotFoundError:          # Python 3.10
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chain import SpinChainModel
from .errors import ModelFormatError
from .riesz import RieszSpec
from .sft import SftModel

KINDS = ("spin_chain", "sft", "riesz")


@dataclass(frozen=True)
class ModelFile:
    kind: str
    payload: SpinChainModel | SftModel | RieszSpec
    name: str = ""
    description: str = ""


def _complex_matrix(raw, what: str) -> np.ndarray:
    """Decode nested [re, im] rows; ragged lower-triangle input is mirrored."""
    if not isinstance(raw, list) or not raw:
        raise ModelFormatError(f"{what}: expected a nonempty matrix")
    n = len(raw)
    lower = all(isinstance(row, list) and len(row) == i + 1
                for i, row in enumerate(raw))
    square = all(isinstance(row, list) and len(row) == n for row in raw)
    if not (lower or square):
        raise ModelFormatError(f"{what}: rows must form a square matrix or a "
                               "lower triangle")
    m = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(raw):
        for j, cell in enumerate(row):
            if (not isinstance(cell, list) or len(cell) != 2
                    or not all(isinstance(v, (int, float)) for v in cell)):
                raise ModelFormatError(
                    f"{what}[{i}][{j}]: entries must be [re, im] pairs")
            if not all(math.isfinite(v) for v in cell):
                raise ModelFormatError(f"{what}[{i}][{j}]: non-finite entry")
            m[i, j] = complex(cell[0], cell[1])
    if lower and n > 1:
        m = np.tril(m) + np.tril(m, -1).conj().T
    return m


def _real_array(raw, what: str) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(f"{what}: expected a numeric array") from exc
    if not np.isfinite(arr).all():
        raise ModelFormatError(f"{what}: non-finite entry")
    return arr


def _build_spin_chain(p: dict) -> SpinChainModel:
    try:
        return SpinChainModel(
            site_dim=int(p["site_dim"]),
            range_=int(p["range"]),
            interaction=_complex_matrix(p["interaction"], "interaction"),
            beta=float(p.get("beta", 1.0)),
            boundary=str(p.get("boundary", "open")))
    except KeyError as exc:
        raise ModelFormatError(f"spin_chain payload missing {exc}") from exc
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc


def _build_sft(p: dict) -> SftModel:
    try:
        transition = _real_array(p["transition"], "transition")
        potential = _real_array(p.get(
            "potential", np.zeros(transition.shape).tolist()), "potential")
        return SftModel(transition.astype(int), potential,
                        word_len=int(p.get("word_len", 2)))
    except KeyError as exc:
        raise ModelFormatError(f"sft payload missing {exc}") from exc
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc


def _build_riesz(p: dict) -> RieszSpec:
    try:
        return RieszSpec(frequencies=tuple(int(f) for f in p["frequencies"]),
                         amplitudes=tuple(float(a) for a in p["amplitudes"]),
                         ratio_bound=float(p.get("ratio_bound", 4.0)))
    except KeyError as exc:
        raise ModelFormatError(f"riesz payload missing {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(str(exc)) from exc


def parse_model(path: str | Path) -> ModelFile:
    path = Path(path)
    text = path.read_bytes()
    if path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(
                f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    else:
        try:
            data = tomllib.loads(text.decode())
        except tomllib.TOMLDecodeError as exc:
            raise ModelFormatError(f"{path}: {exc}") from exc
    kind = data.get("kind")
    if kind not in KINDS:
        raise ModelFormatError(f"{path}: kind must be one of {KINDS}, got {kind!r}")
    payload = data.get("payload")
    if not isinstance(payload, dict):
        raise ModelFormatError(f"{path}: missing [payload] table")
    builder = {"spin_chain": _build_spin_chain, "sft": _build_sft,
               "riesz": _build_riesz}[kind]
    meta = data.get("metadata", {})
    return ModelFile(kind, builder(payload),
                     name=str(meta.get("name", path.stem)),
                     description=str(meta.get("description", "")))


def serialize_model(mf: ModelFile) -> dict:
    """Canonical JSON-compatible form; parse(serialize(x)) == x."""
    if mf.kind == "spin_chain":
        m = mf.payload
        payload = {
            "site_dim": m.site_dim, "range": m.range_, "beta": m.beta,
            "boundary": m.boundary,
            "interaction": [[[float(c.real), float(c.imag)] for c in row]
                            for row in m.interaction],
        }
    elif mf.kind == "sft":
        m = mf.payload
        payload = {"transition": m.transition.tolist(),
                   "potential": m.potential.tolist(),
                   "word_len": m.word_len}
    else:
        m = mf.payload
        payload = {"frequencies": list(m.frequencies),
                   "amplitudes": list(m.amplitudes),
                   "ratio_bound": m.ratio_bound}
    return {"kind": mf.kind,
            "metadata": {"name": mf.name, "description": mf.description},
            "payload": payload}


# Reports and CSV ----------------------------------------------------------

def fmt(x: float) -> str:
    """17 significant digits, '.' decimal: bit-exact round trips."""
    return f"{float(x):.17g}"


@dataclass(frozen=True)
class CheckRecord:
    check_id: str
    value: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class RunReport:
    command: str
    inputs_digest: str
    records: tuple[CheckRecord, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "overall_pass": self.passed,
            "checks": [{"id": r.check_id, "value": r.value,
                        "tolerance": r.tolerance, "pass": r.passed}
                       for r in self.records],
        }


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    """Deterministic CSV: LF endings, 17 significant digits for floats."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(c) if isinstance(c, float) else str(c)
                              for c in row))
    path.write_bytes(("\n".join(lines) + "\n").encode())
