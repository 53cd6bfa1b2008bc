"""
File Formats
State and channel JSON documents and the truncation-scan CSV.

State file::

    {"dim_a": 2, "dim_b": 2, "kind": "pure", "amps": [[[re, im], ...], ...]}
    {"dim_a": 2, "dim_b": 2, "kind": "mixed", "rho": [[[re, im], ...], ...]}

``rho`` is row-major with joint index i * dim_b + j; a flat list of
(dim_a dim_b)^2 pairs is accepted too. A mixed state built from a recorded
product ensemble also carries it::

    "certificate": {"weights": [p, ...], "members": [amps, ...]}

Channel file::

    {"side": "B", "dim_a": 2, "dim_b": 2, "kraus": [matrix, ...]}
    {"side": "B", "dim_a": 2, "dim_b": 2, "branches": [[matrix, ...], ...]}

For ``side: "both"`` each Kraus entry is ``{"a": matrix, "b": matrix}``.
Floats are written with Python's shortest round-trip repr (at most 17
significant digits).
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from concurrex.channels import SIDES, KrausChannel, TruncationScan
from concurrex.config import NORM_TOL, PSD_TOL
from concurrex.errors import ParseError, ValidationError
from concurrex.states import DensityMatrix, Ensemble, PureState, validate_density, validate_pure

logger = logging.getLogger(__name__)

SCAN_COLUMNS = ("dim", "concurrence", "trace_gap", "certified_bound", "analytic_limit")

State = Union[PureState, DensityMatrix]


def _line_of(text: str, key: str) -> Optional[int]:
    needle = f'"{key}"'
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return number
    return None


class _Document:
    """Parsed JSON with field lookups that report the source line."""

    def __init__(self, path: Union[str, Path]):
        self.path = str(path)
        try:
            self.text = Path(path).read_text()
        except OSError as e:
            raise ParseError(f"cannot read file: {e.strerror or e}", path=self.path)
        try:
            self.data = json.loads(self.text)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", path=self.path, line=e.lineno)
        if not isinstance(self.data, dict):
            raise ParseError("top level must be a JSON object", path=self.path, line=1)

    def error(self, key: str, message: str) -> ParseError:
        return ParseError(message, path=self.path, line=_line_of(self.text, key), field=key)

    def get(self, key: str, required: bool = True) -> Any:
        if key not in self.data:
            if required:
                raise self.error(key, "missing required field")
            return None
        return self.data[key]

    def positive_int(self, key: str) -> int:
        value = self.get(key)
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise self.error(key, f"expected a positive integer, got {value!r}")
        return value

    def complex_matrix(self, key: str, value: Any, shape: Sequence[int]) -> np.ndarray:
        """[re, im] pairs nested to ``shape`` (a flat list of pairs is reshaped)."""
        try:
            array = np.asarray(value, dtype=float)
        except (TypeError, ValueError):
            raise self.error(key, "entries must be [re, im] number pairs")
        if array.ndim < 1 or array.shape[-1] != 2:
            raise self.error(key, "entries must be [re, im] number pairs")
        values = array[..., 0] + 1j * array[..., 1]
        if values.size != int(np.prod(shape)):
            raise self.error(key, f"expected {int(np.prod(shape))} entries ({' x '.join(map(str, shape))}), "
                                  f"got {values.size}")
        if values.shape != tuple(shape) and values.ndim != 1:
            raise self.error(key, f"expected shape {tuple(shape)}, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise self.error(key, "entries must be finite")
        return values.reshape(shape)


def _pairs(matrix: np.ndarray) -> List:
    matrix = np.asarray(matrix, dtype=np.complex128)
    return np.stack([matrix.real, matrix.imag], axis=-1).tolist()


def state_to_dict(state: State) -> Dict[str, Any]:
    if isinstance(state, PureState):
        return {"dim_a": state.dim_a, "dim_b": state.dim_b, "kind": "pure", "amps": _pairs(state.amps)}
    dim_a, dim_b = state.require_dims()
    data = {"dim_a": dim_a, "dim_b": dim_b, "kind": "mixed", "rho": _pairs(state.entries)}
    certificate = state.separable_certificate
    if certificate is not None:
        data["certificate"] = {
            "weights": certificate.weights.tolist(),
            "members": [_pairs(member.amps) for member in certificate.members],
        }
    return data


def _read_certificate(doc: _Document, dims: Sequence[int]) -> Optional[Ensemble]:
    raw = doc.get("certificate", required=False)
    if raw is None:
        return None
    if not isinstance(raw, dict) or not isinstance(raw.get("members"), list):
        raise doc.error("certificate", "expected an object with weights and members")
    weights = raw.get("weights")
    if not isinstance(weights, list) or len(weights) != len(raw["members"]):
        raise doc.error("certificate", "expected one weight per member")
    members = [doc.complex_matrix("certificate", amps, tuple(dims)) for amps in raw["members"]]
    try:
        # amplitudes are stored normalized; rebuilding them as-is keeps them bit-exact
        return Ensemble(weights=np.asarray(weights, dtype=float),
                        members=[PureState(amps) for amps in members])
    except (TypeError, ValueError, ValidationError) as e:
        raise doc.error("certificate", f"invalid certificate: {e}")


def write_state(path: Union[str, Path], state: State) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(state_to_dict(state), f)
        f.write("\n")
    return path


def read_state(path: Union[str, Path], tol: float = NORM_TOL, strict: bool = False,
               psd_tol: float = PSD_TOL) -> State:
    """
    Load a state file. Pure amplitudes go through validate_pure (the raw
    norm is kept on the PureState), mixed matrices through validate_density.
    A recorded certificate is reattached to the mixed state as written.
    """
    doc = _Document(path)
    dim_a = doc.positive_int("dim_a")
    dim_b = doc.positive_int("dim_b")
    kind = doc.get("kind")
    if kind == "pure":
        amps = doc.complex_matrix("amps", doc.get("amps"), (dim_a, dim_b))
        return validate_pure(amps, tol=tol, strict=strict)
    if kind == "mixed":
        size = dim_a * dim_b
        rho = doc.complex_matrix("rho", doc.get("rho"), (size, size))
        state = validate_density(rho, dims=(dim_a, dim_b), psd_tol=psd_tol)
        certificate = _read_certificate(doc, (dim_a, dim_b))
        if certificate is None:
            return state
        return DensityMatrix(state.entries, dims=state.dims, separable_certificate=certificate)
    raise doc.error("kind", f"expected 'pure' or 'mixed', got {kind!r}")


def _kraus_to_json(channel: KrausChannel) -> List:
    if channel.side == "A":
        return [_pairs(a) for a, _ in channel.kraus_pairs]
    if channel.side == "B":
        return [_pairs(b) for _, b in channel.kraus_pairs]
    return [{"a": _pairs(a), "b": _pairs(b)} for a, b in channel.kraus_pairs]


def channel_to_dict(branches: Sequence[KrausChannel]) -> Dict[str, Any]:
    first = branches[0]
    data: Dict[str, Any] = {"side": first.side, "dim_a": first.input_dims[0], "dim_b": first.input_dims[1]}
    if len(branches) == 1:
        data["kraus"] = _kraus_to_json(first)
    else:
        data["branches"] = [_kraus_to_json(branch) for branch in branches]
    return data


def write_channel(path: Union[str, Path], branches: Sequence[KrausChannel]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(channel_to_dict(branches), f)
        f.write("\n")
    return path


def _operator(doc: _Document, key: str, value: Any) -> np.ndarray:
    try:
        array = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise doc.error(key, "Kraus operators must be matrices of [re, im] pairs")
    if array.ndim != 3 or array.shape[-1] != 2:
        raise doc.error(key, "Kraus operators must be matrices of [re, im] pairs")
    return doc.complex_matrix(key, value, array.shape[:2])


def _parse_kraus(doc: _Document, key: str, entries: Any, side: str, dims) -> KrausChannel:
    if not isinstance(entries, list) or not entries:
        raise doc.error(key, "expected a non-empty list of Kraus operators")
    if side == "both":
        pairs = []
        for entry in entries:
            if not isinstance(entry, dict) or "a" not in entry or "b" not in entry:
                raise doc.error(key, "two-sided Kraus entries need 'a' and 'b' matrices")
            pairs.append((_operator(doc, key, entry["a"]), _operator(doc, key, entry["b"])))
        return KrausChannel(side="both", kraus_pairs=tuple(pairs), input_dims=dims)
    operators = [_operator(doc, key, entry) for entry in entries]
    return KrausChannel.one_sided(side, operators, dims)


def read_channel(path: Union[str, Path]) -> List[KrausChannel]:
    """Load a channel file as an instrument; a plain ``kraus`` list is one branch."""
    doc = _Document(path)
    side = doc.get("side")
    if side not in SIDES:
        raise doc.error("side", f"expected one of {list(SIDES)}, got {side!r}")
    dims = (doc.positive_int("dim_a"), doc.positive_int("dim_b"))
    if "branches" in doc.data:
        groups = doc.get("branches")
        if not isinstance(groups, list) or not groups:
            raise doc.error("branches", "expected a non-empty list of branches")
        return [_parse_kraus(doc, "branches", group, side, dims) for group in groups]
    return [_parse_kraus(doc, "kraus", doc.get("kraus"), side, dims)]


def _cell(value: Optional[float]) -> str:
    return "" if value is None else format(float(value), ".17g")


def write_scan_csv(path: Union[str, Path], scan: TruncationScan) -> Path:
    """One row per truncation; gap and bound refer to the previous row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(SCAN_COLUMNS)
        for index, (dim, value) in enumerate(zip(scan.dims, scan.values)):
            gap = scan.trace_gaps[index - 1] if index else None
            bound = scan.certified_bounds[index - 1] if index else None
            writer.writerow([dim, _cell(value), _cell(gap), _cell(bound), _cell(scan.analytic_limit)])
    logger.debug("Wrote %d scan rows to %s", len(scan.dims), path)
    return path


def read_scan_csv(path: Union[str, Path]) -> List[Dict[str, Optional[float]]]:
    rows = []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            rows.append({key: (float(value) if value else None) for key, value in row.items()})
    return rows
