"""Text grammars for models and states, and the on-disk formats used by the CLI.

Models::

    sysI:g1=<r>,g2=<r>,beta=<r>[,atoms=1|2][,w1=<r>,w2=<r>]
    sysII:ge=<r>,gu=<r>[,atoms=1|2][,w1=<r>,w2=<r>]

States::

    pure:theta=<rad>,phi=<rad> | psimax | isotropic:p=<r> | file:<path>

State files hold one matrix row per line, entries written as ``re+imj``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .lindblad import (
    LindbladGenerator,
    SystemIIParams,
    SystemIParams,
    generator_system_I,
    generator_system_II,
)
from .states import (
    IsotropicParams,
    PureStateParams,
    check_density_matrix,
    isotropic_state,
    projector,
    psi_max,
    pure_state,
)

__all__ = [
    "SpecError",
    "ModelSpec",
    "StateSpec",
    "parse_model",
    "parse_state",
    "read_state_file",
    "write_state_file",
    "trajectory_rows",
    "trajectory_csv",
    "trajectory_json",
    "parse_elements",
]


class SpecError(ValueError):
    """A model or state description could not be parsed."""


def _parse_kv(body: str, what: str) -> dict[str, float]:
    out: dict[str, float] = {}
    if not body:
        return out
    for item in body.split(","):
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise SpecError(f"malformed {what} parameter {item!r}; expected key=value")
        if key in out:
            raise SpecError(f"duplicate {what} parameter {key!r}")
        try:
            out[key] = float(val)
        except ValueError:
            raise SpecError(f"{what} parameter {key}={val!r} is not a number") from None
        if not math.isfinite(out[key]):
            raise SpecError(f"{what} parameter {key} must be finite")
    return out


def _take(kv: dict, required, optional, what: str) -> dict:
    missing = [k for k in required if k not in kv]
    if missing:
        raise SpecError(f"{what} is missing {', '.join(missing)}")
    extra = sorted(set(kv) - set(required) - set(optional))
    if extra:
        raise SpecError(f"{what} has unknown parameters {', '.join(extra)}")
    return kv


@dataclass(frozen=True)
class ModelSpec:
    system: str
    params: object
    atoms: int = 2
    omegas: tuple[float, float] | None = None

    def generator(self) -> LindbladGenerator:
        if self.system == "I":
            return generator_system_I(self.params, self.atoms, self.omegas)
        return generator_system_II(self.params, self.atoms, self.omegas)

    @property
    def max_rate(self) -> float:
        return self.params.max_rate


def parse_model(text: str, atoms: int | None = None) -> ModelSpec:
    """Parse a model string. ``atoms`` overrides an ``atoms=`` key in the string.

    Parameter-range violations (including the complete-positivity gate on
    ``beta``) surface as :class:`SpecError` wrapping the original error.
    """
    kind, _, body = text.strip().partition(":")
    kv = _parse_kv(body, "model")
    opt = ("atoms", "w1", "w2")
    n_atoms = int(kv.pop("atoms", 2)) if atoms is None else atoms
    kv.pop("atoms", None)
    if n_atoms not in (1, 2):
        raise SpecError(f"atoms must be 1 or 2, got {n_atoms}")
    omegas = None
    if "w1" in kv or "w2" in kv:
        omegas = (kv.pop("w1", 0.0), kv.pop("w2", 0.0))
    try:
        if kind == "sysI":
            _take(kv, ("g1", "g2", "beta"), opt, "sysI model")
            params = SystemIParams(kv["g1"], kv["g2"], kv["beta"])
            system = "I"
        elif kind == "sysII":
            _take(kv, ("ge", "gu"), opt, "sysII model")
            params = SystemIIParams(kv["ge"], kv["gu"])
            system = "II"
        else:
            raise SpecError(f"unknown model kind {kind!r}; expected sysI or sysII")
    except SpecError:
        raise
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    return ModelSpec(system, params, n_atoms, omegas)


@dataclass(frozen=True)
class StateSpec:
    kind: str
    params: object = None
    path: str | None = None

    def density_matrix(self) -> np.ndarray:
        if self.kind == "pure":
            return projector(pure_state(self.params))
        if self.kind == "psimax":
            return projector(psi_max())
        if self.kind == "isotropic":
            return isotropic_state(self.params)
        return read_state_file(self.path)


def parse_state(text: str) -> StateSpec:
    text = text.strip()
    kind, _, body = text.partition(":")
    try:
        if kind == "psimax":
            if body:
                raise SpecError("psimax takes no parameters")
            return StateSpec("psimax")
        if kind == "pure":
            kv = _take(_parse_kv(body, "state"), ("theta", "phi"), (), "pure state")
            return StateSpec("pure", PureStateParams(kv["theta"], kv["phi"]))
        if kind == "isotropic":
            kv = _take(_parse_kv(body, "state"), ("p",), (), "isotropic state")
            return StateSpec("isotropic", IsotropicParams(kv["p"]))
        if kind == "file":
            if not body:
                raise SpecError("file state needs a path")
            return StateSpec("file", path=body)
    except SpecError:
        raise
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    raise SpecError(f"unknown state kind {kind!r}; expected pure, psimax, isotropic or file")


def _fmt_complex(z: complex) -> str:
    return f"{z.real!r}{z.imag:+.17g}j"


def write_state_file(path, rho) -> None:
    rho = np.asarray(rho, dtype=complex)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in rho:
            writer.writerow(_fmt_complex(complex(z)) for z in row)


def read_state_file(path) -> np.ndarray:
    """Read a square matrix of ``re+imj`` entries and validate it as a density matrix."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    try:
        rho = np.array([[complex(c.strip().replace(" ", "")) for c in r] for r in rows])
    except ValueError as exc:
        raise SpecError(f"{path}: bad matrix entry ({exc})") from None
    n = len(rows)
    if rho.ndim != 2 or rho.shape != (n, n) or n not in (3, 9):
        raise SpecError(f"{path}: expected a 3x3 or 9x9 matrix")
    try:
        return check_density_matrix(rho)
    except ValueError as exc:
        raise SpecError(f"{path}: {exc}") from exc


def parse_elements(text: str | None) -> list[tuple[int, int]]:
    """``"1,5;5,9"`` -> ``[(1, 5), (5, 9)]`` (one-based indices)."""
    if not text:
        return []
    out = []
    for item in text.split(";"):
        parts = item.split(",")
        try:
            i, j = (int(p) for p in parts)
        except ValueError:
            raise SpecError(f"bad element {item!r}; expected i,j") from None
        if not (1 <= i <= 9 and 1 <= j <= 9):
            raise SpecError(f"element ({i},{j}) out of range 1..9")
        out.append((i, j))
    return out


def trajectory_rows(traj, elements=()) -> tuple[list[str], list[list[float]]]:
    header = ["t", "negativity", "trace_defect", "min_eig"]
    for i, j in elements:
        header += [f"elem_{i}_{j}_re", f"elem_{i}_{j}_im"]
    rows = []
    for k, t in enumerate(traj.times):
        row = [float(t), float(traj.negativities[k]), float(traj.trace_defects[k]), float(traj.min_eigenvalues[k])]
        for i, j in elements:
            z = traj.states[k, i - 1, j - 1]
            row += [float(z.real), float(z.imag)]
        rows.append(row)
    return header, rows


def trajectory_csv(traj, elements=()) -> str:
    header, rows = trajectory_rows(traj, elements)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(repr(v) for v in row)
    return buf.getvalue()


def trajectory_json(traj, elements=()) -> dict:
    header, rows = trajectory_rows(traj, elements)
    return {name: [row[k] for row in rows] for k, name in enumerate(header)}
