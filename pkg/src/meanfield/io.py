"""JSON encodings for matrices, spectra, tables and even pure states."""
from __future__ import annotations

import json

import numpy as np

from .classical_bridge import JointDistribution
from .errors import ContractViolation
from .linalg import DensityMatrix, PureState, Spectrum, as_matrix, validate_density
from .qubit_array import EpsAmplitudes
from .spectra import PermutationCombination

SIG_DIGITS = 12


def fmt(x: float) -> float:
    """Round to 12 significant digits (keeps output stable across runs)."""
    x = float(x)
    if x == 0 or not np.isfinite(x):
        return 0.0 if x == 0 else x
    return float(f"{x:.{SIG_DIGITS}g}")


def rounded(obj):
    """Recursively apply ``fmt`` to every float in a JSON-like value."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return rounded(obj.tolist())
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(rounded(obj), sort_keys=False)


def matrix_to_json(m, dims=None) -> dict:
    if isinstance(m, DensityMatrix):
        dims, m = m.dims, m.matrix
    m = np.asarray(m, dtype=complex)
    if dims is None:
        dims = (m.shape[0],)
    return {"dims": list(dims), "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(obj) -> tuple:
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise ContractViolation(f"malformed matrix JSON: {e}") from None
    if re.shape != im.shape:
        raise ContractViolation("re and im parts differ in shape")
    m = as_matrix(re + 1j * im)
    dims = tuple(obj.get("dims", [m.shape[0]]))
    return m, dims


def density_from_json(obj, tol=None) -> DensityMatrix:
    m, dims = matrix_from_json(obj)
    return validate_density(m, dims) if tol is None else validate_density(m, dims, tol)


def spectrum_to_json(s) -> dict:
    vals = s.values if isinstance(s, Spectrum) else s
    return {"values": [float(x) for x in vals]}


def spectrum_from_json(obj) -> Spectrum:
    vals = obj["values"] if isinstance(obj, dict) else obj
    return Spectrum.of(vals)


def perms_to_json(c: PermutationCombination) -> dict:
    return {"terms": [{"w": w, "perm": list(p)} for w, p in c.terms]}


def perms_from_json(obj) -> PermutationCombination:
    return PermutationCombination(tuple((t["w"], t["perm"]) for t in obj["terms"]))


def eps_to_json(e: EpsAmplitudes) -> dict:
    amps = [{"x": x, "re": c.real, "im": c.imag} for x, c in sorted(e.amps.items())]
    return {"n": e.n, "amps": amps}


def eps_from_json(obj) -> EpsAmplitudes:
    return EpsAmplitudes(int(obj["n"]), {a["x"]: complex(a["re"], a.get("im", 0.0)) for a in obj["amps"]})


def pure_to_json(psi: PureState) -> dict:
    a = psi.amplitudes
    return {"dims": list(psi.dims), "re": a.real.tolist(), "im": a.imag.tolist()}


def pure_from_json(obj) -> PureState:
    a = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj.get("im", 0.0), dtype=float)
    return PureState(a, tuple(obj["dims"]))


def table_to_json(p: JointDistribution) -> dict:
    return {"table": p.table.tolist()}


def table_from_json(obj) -> JointDistribution:
    return JointDistribution(obj["table"])
