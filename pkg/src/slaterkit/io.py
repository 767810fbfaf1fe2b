"""JSON file formats for states, density matrices and witness operators.

All files are UTF-8 JSON.  Pure states carry occupation amplitudes over
sorted mode tuples (0-based; strictly increasing for fermions,
non-decreasing for bosons) with Euclidean normalization, which is
convention-free and human-checkable.  Density matrices and operators
carry a dense complex matrix (entries as ``[re, im]`` pairs) plus a
space tag.  Floats are written with full shortest-roundtrip precision,
so write-then-read reproduces amplitudes bit-exactly.
"""

from __future__ import annotations

import json

import numpy as np

from . import mixed, states, witnesses
from .errors import ValidationError


def _complex_pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _matrix_to_json(m: np.ndarray) -> list:
    return [[_complex_pair(z) for z in row] for row in np.asarray(m, dtype=complex)]


def _matrix_from_json(rows) -> np.ndarray:
    try:
        return np.array([[complex(e[0], e[1]) for e in row] for row in rows])
    except (TypeError, IndexError) as exc:
        raise ValidationError(f"malformed matrix entry: {exc}") from exc


def _space_to_json(space: mixed.StateSpace) -> dict:
    if space.kind == mixed.BIPARTITE:
        return {"kind": "bipartite", "dims": list(space.dims)}
    return {"kind": space.kind, "single_particle_dim": space.dims[0],
            "particles": space.particles}


def _space_from_json(obj) -> mixed.StateSpace:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValidationError("space tag must be an object with a 'kind'")
    kind = obj["kind"]
    if kind == "bipartite":
        dims = obj.get("dims")
        if not (isinstance(dims, list) and len(dims) == 2):
            raise ValidationError("bipartite space needs 'dims': [d_A, d_B]")
        return mixed.bipartite_space(int(dims[0]), int(dims[1]))
    if kind in (mixed.ANTISYMMETRIC, mixed.SYMMETRIC):
        d = obj.get("single_particle_dim")
        if d is None:
            raise ValidationError("sector space needs 'single_particle_dim'")
        return mixed.StateSpace(kind, (int(d),), int(obj.get("particles", 2)))
    raise ValidationError(f"unknown space kind {kind!r}")


def pure_state_to_dict(state: states.PureState) -> dict:
    if state.kind == states.BIPARTITE:
        psi = state.matrix()
        amps = [{"indices": [i, j], "re": float(psi[i, j].real), "im": float(psi[i, j].imag)}
                for i in range(psi.shape[0]) for j in range(psi.shape[1]) if psi[i, j] != 0]
        return {"type": "pure", "kind": "bipartite", "dims": list(state.dim),
                "amplitudes": amps}
    from . import sectors
    tuples = sectors.sector_tuples(state.sector_kind, state.dim, state.particles)
    amps = [{"indices": list(t), "re": float(a.real), "im": float(a.imag)}
            for t, a in zip(tuples, state.amps) if a != 0]
    return {"type": "pure", "kind": state.kind, "particles": state.particles,
            "single_particle_dim": state.dim, "amplitudes": amps}


def pure_state_from_dict(obj: dict) -> states.PureState:
    kind = obj.get("kind")
    raw = obj.get("amplitudes")
    if not isinstance(raw, list):
        raise ValidationError("'amplitudes' must be a list")

    def entries():
        for item in raw:
            try:
                yield tuple(int(i) for i in item["indices"]), complex(item["re"], item["im"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ValidationError(f"malformed amplitude entry {item!r}") from exc

    if kind == "bipartite":
        dims = obj.get("dims")
        if not (isinstance(dims, list) and len(dims) == 2):
            raise ValidationError("bipartite state needs 'dims': [d_A, d_B]")
        psi = np.zeros((int(dims[0]), int(dims[1])), dtype=complex)
        for (i, j), a in entries():
            psi[i, j] = a
        return states.bipartite_state(psi)
    if kind in (states.FERMION, states.BOSON):
        d = obj.get("single_particle_dim")
        n = obj.get("particles")
        if d is None or n is None:
            raise ValidationError("need 'single_particle_dim' and 'particles'")
        build = states.fermion_state if kind == states.FERMION else states.boson_state
        return build(int(d), int(n), dict(entries()))
    raise ValidationError(f"unknown pure-state kind {kind!r}")


def density_to_dict(rho: mixed.DensityMatrix) -> dict:
    return {"type": "density", "space": _space_to_json(rho.space),
            "matrix": _matrix_to_json(rho.matrix)}


def density_from_dict(obj: dict) -> mixed.DensityMatrix:
    space = _space_from_json(obj.get("space"))
    return mixed.density_matrix(space, _matrix_from_json(obj.get("matrix")))


def witness_to_dict(w: witnesses.WitnessOperator) -> dict:
    return {"type": "operator", "hermitian": True, "space": _space_to_json(w.space),
            "slater_class": int(w.slater_class), "epsilon": float(w.epsilon),
            "matrix": _matrix_to_json(w.matrix)}


def witness_from_dict(obj: dict, validate: bool = True) -> witnesses.WitnessOperator:
    space = _space_from_json(obj.get("space"))
    k = obj.get("slater_class")
    if k is None:
        raise ValidationError("operator file needs 'slater_class'")
    return witnesses.witness_operator(space, _matrix_from_json(obj.get("matrix")),
                                      int(k), validate=validate)


def unitary_from_dict(obj: dict) -> tuple[np.ndarray, mixed.StateSpace]:
    space = _space_from_json(obj.get("space"))
    m = _matrix_from_json(obj.get("matrix"))
    if m.shape != (space.dim, space.dim):
        raise ValidationError(f"matrix shape {m.shape} does not match space dim {space.dim}")
    return m, space


def load_document(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValidationError(f"{path}: expected a JSON object with a 'type' field")
    return obj


def load_any(path: str):
    """Load a pure state, density matrix or operator, dispatching on type."""
    obj = load_document(path)
    t = obj["type"]
    if t == "pure":
        return pure_state_from_dict(obj)
    if t == "density":
        return density_from_dict(obj)
    if t == "operator":
        return witness_from_dict(obj)
    raise ValidationError(f"{path}: unknown document type {t!r}")


def dump(obj: dict, path: str | None, pretty: bool = False) -> str:
    text = json.dumps(obj, indent=2 if pretty else None, sort_keys=False)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text
