"""State descriptions: JSON state files and the builtin shorthand.

A state file is either explicit amplitudes::

    {"n": 2, "amps": [[0.7071, 0], [0, 0], [0, 0], [0.7071, 0]]}

or a named state::

    {"builtin": "ghz", "n": 4}
    {"builtin": "dicke", "n": 6, "k": 3}
    {"builtin": "product", "parts": [{"builtin": "ghz", "n": 3},
                                     {"builtin": "zero", "n": 5}]}

Either form may carry an optional ``"tag"`` used as the row label.

On the command line ``--builtin`` takes ``NAME[:params]`` with factors
joined by ``*``, e.g. ``ghz:4``, ``w:5``, ``dicke:6,3``,
``ghz:3*zero:5``.
"""
from __future__ import annotations

import json
from pathlib import Path

from . import state as st
from .errors import StateError

_ARITY = {"ghz": 1, "w": 1, "zero": 1, "dicke": 2}


def parse_builtin(text: str) -> dict:
    """Turn ``"ghz:3*zero:5"`` style shorthand into the JSON description."""
    factors = [f.strip() for f in text.split("*")]
    parts = []
    for f in factors:
        name, _, params = f.partition(":")
        name = name.lower()
        if name not in _ARITY:
            raise StateError(f"unknown builtin {name!r}; expected one of {sorted(_ARITY)}")
        try:
            args = [int(a) for a in params.split(",")] if params else []
        except ValueError:
            raise StateError(f"bad parameters in {f!r}") from None
        if len(args) != _ARITY[name]:
            raise StateError(f"{name} takes {_ARITY[name]} integer parameter(s), got {f!r}")
        obj = {"builtin": name, "n": args[0]}
        if name == "dicke":
            obj["k"] = args[1]
        parts.append(obj)
    if len(parts) == 1:
        return parts[0]
    return {"builtin": "product", "parts": parts}


def load_state_file(path: str | Path) -> dict:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise StateError(f"cannot read state file {path}: {exc}") from None
    if not isinstance(obj, dict):
        raise StateError("state file must hold a JSON object")
    return obj


def _int_field(obj: dict, key: str) -> int:
    val = obj.get(key)
    if not isinstance(val, int) or isinstance(val, bool):
        raise StateError(f"field {key!r} must be an integer")
    return val


def state_qubits(obj: dict) -> int:
    """Qubit count declared by a description, without building the state."""
    if obj.get("builtin") == "product":
        return sum(state_qubits(p) for p in _parts(obj))
    return _int_field(obj, "n")


def _parts(obj: dict) -> list:
    parts = obj.get("parts")
    if not isinstance(parts, list) or not parts:
        raise StateError("product needs a nonempty 'parts' list")
    return parts


def symmetric_family(obj: dict) -> tuple[str, int, int] | None:
    """``(family, n, k)`` if the description is a GHZ, W or Dicke builtin."""
    name = obj.get("builtin")
    if name == "ghz":
        return "ghz", _int_field(obj, "n"), 0
    if name == "w":
        return "w", _int_field(obj, "n"), 1
    if name == "dicke":
        return "dicke", _int_field(obj, "n"), _int_field(obj, "k")
    return None


def build_state(obj: dict) -> st.StateVector:
    """Materialize the state vector for a description."""
    name = obj.get("builtin")
    if name is None:
        n = _int_field(obj, "n")
        amps = obj.get("amps")
        if not isinstance(amps, list):
            raise StateError("field 'amps' must be a list of [re, im] pairs")
        try:
            values = [complex(float(re), float(im)) for re, im in amps]
        except (TypeError, ValueError):
            raise StateError("each amplitude must be a [re, im] pair of numbers") from None
        return st.make_state(n, values)
    if name == "ghz":
        return st.ghz(_int_field(obj, "n"))
    if name == "w":
        return st.w_state(_int_field(obj, "n"))
    if name == "dicke":
        return st.dicke(_int_field(obj, "n"), _int_field(obj, "k"))
    if name == "zero":
        return st.zero_state(_int_field(obj, "n"))
    if name == "product":
        return st.product([build_state(p) for p in _parts(obj)])
    raise StateError(f"unknown builtin {name!r}")


def describe(obj: dict) -> str:
    """Default row tag for a description, e.g. ``ghz:3*zero:5``."""
    if "tag" in obj:
        return str(obj["tag"])
    name = obj.get("builtin")
    if name is None:
        return f"state:{obj.get('n')}"
    if name == "product":
        return "*".join(describe(p) for p in _parts(obj))
    if name == "dicke":
        return f"dicke:{obj.get('n')},{obj.get('k')}"
    return f"{name}:{obj.get('n')}"


def state_to_json(psi: st.StateVector, tag: str | None = None) -> dict:
    obj = {"n": psi.n, "amps": [[float(a.real), float(a.imag)] for a in psi.amps]}
    if tag:
        obj["tag"] = tag
    return obj
