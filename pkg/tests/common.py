"""
Paths to the shipped programs and proofs, and the signatures used by generated programs.
"""

from pathlib import Path
from typing import Mapping

from plstar.ir import Substitution
from plstar.parser import SigEnv

ROOT = Path(__file__).resolve().parent.parent
PROGRAMS = ROOT / "programs"
PROOFS = ROOT / "proofs"
GOLDEN = Path(__file__).parent / "golden"

SCALARS = {
    "a": "int",
    "b": "int",
    "c": "int",
    "x": "int",
    "y": "int",
    "z": "int",
    "w": "bool",
    "inc": "proc(in int, out int)",
    "id": "proc(in int, out int)",
    "+": "proc(in int, in int, out int)",
    "=": "proc(in int, in int, out bool)",
    "0": "proc(out int)",
    "1": "proc(out int)",
    "p": "proc(in int, out int)",
    "q": "proc(in int, out int)",
    "bump": "prim(inout int) psi=tick",
    "X": "frag(in int, out int)",
    "Y": "frag(inout int)",
}


def scalar_signatures() -> SigEnv:
    return SigEnv.from_mapping(SCALARS)


def substitution(pairs: Mapping[str, str]) -> Substitution:
    scalars = scalar_signatures()
    return Substitution({scalars.get(k).var(): scalars.get(v).var() for k, v in pairs.items()})
