"""Named sample programs with hand-assigned linearity labels."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .srn import parse_program

# whether each program stays inside the composition-linear fragment, decided by reading it
CLSRN_LABELS = {
    "zero11": True, "proj3": True, "select": True, "quad": True, "half2": True,
    "orelse": False, "nest": False, "lnest": True, "ones": True, "copy": True,
    "append": True, "lsb": True, "nappend": True, "padones": True, "sticky": False,
    "deep": True,
}


def corpus_source() -> str:
    return resources.files(__package__).joinpath("corpus.srn").read_text()


@lru_cache(maxsize=None)
def _programs() -> tuple:
    return tuple(parse_program(corpus_source()).items())


def corpus() -> dict:
    """Name to definition, in file order."""
    return dict(_programs())
