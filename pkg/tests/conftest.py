import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

from costrec.parser import parse_program

ROOT = pathlib.Path(__file__).resolve().parent.parent
PROGRAMS = ROOT / "programs"
MODELS = PROGRAMS / "models"

CORPUS = [
    "conditional.src",
    "foldsum.src",
    "idnat.src",
    "listmap.src",
    "mem.src",
    "strm.src",
    "treemap.src",
]

# programs with a closed `main` definition, with its frozen operational cost
MAIN_COSTS = {
    "conditional.src": 8,
    "foldsum.src": 13,
    "idnat.src": 4,
    "listmap.src": 7,
    "mem.src": 10,
    "treemap.src": 9,
}


def program_text(name: str) -> str:
    return (PROGRAMS / name).read_text()


def load(name: str):
    return parse_program(program_text(name))


@pytest.fixture(scope="session")
def corpus():
    return {name: load(name) for name in CORPUS}
