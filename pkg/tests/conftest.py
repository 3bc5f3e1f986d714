from pathlib import Path

import numpy as np
import pytest

from comm_tool.core.algebra import AlgebraSpec, build_algebra
from comm_tool.services.cartan_service import build_frame

SPECS = ["su:2", "su:3", "su:4", "so:3", "so:4", "so:5", "so:6", "so:7", "sum:su:2+so:3", "sum:su:2+so:5"]
GOLDEN_DIR = Path(__file__).parent / "golden"

_frames = {}


def algebra_of(label):
    return build_algebra(AlgebraSpec.parse(label))


def frame_of(label, seed=0):
    """Seeded Cartan frame, built once per session."""
    key = (label, seed)
    if key not in _frames:
        _frames[key] = build_frame(algebra_of(label), np.random.default_rng(seed))
    return _frames[key]


def csa_free(frame, element):
    """Remove the CSA component of an element."""
    return element - frame.h.project(element)


@pytest.fixture(params=SPECS)
def label(request):
    return request.param


@pytest.fixture
def su3():
    return algebra_of("su:3")


@pytest.fixture
def su3_frame():
    return frame_of("su:3")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_addoption(parser):
    parser.addoption(
        "--update-golden", action="store_true", default=False,
        help="Rewrite the files under tests/golden from the current outputs",
    )


@pytest.fixture
def golden(request):
    """Compare text against tests/golden/<name>; record it with --update-golden."""
    update = request.config.getoption("--update-golden")

    def check(name, text):
        path = GOLDEN_DIR / name
        if update:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
            return
        if not path.exists():
            pytest.skip(f"no golden file {name}; run with --update-golden to record it")
        assert text == path.read_text(), f"{name} differs from its golden copy"

    return check
