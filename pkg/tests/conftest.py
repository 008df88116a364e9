import math

import numpy as np
import pytest

from lattice_sommerfeld import Frequency, ProblemConfig


@pytest.fixture
def make_cfg():
    def make(eps=0.2, omega=(1.0, 0.1), theta=math.pi / 3, kind="D", **kw):
        return ProblemConfig(eps, Frequency(*omega), theta, kind, **kw)
    return make


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def verdict(capsys):
    """Print a one-line PASS/FAIL verdict (outside output capture), then assert."""
    def report(label, ok, detail=""):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {label}: {detail}")
        assert ok, f"{label}: {detail}"
    return report
