import os
import sys

import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile(
    "thorough", max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def entries(min_value=0.0, max_value=1e3):
    """Nonnegative floats with exact zeros and a wide dynamic range.

    Nonzero entries stay above 1e-100 so products of a few of them remain
    normal floats, where relative error bounds are meaningful.
    """
    return st.one_of(
        st.just(0.0),
        st.floats(min_value=max(min_value, 1e-100), max_value=max_value),
        st.floats(min_value=-6, max_value=3).map(lambda e: 10.0**e),
    )


@st.composite
def arrays(draw, n=None, min_n=1, max_n=5, positive=False):
    n = n or draw(st.integers(min_n, max_n))
    elems = st.floats(1e-3, 1e3) if positive else entries()
    return draw(hnp.arrays(np.float64, (n, n), elements=elems))


@st.composite
def matrices(draw, n=None, min_n=1, max_n=5, positive=False):
    from hspec.matcore import NonnegMatrix

    return NonnegMatrix(draw(arrays(n=n, min_n=min_n, max_n=max_n, positive=positive)))


@st.composite
def matrix_lists(draw, k_min=1, k_max=3, min_n=1, max_n=4, positive=False):
    n = draw(st.integers(min_n, max_n))
    k = draw(st.integers(k_min, k_max))
    return [draw(matrices(n=n, positive=positive)) for _ in range(k)]


@st.composite
def convex_weights(draw, k):
    raw = draw(st.lists(st.floats(0.05, 1.0), min_size=k, max_size=k))
    s = sum(raw)
    w = [x / s for x in raw]
    w[-1] = 1.0 - sum(w[:-1])
    return w


# --------------------------------------------------------------------------
# acceptance criteria: one pass/fail line each, printed at the end of the run

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = (bool(ok), detail)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
