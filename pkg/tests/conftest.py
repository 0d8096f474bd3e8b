import random
import sys

from hypothesis import HealthCheck, settings, strategies as st

from idealteich.pattern import random_closed_pattern

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], print_blob=True
)
settings.load_profile("default")


@st.composite
def closed_patterns(draw, max_tets: int = 4):
    n = draw(st.integers(min_value=1, max_value=max_tets))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_closed_pattern(n, random.Random(seed))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
