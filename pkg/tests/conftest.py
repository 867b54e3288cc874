"""Shared helpers for the test suite."""

from vibracav.core import CavityConfig

# benchmark scale used throughout: epsilon*omega1*t_final = 0.1 at lam = pi
BENCH = dict(epsilon=1e-4, t_final=1000.0)


def make_cfg(**kw):
    base = dict(BENCH)
    base.update(kw)
    return CavityConfig(**base)


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
