"""Shared fixtures and the acceptance report hook."""

from __future__ import annotations

import sys

import pytest

from polsp import CavityConfig, OscillatorSpecies, SolverSettings


def make_config(L=1.0, l=0.5, c=1.0, species=((4.0, 1.0),),
                photon=8, exciton=2, **solver_kw) -> CavityConfig:
    return CavityConfig(
        L=L, l=l, c=c,
        oscillators=tuple(OscillatorSpecies(omega=w, G=g) for w, g in species),
        photon_mode_count=photon,
        exciton_mode_count=exciton,
        solver=SolverSettings(**solver_kw))


@pytest.fixture
def config_factory():
    return make_config


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for num, label, ok, detail in sorted(mod.RESULTS):
        status = "PASS" if ok else "FAIL"
        line = f"criterion {num:2d} {status}  {label}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
