"""Acceptance checks: one test per criterion, each printing a PASS/FAIL line with the measured values."""

import pytest

from burgers_particle.suite import ScenarioSuite


@pytest.fixture(scope="module")
def suite():
    return ScenarioSuite()


def check(suite, number, capsys):
    result = suite.check(number)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()


class TestAcceptance:
    def test_01_energy_identity(self, suite, capsys):
        check(suite, 1, capsys)

    def test_02_free_decay_envelope(self, suite, capsys):
        check(suite, 2, capsys)

    def test_03_free_particle_limit(self, suite, capsys):
        check(suite, 3, capsys)

    def test_04_controlled_decay_envelope(self, suite, capsys):
        check(suite, 4, capsys)

    def test_05_corridor(self, suite, capsys):
        check(suite, 5, capsys)

    def test_06_lyapunov_sandwich(self, suite, capsys):
        check(suite, 6, capsys)

    def test_07_inequality_chain(self, suite, capsys):
        check(suite, 7, capsys)

    def test_08_weak_form_conformance(self, suite, capsys):
        check(suite, 8, capsys)

    def test_09_mms_convergence(self, suite, capsys):
        check(suite, 9, capsys)

    def test_10_equilibrium_fixed_point(self, suite, capsys):
        check(suite, 10, capsys)
