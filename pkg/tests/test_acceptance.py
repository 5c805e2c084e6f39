"""The ten acceptance criteria at their stated tolerances and runtime budgets.

Each test prints one ``[PASS]``/``[FAIL]`` line. Run standalone with
``python tests/test_acceptance.py`` for just the summary lines.
"""
import sys

import numpy as np
import pytest

from hamstat.suites import ALL_CHECKS


@pytest.mark.parametrize("check", ALL_CHECKS, ids=[c.__name__ for c in ALL_CHECKS])
def test_criterion(check, capsys):
    result = check()
    with capsys.disabled():
        print("\n" + result.line(), flush=True)
    assert result.passed, result.details
    assert result.within_budget, f"{result.seconds:.1f}s exceeds {result.budget:.0f}s"


def test_blowup_reports_constant_discrepancy():
    # the measured constant sits at pi, far from 4 pi^3
    from hamstat.suites import check_blowup

    d = check_blowup().details
    assert d["theta_hat"] == pytest.approx(np.pi, rel=0.1)
    assert d["theta_hat_over_four_pi_cubed"] == pytest.approx(1 / (4 * np.pi ** 2), rel=0.1)


if __name__ == "__main__":
    ok = True
    for check in ALL_CHECKS:
        r = check()
        print(r.line(), flush=True)
        ok &= r.passed and r.within_budget
    sys.exit(0 if ok else 1)
