"""The acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line; the lines are printed in the
"acceptance criteria" section at the end of the pytest run.  Criterion 12 is a diagnostic and
never fails the suite.
"""

import pytest

from khtangle import acceptance


@pytest.fixture(scope="module")
def ctx():
    return acceptance.Context()


UNATTAINABLE = {
    6: "the listed dims 7,6,5,5,5,... contain zero steps, contradicting the criterion's own |step| = 1 clause",
}


@pytest.mark.parametrize(
    "number",
    [
        pytest.param(n, marks=pytest.mark.xfail(strict=True, reason=UNATTAINABLE[n])) if n in UNATTAINABLE else n
        for n in range(1, len(acceptance.HARD) + 1)
    ],
)
def test_criterion(ctx, acceptance_log, number):
    r = acceptance.run_check(number, ctx)
    acceptance_log.append(r.line())
    print(r.line())
    assert r.ok, r.detail


def test_criterion_12_soft_diagnostics(ctx, acceptance_log):
    r = acceptance.check_soft(ctx)
    acceptance_log.append(r.line())
    print(r.line())
    assert not r.hard


def test_trefoil_window_dims_as_computed(trefoil):
    from khtangle.limit import compute_window

    dims = compute_window(trefoil, 1, 9).dims()
    assert dims == acceptance.WINDOW_TREFOIL_COMPUTED
    assert all(abs(dims[i + 1] - dims[i]) == 1 for i in range(1, 9))
