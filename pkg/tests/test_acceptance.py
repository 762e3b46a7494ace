"""One test per acceptance criterion, run at full size.

Each test prints its result line, and the lines are repeated in the
terminal summary.  Tolerances are pinned here so a change in the suite
cannot loosen them silently.
"""

import math

import pytest

from conftest import ACCEPTANCE_LINES
from delmeasure import suite

SEED = 7

# (check, primary tolerance, secondary tolerances found in details)
PINNED = [
    (suite.check_hessian, 1e-5, {}),
    (suite.check_positivity, 1e-10, {}),
    (suite.check_flip_lemma, 1e-9, {"cocyclic_tol": 1e-12}),
    (suite.check_maximality, 1e-12, {}),
    (suite.check_covariance, 1e-9, {}),
    (suite.check_top_form, 1e-8, {}),
    (suite.check_weil_petersson, 1e-9, {}),
    (suite.check_face_identities, 1e-9, {"fd_tol": 1e-7}),
    (suite.check_ptolemy, 1e-12, {}),
    (suite.check_integral_B, 3.0, {}),
    (suite.check_integral_R, 3.0, {}),
    (suite.check_growth, 0.01, {}),
    (suite.check_jacobian, 1e-6, {}),
    (suite.check_dual, 1e-8, {"jump_tol": 1e-6, "slope_tol": 1e-3}),
    (suite.check_angle_pattern, 1e-10, {}),
    (suite.check_flip_discontinuity, 1e-5, {}),
]


def test_every_check_is_pinned():
    assert [p[0] for p in PINNED] == list(suite.CHECKS)


@pytest.mark.parametrize("fn, tol, extra", PINNED, ids=[p[0].__name__.removeprefix("check_") for p in PINNED])
def test_criterion(fn, tol, extra):
    rec = suite.run_check(fn, SEED, quick=False)
    line = rec.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert rec.tolerance == tol
    for key, value in extra.items():
        assert rec.details[key] == value
    assert math.isfinite(rec.measured)
    if rec.status == suite.REPORT:
        return
    assert rec.status == suite.PASS, rec.details
    if fn is suite.check_growth:
        # measured is the 3-sigma lower bound of V1 in units of pi^2/8
        assert rec.measured >= 1 - tol
        assert rec.details["V2_over_2V1"] - 3 * rec.details["V2_over_2V1_stderr"] >= rec.details["bound"] * (1 - tol)
    elif fn is suite.check_positivity:
        assert rec.measured >= -tol
    else:
        assert abs(rec.measured) <= tol
