"""Acceptance: every registered criterion at its stated tolerance.

The full suite runs once with the default configuration.  Each criterion
then becomes one test that prints ``Cxx PASS`` or ``Cxx FAIL`` with its
measured values and fails if the criterion is not met.  A consolidated
list of the same lines appears in the terminal summary.
"""
import pytest

from steklov.verify import REGISTRY, ExperimentConfig, run_suite

ACCEPTANCE_LINES = {}


@pytest.fixture(scope="module")
def report(tmp_path_factory):
    return run_suite(ExperimentConfig(), out_dir=tmp_path_factory.mktemp("acceptance"))


def _line(res):
    tag = "PASS" if res.status == "pass" else "FAIL"
    measured = ", ".join(
        f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}"
        for k, v in res.measured.items()
        if not isinstance(v, (dict, list))
    )
    extra = f" [{res.status}: {res.notes}]" if res.status not in ("pass", "fail") else ""
    return f"{res.check_id} {tag} {res.title}: {measured}{extra}"


@pytest.mark.slow
@pytest.mark.parametrize("check_id", sorted(REGISTRY))
def test_criterion(report, check_id):
    res = report.results[check_id]
    line = _line(res)
    ACCEPTANCE_LINES[check_id] = line
    print(line)
    assert res.status == "pass", line


@pytest.mark.slow
def test_registry_complete(report):
    assert report.registry_complete()
    assert len(report.results) == 12
