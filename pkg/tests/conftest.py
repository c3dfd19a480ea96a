"""Acceptance-criteria bookkeeping: one summary line per criterion."""

import pytest

CRITERIA = {
    1: "weighted error table reproduces the reference study",
    2: "kernel bound ratio <= 1.1 over the full (nu, mu, n) grid",
    3: "classical-limit kernel matches its closed form to 1e-12",
    4: "direct and contour kernel routes agree on the 27-point grid",
    5: "Mittag-Leffler evaluator matches contour inversion to 1e-10",
    6: "symbol identities, asymptotics, and symmetries hold",
    7: "lemma quadratures and scans stay within their bounds",
    8: "discrete solution norm never exceeds the initial norm",
    9: "spectral error norm satisfies the Parseval identity",
}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(num): marks a test as one of the package acceptance criteria",
    )
    config._acceptance_results = {}


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    marker = item.get_closest_marker("acceptance")
    if marker and report.when == "call":
        results = item.config._acceptance_results
        num = marker.args[0]
        results[num] = results.get(num, True) and report.passed
    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance_results", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        if num in results:
            status = "PASS" if results[num] else "FAIL"
        else:
            status = "NOT RUN"
        terminalreporter.write_line(
            f"criterion {num}: {CRITERIA[num]} ... {status}")
