from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, derandomize=True, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

CRITERIA = {
    "c1": "C1 route equivalence",
    "c2": "C2 node obstruction geometry",
    "c3": "C3 torsor law",
    "c4": "C4 tangent dimensions",
    "c5": "C5 section difference identity",
    "c6": "C6 principal-parts identities",
    "c7": "C7 perfect universal family",
    "c8": "C8 homological core soundness",
    "c9": "C9 determinism",
}
_outcomes: dict = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    key = name.split("_")[1] if name.startswith("test_c") else None
    if key not in CRITERIA:
        return
    if report.when == "call" or report.failed:
        ok = _outcomes.get(key, True) and report.passed
        _outcomes[key] = ok


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key, label in CRITERIA.items():
        if key in _outcomes:
            terminalreporter.write_line(f"{label}: {'PASS' if _outcomes[key] else 'FAIL'}")
