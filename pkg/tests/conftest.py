from __future__ import annotations

_ACCEPTANCE: dict[str, dict] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        if item.nodeid.startswith("tests/test_acceptance.py::test_criterion_"):
            doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
            _ACCEPTANCE[item.nodeid] = {"label": doc, "outcome": "not run", "parts": []}


def pytest_runtest_logreport(report):
    entry = _ACCEPTANCE.get(report.nodeid)
    if entry is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        entry["outcome"] = report.outcome
        entry["parts"] = [v for k, v in report.user_properties if k == "check"]


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.write_sep("=", "acceptance criteria")
    for entry in _ACCEPTANCE.values():
        tag = {"passed": "PASS", "failed": "FAIL"}.get(entry["outcome"], entry["outcome"].upper())
        tr.write_line(f"{tag}  {entry['label']}")
        for part in entry["parts"]:
            tr.write_line(f"        {part}")
