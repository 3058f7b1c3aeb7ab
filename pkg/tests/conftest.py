"""Collects per-criterion outcomes from tests marked ``criterion`` and prints
one pass/fail line for each at the end of the session."""

_results: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion this test checks")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            num, title = mark.args
            _results.setdefault(num, {"title": title, "passed": 0, "failed": []})


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    entry = _results[mark.args[0]]
    if call.excinfo is not None and not call.excinfo.errisinstance(KeyboardInterrupt):
        entry["failed"].append(item.name)
    elif call.when == "call":
        entry["passed"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_results):
        e = _results[num]
        if e["failed"]:
            status = "FAIL"
        elif e["passed"]:
            status = "PASS"
        else:
            status = "SKIP"
        line = f"criterion {num:2d} {status}  {e['title']}"
        if e["failed"]:
            line += f"  (failing: {', '.join(e['failed'])})"
        tr.write_line(line)
