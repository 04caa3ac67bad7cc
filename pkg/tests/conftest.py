import pytest

CRITERIA: dict[str, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion exercised by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            CRITERIA.setdefault(mark.args[0], [])
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    name = dict(report.user_properties).get("criterion")
    if name is None:
        return
    if report.when == "call" or report.outcome != "passed":
        CRITERIA[name].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcomes in CRITERIA.items():
        ok = bool(outcomes) and all(o == "passed" for o in outcomes)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")


@pytest.fixture(scope="session")
def lam():
    from nomeq import builtin_lambda

    return builtin_lambda()


@pytest.fixture(scope="session")
def monoid():
    from nomeq import builtin_monoid

    return builtin_monoid()
