import time

SESSION_START = time.perf_counter()
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def pytest_collection_modifyitems(items):
    # acceptance last, so its runtime check sees the whole session
    items.sort(key=lambda item: item.fspath.basename == "test_acceptance.py")
