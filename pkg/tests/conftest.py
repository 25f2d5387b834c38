"""Shared pytest hooks.

The acceptance tests (test_acceptance.py) are named test_criterion_NN_*;
the hooks below collect their outcomes and print one verdict line per
criterion in the terminal summary, so a full run ends with a readable
checklist regardless of verbosity flags.
"""

import re

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_RESULTS = {}


def pytest_runtest_makereport(item, call):
    match = _CRITERION.match(item.name)
    if match is None:
        return
    number = int(match.group(1))
    label = match.group(2).replace("_", " ")
    if call.when == "call":
        _RESULTS[number] = (label, "FAIL" if call.excinfo is not None else "PASS")
    elif call.excinfo is not None:  # setup or teardown blew up
        _RESULTS[number] = (label, "FAIL")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        label, verdict = _RESULTS[number]
        terminalreporter.write_line(f"ACCEPTANCE {number:2d} ({label}): {verdict}")
