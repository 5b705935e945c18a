import re

import pytest

_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = re.match(r"test_criterion_(\d+)_", item.name)
    if not m:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        reason = ""
        if rep.failed:
            crash = getattr(rep.longrepr, "reprcrash", None)
            reason = crash.message.splitlines()[0] if crash else "failed"
        _ACCEPTANCE[int(m.group(1))] = (rep.passed, doc, reason)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        ok, doc, reason = _ACCEPTANCE[num]
        line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {doc}"
        if reason:
            line += f"  [{reason[:160]}]"
        tr.write_line(line)
    passed = sum(ok for ok, _, _ in _ACCEPTANCE.values())
    tr.write_line(f"{passed}/{len(_ACCEPTANCE)} criteria passed")
