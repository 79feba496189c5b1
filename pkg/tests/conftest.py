from support import ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        e = ACCEPTANCE[number]
        line = f"[{e['status']}] criterion {number}: {e['title']} ({e.get('elapsed', 0.0):.2f}s)"
        if e["detail"]:
            line += f" -- {e['detail']}"
        terminalreporter.write_line(line)
