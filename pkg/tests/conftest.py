import pytest

_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_KEY] = []


@pytest.fixture
def report(request):
    """Record one pass/fail line per acceptance criterion.

    ``report(label, {check: (residual, tol)})`` prints the line, keeps it for
    the terminal summary and returns whether every residual is within its tol.
    """
    lines = request.config.stash[_KEY]

    def _report(label, checks):
        ok = all(r <= t for r, t in checks.values())
        detail = "; ".join(f"{k}={r:.3g} (tol {t:.0e})" for k, (r, t) in checks.items())
        line = f"{label}: {'PASS' if ok else 'FAIL'} | {detail}"
        print(line)
        lines.append(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
