import weakref

import pytest
from hypothesis import settings

from fragile import core

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

_live = []
_orig_init = core.ComparisonLedger.__init__
CONSERVATION = {"ledgers": 0, "violations": []}


def _balanced(led):
    CONSERVATION["ledgers"] += 1
    if 2 * led.work != int(led.counts.sum()):
        CONSERVATION["violations"].append(repr(led))


def _tracking_init(self, *a, **kw):
    _orig_init(self, *a, **kw)
    self._checked = False
    _live.append(weakref.ref(self))


def _check_on_release(self):
    if not getattr(self, "_checked", True):
        _balanced(self)


core.ComparisonLedger.__init__ = _tracking_init
core.ComparisonLedger.__del__ = _check_on_release


def pytest_configure(config):
    config.addinivalue_line("markers", "no_conservation: test builds ledgers by hand on purpose")
    config.addinivalue_line("markers", "acceptance: acceptance criterion")


@pytest.fixture(autouse=True)
def ledger_conservation(request):
    """Every ledger built during a test must satisfy 2*work == sum(counts).

    Ledgers are checked when released, and any still alive at teardown are
    checked then.
    """
    _live.clear()
    before = len(CONSERVATION["violations"])
    skip = request.node.get_closest_marker("no_conservation") is not None
    yield
    for ref in _live:
        led = ref()
        if led is not None:
            led._checked = True
            if not skip:
                _balanced(led)
    _live.clear()
    bad = CONSERVATION["violations"][before:]
    if skip:
        del CONSERVATION["violations"][before:]
        return
    assert not bad, f"ledgers out of balance: {bad[:3]}"


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
