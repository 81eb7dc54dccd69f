import pytest

from qfgraphs.gf import canonical_witness, field_of_order
from qfgraphs.qform import canonical_forms

GRID_FIELDS = (2, 3, 4, 5, 7, 8, 9, 11, 13)

_acceptance = {}


def grid(dims=range(1, 5), fields=GRID_FIELDS):
    """(field, form, a) over both canonical forms per dimension and a in {0, 1, lambda}."""
    for f in fields:
        F = field_of_order(f)
        for n in dims:
            for q in canonical_forms(F, n):
                for a in sorted({0, 1, canonical_witness(F)}):
                    yield F, q, a


def grid_params(pred=lambda F, q, a: True, step=1):
    """The grid as pytest params with readable ids like "f9-H+diag(1,-lambda)-a0"."""
    from qfgraphs.qform import canonical_model_string, classify

    out = []
    for F, q, a in grid():
        if pred(F, q, a):
            label = canonical_model_string(F, classify(q)).replace(" ", "")
            out.append(pytest.param(F, q, a, id=f"f{F.order}-{label}-a{a}"))
    return out[::step]


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(id, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    ident, title = marker.args
    ok = rep.passed and not hasattr(rep, "wasxfail")
    note = ""
    if hasattr(rep, "wasxfail"):
        note = rep.wasxfail
    elif rep.failed:
        note = str(rep.longrepr.reprcrash.message) if hasattr(rep.longrepr, "reprcrash") else "failed"
    # several tests may share one criterion: all must pass, durations add up
    prev_ok, _, prev_note, prev_dur = _acceptance.get(ident, (True, title, "", 0.0))
    _acceptance[ident] = (prev_ok and ok, title, prev_note or note,
                          prev_dur + getattr(rep, "duration", 0.0))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for ident in sorted(_acceptance, key=lambda s: int(s[2:])):
        ok, title, note, dur = _acceptance[ident]
        line = f"{ident:5} {'PASS' if ok else 'FAIL'}  {title}  ({dur:.2f}s)"
        if note:
            line += f"  -- {note.splitlines()[0][:240]}"
        tr.write_line(line)
