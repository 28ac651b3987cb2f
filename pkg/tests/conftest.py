"""Collects acceptance outcomes and prints one line per criterion."""

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line(
        'markers', 'criterion(number, title): acceptance criterion')


def pytest_runtest_logreport(report):
    if report.when == 'setup' and report.passed:
        return
    if report.when == 'teardown' and not report.failed:
        return
    props = dict(report.user_properties)
    if 'criterion' not in props:
        return
    key = props['criterion']
    ok = report.passed
    prev = _RESULTS.get(key)
    if prev is not None and not prev[0]:
        return
    _RESULTS[key] = (ok, props.get('title', ''), props.get('detail', ''))


def pytest_runtest_setup(item):
    mark = item.get_closest_marker('criterion')
    if mark is not None:
        item.user_properties.append(('criterion', mark.args[0]))
        item.user_properties.append(('title', mark.args[1]))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section('acceptance criteria')
    for key in sorted(_RESULTS):
        ok, title, detail = _RESULTS[key]
        line = f"criterion {key}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        tr.write_line(line)
    passed = sum(ok for ok, _, _ in _RESULTS.values())
    tr.write_line(f"{passed}/{len(_RESULTS)} criteria passed")
