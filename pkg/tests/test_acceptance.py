"""One test per acceptance criterion, each driven through the scenario runner."""

import pytest

from conftest import ACCEPTANCE
from corrmem.scenarios import RunSpec, run

CASES = {
    "A1": RunSpec("verify", samples=3, trace=False),
    "A2": RunSpec("verify", samples=3, trace=False),
    "A3": RunSpec("oracle"),
    "A4": RunSpec("sweep", trace=False),
    "A5": RunSpec("entangle2", trace=False),
    "A6": RunSpec("ghz3", trace=False),
    "A7": RunSpec("crossline", trace=False),
    "A8": RunSpec("oracle"),
}

_cache = {}


def _report(spec):
    key = repr(spec)
    if key not in _cache:
        _cache[key] = run(spec)
    return _cache[key]


@pytest.mark.parametrize("cid", sorted(CASES))
def test_criterion(cid):
    report = _report(CASES[cid])
    verdicts = [v for v in report.verdicts if v.criterion == cid]
    assert verdicts, f"no verdicts for {cid}"
    failed = [v for v in verdicts if not v.passed]
    lines = [f"{'PASS' if v.passed else 'FAIL'} {v.name}: {v.value:.4g} {v.relation} {v.threshold:.3g}" for v in verdicts]
    worst = failed[0] if failed else verdicts[0]
    ACCEPTANCE[cid] = (not failed, f"{worst.name} = {worst.value:.4g} ({worst.relation} {worst.threshold:.3g})")
    print(f"{cid}: {'PASS' if not failed else 'FAIL'}")
    for line in lines:
        print("   " + line)
    assert not failed, "; ".join(lines)
