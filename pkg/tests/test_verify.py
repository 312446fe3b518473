import pytest

from fockrank.verify import SUITES, run_suite


@pytest.mark.parametrize("name, seeds", [("moments", None), ("oracle-small", 10), ("permanent", 10),
                                         ("determinant", 10), ("normal-ordered", 3), ("conjugation", 10)])
def test_suite_passes(name, seeds):
    result = run_suite(name, seeds)
    assert result.passed, "\n".join(result.lines())
    assert all(line.startswith("PASS") for line in result.lines())


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")
    assert len(SUITES) == 6
