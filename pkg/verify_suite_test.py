from fractions import Fraction

import pytest

from partitions import GWHError
from run_config import RunConfig
from verify_suite import (
    SUITES, Check, VerificationSuite, VerifyReport, descendant_instances, insertion_tuples, run_verification,
)


def test_insertion_tuples():
    assert list(insertion_tuples(2, 2)) == [(0, 2), (1, 1), (2, 0)]
    assert list(insertion_tuples(0, 0)) == [()]
    assert list(insertion_tuples(1, 0)) == []


def test_descendant_instance_generator():
    assert list(descendant_instances(1, 0, 1)) == [((1,), (1,), (), 0), ((1,), (1,), (0,), 0)]
    for mu, nu, ks, g in descendant_instances(3, 1, 2):
        assert sum(ks) == 2 * g - 2 + len(mu) + len(nu)


def test_small_suites_pass():
    report = run_verification(RunConfig(), budget="quick", suites=["vertex", "completion"], workers=2)
    assert report.passed
    assert [row["suite"] for row in report.table()] == ["vertex", "completion"]
    assert report.table()[1] == {"suite": "completion", "instances": 5, "passed": 5, "failed": 0}
    assert report.to_json()["checks"] == []
    assert len(report.to_json(include_passing=True)["checks"]) == len(report.checks)


def test_digest_ignores_timings():
    config = RunConfig({"random_products": 3})
    a = run_verification(config, suites=["completion"], workers=1)
    b = run_verification(config, suites=["completion"], workers=3)
    assert a.digest() == b.digest()
    assert a.to_json() == b.to_json()


def test_operator_identities():
    config = RunConfig({"random_products": 5, "fock_degree_cap": 3, "fock_genus_cap": 1})
    report = VerificationSuite(config, "quick", workers=2).run(["operators"])
    assert report.passed
    assert report.table()[0]["instances"] == 5 + 1 + 5


def test_failures_are_reported():
    check = VerificationSuite._execute("vertex", "disagree", lambda: {"a": Fraction(1), "b": Fraction(2)})
    assert not check.passed
    assert check.values == {"a": "1", "b": "2"}

    def boom():
        raise GWHError("no cover")

    crashed = VerificationSuite._execute("surgery", "crash", boom)
    assert not crashed.passed
    assert crashed.error == "GWHError: no cover"
    report = VerifyReport("quick", [check, crashed, Check("vertex", "ok", True)], {})
    assert not report.passed
    assert [c["name"] for c in report.to_json()["checks"]] == ["disagree", "crash"]
    assert "FAIL" in report.format_table()


def test_suite_selection_errors():
    suite = VerificationSuite(RunConfig())
    with pytest.raises(KeyError):
        suite.instances("nope")
    with pytest.raises(GWHError):
        VerificationSuite(RunConfig(), budget="huge")
    assert set(SUITES) == {"hurwitz", "vertex", "descendant", "surgery", "operators", "split", "cut-join",
                           "completion"}


def test_cut_join_always_checks_bruteforce():
    instances = dict(VerificationSuite(RunConfig(), budget="full").cut_join_instances())
    for name in ("(5) F2^6 (5)", "(2,2,1) F2^6 (1,1,1,1,1)", "(4,1) F2^5 (3,1,1)"):
        values = instances[name]()
        assert set(values) == {"fock", "bruteforce"}
        assert values["fock"] == values["bruteforce"]
