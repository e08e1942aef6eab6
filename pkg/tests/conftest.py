import json
import os
import sys
import time

import pytest
from hypothesis import HealthCheck, settings

sys.set_int_max_str_digits(0)
sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("ari", max_examples=400, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ari"))


def pytest_configure(config):
    config.addinivalue_line("markers", "property: generated-case invariant suites")
    config.addinivalue_line("markers", "slow: long-running checks")


def pytest_sessionstart(session):
    session.config.ari_started = time.monotonic()


def pytest_collection_modifyitems(session, config, items):
    # acceptance runs last so it can read the case counts of the property suites
    items.sort(key=lambda it: it.path.name == "test_acceptance.py")


def pytest_sessionfinish(session, exitstatus):
    from _cases import CASES
    log = os.environ.get("ARI_CASE_LOG")
    if log:
        with open(log, "w") as fh:
            json.dump(dict(CASES), fh)


@pytest.fixture(scope="session")
def session_started(request):
    return request.config.ari_started


@pytest.fixture(scope="session")
def main_report():
    from ari_kernel import corpus
    return corpus.check_entry("main")
