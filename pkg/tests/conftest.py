import pytest

from gaci import ingest

_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(id, title): exit criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    detail = dict(item.user_properties).get("detail", "")
    _ACCEPTANCE.append((marker.args[0], marker.args[1], rep.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid, title, passed, detail in sorted(_ACCEPTANCE, key=lambda r: int(r[0][2:])):
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] {cid} {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def pillars():
    return ingest.load_pillar_matrix(ingest.fixture("pillars_2019.csv"))


@pytest.fixture(scope="session")
def gci():
    return ingest.load_scores(ingest.fixture("gci_scores.csv"))


@pytest.fixture(scope="session")
def regions():
    return ingest.load_labels(ingest.fixture("regions.csv"), "region")


@pytest.fixture(scope="session")
def development():
    return ingest.load_labels(ingest.fixture("development.csv"), "status")


@pytest.fixture(scope="session")
def table5_fit():
    return ingest.load_coefficients(ingest.fixture("climate_coefficients.csv"),
                                    ingest.fixture("climate_fit_stats.csv"))


@pytest.fixture(scope="session")
def golden():
    """Published tables, loaded as plain csv dicts keyed by country/term."""
    import csv

    def read(name, key):
        with open(ingest.fixture(name), newline="") as fh:
            return {r[key]: r for r in csv.DictReader(fh)}

    return {
        "pillar13": read("pillar13_indicators.csv", "country"),
        "coefficients": read("climate_coefficients.csv", "term"),
        "pillar14": read("pillar14_scores.csv", "country"),
        "gaci": read("gaci_scores.csv", "country"),
        "pillars": read("pillars_2019.csv", "country"),
        "gci_ranks": read("gci_ranks.csv", "country"),
        "diffs": read("gaci_gci_diff.csv", "country"),
    }
