from __future__ import annotations

from pathlib import Path

import pytest

from fcn.analytics import GoldAnnotation
from fcn.backends import RuleBackend, bundled_lexicon
from fcn.config import load_config
from fcn.model import (
    FoodClaim,
    FoodEntity,
    SourceDocument,
    ValidatingSource,
    read_jsonl,
)
from fcn.pipeline import run_pipeline

FIXTURES = Path(__file__).resolve().parent / "fixtures"
CORPUS = FIXTURES / "corpus.jsonl"
GOLD = FIXTURES / "gold.jsonl"
LENGTH_GATE = FIXTURES / "length_gate.jsonl"
TRANSCRIPTS = FIXTURES / "transcripts"


@pytest.fixture(scope="session")
def lexicon():
    return bundled_lexicon()


@pytest.fixture(scope="session")
def rule_backend(lexicon):
    return RuleBackend(lexicon)


@pytest.fixture(scope="session")
def pipeline_run(tmp_path_factory):
    """One full rule-backend pipeline run over the fixture corpus, shared
    by every test that only reads its outputs."""
    workdir = tmp_path_factory.mktemp("pipeline")
    config = load_config()
    result = run_pipeline(CORPUS, workdir, config)
    return result


@pytest.fixture(scope="session")
def curated(pipeline_run):
    paths = pipeline_run.paths
    return {
        "docs": list(read_jsonl(paths.docs, SourceDocument.from_dict)),
        "claims": list(read_jsonl(paths.claims_final, FoodClaim.from_dict)),
        "validations": list(read_jsonl(paths.validations, ValidatingSource.from_dict)),
        "entities": list(read_jsonl(paths.entities, FoodEntity.from_dict)),
    }


@pytest.fixture(scope="session")
def gold_annotations():
    return list(read_jsonl(GOLD, GoldAnnotation.from_dict))


# ── Acceptance summary ────────────────────────────────────────────────

_acceptance_results: dict[str, str] = {}


def record_acceptance(criterion: str, note: str = "") -> None:
    _acceptance_results[criterion] = note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    name = item.name
    if report.when == "call" and name.startswith("test_p") and "acceptance" in str(item.fspath):
        criterion = name.split("_")[1].upper()
        status = "PASS" if report.passed else "FAIL"
        note = _acceptance_results.get(criterion, "")
        _acceptance_results[criterion] = f"{status} {note}".strip()


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_acceptance_results, key=lambda c: int(c[1:])):
        terminalreporter.write_line(f"{criterion}: {_acceptance_results[criterion]}")
