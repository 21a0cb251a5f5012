import json

import pytest

from conftest import CORPUS, TRANSCRIPTS
from fcn.backends import (
    PromptTemplate,
    RemoteBackend,
    RemoteConfig,
    TranscriptStore,
)
from fcn.config import load_config
from fcn.errors import ConfigError, SchemaError, TransportError
from fcn.model import FoodClaim, check_claim_invariants, read_jsonl
from fcn.pipeline import run_pipeline


def replay_backend():
    return RemoteBackend(RemoteConfig(transcript_dir=str(TRANSCRIPTS), mode="replay"))


def test_replay_requires_transcript_dir():
    with pytest.raises(ConfigError):
        RemoteBackend(RemoteConfig(transcript_dir=None, mode="replay"))


def test_prompt_templates_load_and_exemplars_parse():
    for name in ("claims_v1", "profiles_v1", "stances_v1"):
        template = PromptTemplate.load(name)
        assert template.version >= 1
        for _, output in template.exemplars:
            json.loads(output)  # exemplar outputs must be valid wire JSON


def test_claims_exemplars_fit_the_wire_format():
    template = PromptTemplate.load("claims_v1")
    for _, output in template.exemplars:
        for item in json.loads(output):
            assert "candidate_text" in item and "subject_surface" in item
            for tag in item.get("claim_type", ()):
                from fcn.model import ClaimTypeTag

                ClaimTypeTag(tag)
            from fcn.model import ClaimIntent

            ClaimIntent(item.get("claim_intent", "fact"))


def test_full_pipeline_replay_schema_valid(tmp_path):
    config = load_config()
    result = run_pipeline(CORPUS, tmp_path, config, backend=replay_backend())
    assert result.failed_documents == 0
    claims = list(read_jsonl(result.paths.claims_final, FoodClaim.from_dict))
    assert claims, "replay produced no claims"
    for claim in claims:
        assert claim.extraction_backend.startswith("remote:")
        report = check_claim_invariants(claim, validations=None)
        assert report.violations == ()


def test_rule_and_remote_agree_on_fixture_counts(tmp_path, pipeline_run):
    config = load_config()
    result = run_pipeline(CORPUS, tmp_path / "remote", config, backend=replay_backend())
    assert result.claims_final == pipeline_run.claims_final
    assert result.validations == pipeline_run.validations
    assert result.flagged == pipeline_run.flagged


def test_missing_transcript_is_transport_error(tmp_path):
    backend = RemoteBackend(RemoteConfig(transcript_dir=str(tmp_path), mode="replay"))
    with pytest.raises(TransportError):
        backend.classify_stance("text never recorded before")


def test_malformed_output_retries_once_then_rejects(tmp_path, monkeypatch):
    backend = RemoteBackend(RemoteConfig(transcript_dir=str(tmp_path), mode="record"))
    responses = iter(["not json at all", "still } not { json"])
    calls = []

    def fake_post(payload):
        calls.append(payload["messages"][-1]["content"])
        return {"choices": [{"message": {"content": next(responses)}}]}

    monkeypatch.setattr(backend, "_post", fake_post)
    with pytest.raises(SchemaError) as exc:
        backend.classify_stance("some evidence text")
    assert "malformed-llm-output" in str(exc.value)
    assert len(calls) == 2
    assert "not valid JSON" in calls[1]


def test_malformed_then_valid_recovers(tmp_path, monkeypatch):
    backend = RemoteBackend(RemoteConfig(transcript_dir=str(tmp_path), mode="record"))
    responses = iter(["oops", json.dumps({"stance": "support", "confidence": 0.7})])

    def fake_post(payload):
        return {"choices": [{"message": {"content": next(responses)}}]}

    monkeypatch.setattr(backend, "_post", fake_post)
    call = backend.classify_stance("some other text")
    assert call.stance.value == "support"
    assert call.confidence == 0.7


def test_record_mode_writes_transcripts(tmp_path, monkeypatch):
    backend = RemoteBackend(RemoteConfig(transcript_dir=str(tmp_path), mode="record"))

    def fake_post(payload):
        return {"choices": [{"message": {"content": json.dumps({"stance": "clarify", "confidence": 0.8})}}]}

    monkeypatch.setattr(backend, "_post", fake_post)
    backend.classify_stance("worth noting this only applies sometimes")
    files = list(tmp_path.glob("*.json"))
    assert len(files) == 1
    # replay now works with no transport at all
    replay = RemoteBackend(RemoteConfig(transcript_dir=str(tmp_path), mode="replay"))
    call = replay.classify_stance("worth noting this only applies sometimes")
    assert call.stance.value == "clarify"


def test_request_key_stable():
    payload = {"model": "m", "temperature": 0, "messages": [{"role": "user", "content": "x"}]}
    assert TranscriptStore.request_key(payload) == TranscriptStore.request_key(
        json.loads(json.dumps(payload))
    )


def test_env_configuration(monkeypatch):
    monkeypatch.setenv("FCN_REMOTE_API_BASE", "https://llm.internal/v1")
    monkeypatch.setenv("FCN_REMOTE_MODEL", "some-model")
    monkeypatch.setenv("FCN_REMOTE_TIMEOUT", "7.5")
    monkeypatch.setenv("FCN_TRANSCRIPT_DIR", str(TRANSCRIPTS))
    config = RemoteConfig.from_env()
    assert config.api_base == "https://llm.internal/v1"
    assert config.model == "some-model"
    assert config.timeout == 7.5
    assert config.transcript_dir == str(TRANSCRIPTS)


def test_token_budget_sliding_window():
    from fcn.backends import TokenBudget

    now = [0.0]
    naps = []

    def clock():
        return now[0]

    def sleep(seconds):
        naps.append(seconds)
        now[0] += seconds

    budget = TokenBudget(100, clock=clock, sleep=sleep)
    budget.acquire(60)
    budget.acquire(40)  # exactly at the cap, no wait
    assert naps == []
    budget.acquire(10)  # over the cap: must wait for the window to roll
    assert naps, "expected a sleep once the budget was exhausted"
    assert now[0] >= 60.0


def test_token_budget_estimate_positive():
    from fcn.backends import TokenBudget

    assert TokenBudget.estimate({"messages": []}) >= 1


def test_remote_backend_wires_budget_and_gate(tmp_path):
    backend = RemoteBackend(
        RemoteConfig(
            transcript_dir=str(tmp_path), mode="record", max_in_flight=2, tokens_per_minute=5000
        )
    )
    assert backend.budget is not None
    assert backend.budget.tokens_per_minute == 5000


def test_replay_bypasses_budget(monkeypatch):
    # replaying recorded fixtures must not consume any budget
    backend = RemoteBackend(
        RemoteConfig(transcript_dir=str(TRANSCRIPTS), mode="replay", tokens_per_minute=1)
    )
    call = backend.classify_stance("I agree completely, it worked for my whole family last winter.")
    assert call.stance.value == "support"
