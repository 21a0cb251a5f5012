import json
from datetime import datetime, timezone

import pytest
from hypothesis import given, settings, strategies as st

from fcn.errors import SchemaError, UnknownEnumError
from fcn.ids import IdentifierKind, mint_identifier
from fcn.model import (
    ClaimSubject,
    ClaimTypeTag,
    FoodClaim,
    ReportStatus,
    SourceDocument,
    Stance,
    ValidatingSource,
    ValidityStatus,
    check_claim_invariants,
    check_validating_source_invariants,
    make_report,
    Violation,
)
from record_gen import RecordGen

UTC = timezone.utc


def _claim(**overrides) -> FoodClaim:
    base = dict(
        id=mint_identifier(IdentifierKind.CLAIM, "curcumin|inhibits|d1"),
        claim_text="Curcumin inhibits inflammatory pathways.",
        claim_subject=ClaimSubject(
            entity_id=mint_identifier(IdentifierKind.ENTITY, "curcumin"), surface="Curcumin"
        ),
        claim_effect="inhibits inflammatory pathways",
        claim_effect_type=("inflammation",),
        claim_type=frozenset({ClaimTypeTag.SCIENTIFIC_MEDICAL}),
        source_id=mint_identifier(IdentifierKind.DOCUMENT, "d1"),
        raw_snippet="Curcumin inhibits inflammatory pathways.",
        extraction_backend="rule",
        extracted_at=datetime(2025, 3, 1, tzinfo=UTC),
    )
    base.update(overrides)
    return FoodClaim(**base)


def _validation(claim: FoodClaim, **overrides) -> ValidatingSource:
    base = dict(
        id=mint_identifier(IdentifierKind.VALIDATION, f"{claim.id.value}|v1"),
        claim_id=claim.id,
        stance=Stance.SUPPORT,
        validity_text="a trial found the same effect",
        medium="scientific_study",
    )
    base.update(overrides)
    if isinstance(base["medium"], str):
        from fcn.model import Medium

        base["medium"] = Medium(base["medium"])
    return ValidatingSource(**base)


# ── Round trips ───────────────────────────────────────────────────────


def test_round_trip_all_types_generated():
    gen = RecordGen(seed=11)
    for _ in range(300):
        record = gen.any_record()
        rebuilt = type(record).from_dict(json.loads(json.dumps(record.to_dict())))
        assert rebuilt == record


@settings(max_examples=120, deadline=None)
@given(st.data())
def test_round_trip_hypothesis_texts(data):
    text = data.draw(st.text(min_size=1, max_size=80).filter(lambda t: t.strip()))
    condition = data.draw(st.none() | st.text(min_size=1, max_size=30))
    claim = _claim(claim_text=text, claim_condition=condition)
    assert FoodClaim.from_dict(claim.to_dict()) == claim


# ── Enum closure ──────────────────────────────────────────────────────


def test_unknown_claim_intent_rejected():
    data = _claim().to_dict()
    data["claim_intent"] = "sarcasm"
    with pytest.raises(UnknownEnumError):
        FoodClaim.from_dict(data)


def test_unknown_stance_rejected():
    claim = _claim()
    data = _validation(claim).to_dict()
    data["stance"] = "shrug"
    with pytest.raises(UnknownEnumError):
        ValidatingSource.from_dict(data)


def test_unknown_claim_type_rejected():
    data = _claim().to_dict()
    data["claim_type"] = ["scientific_medical", "astrological"]
    with pytest.raises(UnknownEnumError):
        FoodClaim.from_dict(data)


def test_validity_serializes_as_paper_literals():
    claim = _claim(claim_validity_status=ValidityStatus.TRUE_)
    assert claim.to_dict()["claim_validity_status"] == "true"
    claim = _claim(claim_validity_status=ValidityStatus.FALSE_)
    assert claim.to_dict()["claim_validity_status"] == "false"


def test_missing_required_field_is_schema_error():
    data = _claim().to_dict()
    del data["claim_text"]
    with pytest.raises(SchemaError):
        FoodClaim.from_dict(data)


# ── Claim invariants ──────────────────────────────────────────────────


def test_effect_without_type_violation():
    report = check_claim_invariants(_claim(claim_effect_type=()))
    assert [v.code for v in report.violations] == ["effect-without-type"]
    assert report.status is ReportStatus.REJECTED


def test_true_status_needs_supporting_evidence():
    claim = _claim(claim_validity_status=ValidityStatus.TRUE_)
    report = check_claim_invariants(claim, [])
    assert "status-unsupported" in {v.code for v in report.violations}
    support = _validation(claim)
    assert not check_claim_invariants(claim, [support]).violations
    clarify = _validation(claim, stance=Stance.CLARIFY)
    assert not check_claim_invariants(claim, [clarify]).violations
    challenge = _validation(claim, stance=Stance.CHALLENGE)
    assert "status-unsupported" in {
        v.code for v in check_claim_invariants(claim, [challenge]).violations
    }


def test_false_status_needs_challenge():
    claim = _claim(claim_validity_status=ValidityStatus.FALSE_)
    challenge = _validation(claim, stance=Stance.CHALLENGE)
    assert not check_claim_invariants(claim, [challenge]).violations
    assert check_claim_invariants(claim, []).violations


def test_well_formed_claim_is_valid():
    report = check_claim_invariants(_claim())
    assert report.status is ReportStatus.VALID
    assert report.violations == ()


def test_mechanism_must_start_with_connective():
    good = _claim(claim_mechanism="by binding free radicals")
    assert not check_claim_invariants(good).violations
    bad = _claim(claim_mechanism="binding free radicals")
    assert "mechanism-no-connective" in {v.code for v in check_claim_invariants(bad).violations}


def test_no_property_or_effect_violation():
    claim = _claim(claim_effect=None, claim_effect_type=())
    codes = {v.code for v in check_claim_invariants(claim).violations}
    assert "no-property-or-effect" in codes


def test_effect_without_subject_violation():
    claim = _claim(claim_subject=None)
    codes = {v.code for v in check_claim_invariants(claim).violations}
    assert "effect-without-subject" in codes


def test_checker_is_pure_and_idempotent():
    claim = _claim(claim_effect_type=())
    first = check_claim_invariants(claim)
    second = check_claim_invariants(claim)
    assert first == second


# ── ValidatingSource invariants ───────────────────────────────────────


def test_dangling_claim_ref():
    claim = _claim()
    vs = _validation(claim)
    report = check_validating_source_invariants(vs, set())
    assert "dangling-claim-ref" in {v.code for v in report.violations}
    assert not check_validating_source_invariants(vs, {claim.id}).violations


def test_confidence_out_of_range():
    claim = _claim()
    vs = _validation(claim, confidence=1.3)
    report = check_validating_source_invariants(vs, {claim.id})
    assert "confidence-out-of-range" in {v.code for v in report.violations}


def test_missing_confidence_detected():
    claim = _claim()
    vs = _validation(claim, confidence=None)
    report = check_validating_source_invariants(vs, {claim.id})
    assert "missing-confidence" in {v.code for v in report.violations}


# ── Report status derivation ──────────────────────────────────────────


def test_report_status_follows_invariant():
    target = mint_identifier(IdentifierKind.CLAIM, "t")
    v = Violation("x", "msg", "field_a")
    assert make_report(target, []).status is ReportStatus.VALID
    assert make_report(target, [v], ["field_a"]).status is ReportStatus.REPAIRED
    assert make_report(target, [v]).status is ReportStatus.REJECTED


# ── Immutability / profile separation ─────────────────────────────────


def test_entity_profiles_never_alias():
    gen = RecordGen(seed=3)
    entity = gen.entity()
    assert entity.extracted_profile is not entity.inferred_profile
    rebuilt = type(entity).from_dict(entity.to_dict())
    assert rebuilt.extracted_profile is not rebuilt.inferred_profile


def test_value_objects_are_frozen():
    claim = _claim()
    with pytest.raises(AttributeError):
        claim.claim_text = "changed"


def test_profile_lists_dedupe_casefold():
    from fcn.model import EntityProfile

    profile = EntityProfile(alternate_names=("Haldi", "haldi", "golden spice"))
    assert profile.alternate_names == ("Haldi", "golden spice")


def test_document_round_trip():
    gen = RecordGen(seed=5)
    for _ in range(50):
        doc = gen.document()
        assert SourceDocument.from_dict(doc.to_dict()) == doc
