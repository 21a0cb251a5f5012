"""Deterministic random record generator for round-trip and batch tests.

Produces schema-valid instances of every ontology type, with awkward
strings (quotes, backslashes, newlines, non-ASCII) mixed in to stress
serialization.
"""

from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

from fcn.ids import IdentifierKind, canonical_key, mint_identifier
from fcn.model import (
    ClaimContext,
    ClaimIntent,
    ClaimSubject,
    ClaimTypeTag,
    CredibilityTier,
    EntityClassification,
    EntityProfile,
    FoodClaim,
    FoodEntity,
    Medium,
    Platform,
    ReviewState,
    SourceDocument,
    Stance,
    ValidatingSource,
    ValidityStatus,
)

WORDS = [
    "turmeric", "cumin", "ginger", "digestion", "immunity", "metabolism",
    "ancient", "daily", "clinical", "grandmother", "fermented", "golden",
    "spice", "ritual", "morning", "winter", "balance", "energy",
]

NASTY = [
    'quote "inside" text',
    "back\\slash",
    "new\nline",
    "tab\tstop",
    "curly {braces}",
    "unicode – ayurvéda ✓",
    "angle <brackets>",
]

EFFECTS = [
    "boosts immunity", "aids digestion", "lowers blood pressure",
    "improves memory", "causes a cold", "cures fatigue",
]


class RecordGen:
    def __init__(self, seed: int = 20250310):
        self.rng = random.Random(seed)

    def word(self) -> str:
        return self.rng.choice(WORDS)

    def text(self, n: int = 4, nasty_odds: float = 0.15) -> str:
        parts = [self.word() for _ in range(n)]
        if self.rng.random() < nasty_odds:
            parts.append(self.rng.choice(NASTY))
        return " ".join(parts)

    def maybe(self, value, p: float = 0.5):
        return value if self.rng.random() < p else None

    def timestamp(self) -> datetime:
        base = datetime(2025, 1, 1, tzinfo=timezone.utc)
        return base + timedelta(
            days=self.rng.randint(0, 120),
            seconds=self.rng.randint(0, 86399),
            microseconds=self.rng.choice([0, self.rng.randint(0, 999999)]),
        )

    def identifier(self, kind: IdentifierKind):
        return mint_identifier(kind, canonical_key(self.text(3, nasty_odds=0)))

    def profile(self) -> EntityProfile:
        return EntityProfile(
            category=self.maybe(self.word()),
            description=self.maybe(self.text(6)),
            group=self.maybe(self.word()),
            alternate_names=tuple(self.word() for _ in range(self.rng.randint(0, 3))),
            scientific_name=self.maybe("Genus species"),
            nutritional_value=self.maybe(self.text(3)),
            regions_of_production=tuple(
                self.word().title() for _ in range(self.rng.randint(0, 3))
            ),
            varieties=tuple(self.word() for _ in range(self.rng.randint(0, 2))),
        )

    def document(self) -> SourceDocument:
        return SourceDocument(
            id=self.identifier(IdentifierKind.DOCUMENT),
            platform=self.rng.choice(list(Platform)),
            retrieved_at=self.timestamp(),
            body=self.text(12),
            raw_body=self.text(14, nasty_odds=0.3),
            credibility_tier=self.rng.choice(list(CredibilityTier)),
            language_tag=self.rng.choice(["en", "en-IN", "hi"]),
            origin_url=self.maybe(f"https://example.org/{self.word()}"),
            author=self.maybe(self.word()),
            published_at=self.maybe(self.timestamp()),
            title=self.maybe(self.text(3)),
            primary_entity_id=self.maybe(self.identifier(IdentifierKind.ENTITY)),
        )

    def entity(self) -> FoodEntity:
        return FoodEntity(
            id=self.identifier(IdentifierKind.ENTITY),
            canonical_name=self.word(),
            classification=self.rng.choice(list(EntityClassification)),
            extracted_profile=self.profile(),
            inferred_profile=self.profile(),
            fkg_link=self.maybe(f"fkg:ingredient/{self.word()}"),
        )

    def context(self) -> ClaimContext:
        geography = tuple(self.word().title() for _ in range(self.rng.randint(0, 2)))
        culture = tuple(self.word() for _ in range(self.rng.randint(0, 2)))
        temporal = self.maybe("historical")
        epistemic = self.maybe("Ayurveda")
        if not (geography or culture or temporal or epistemic):
            epistemic = "clinical nutrition"
        return ClaimContext(
            id=self.identifier(IdentifierKind.CONTEXT),
            geography=geography,
            culture=culture,
            temporal=temporal,
            epistemic_frame=epistemic,
        )

    def claim(self, valid: bool = True) -> FoodClaim:
        effect = self.maybe(self.rng.choice(EFFECTS), 0.8)
        claim_property = self.maybe(f"rich in {self.word()}", 0.4)
        if valid and effect is None and claim_property is None:
            effect = self.rng.choice(EFFECTS)
        effect_types = tuple(self.word() for _ in range(self.rng.randint(1, 3)))
        return FoodClaim(
            id=self.identifier(IdentifierKind.CLAIM),
            claim_text=self.text(6, nasty_odds=0.25),
            claim_subject=ClaimSubject(
                entity_id=self.identifier(IdentifierKind.ENTITY), surface=self.word()
            ),
            claim_property=claim_property,
            claim_effect=effect,
            claim_effect_type=effect_types if effect else (),
            claim_mechanism=self.maybe(f"by {self.text(2, nasty_odds=0)}", 0.3),
            claim_condition=self.maybe("at night", 0.3),
            claim_intent=self.rng.choice(list(ClaimIntent)),
            claim_type=frozenset(
                self.rng.sample(list(ClaimTypeTag), self.rng.randint(1, 3))
            ),
            claim_validity_status=ValidityStatus.UNVERIFIED,
            source_id=self.identifier(IdentifierKind.DOCUMENT),
            merged_source_ids=tuple(
                self.identifier(IdentifierKind.DOCUMENT)
                for _ in range(self.rng.randint(0, 2))
            ),
            context_id=self.maybe(self.identifier(IdentifierKind.CONTEXT), 0.4),
            raw_snippet=self.text(8, nasty_odds=0.25),
            extraction_backend=self.rng.choice(["rule", "remote:test"]),
            extracted_at=self.timestamp(),
            review_state=self.rng.choice(list(ReviewState)),
        )

    def validation(self, claim_id=None) -> ValidatingSource:
        return ValidatingSource(
            id=self.identifier(IdentifierKind.VALIDATION),
            claim_id=claim_id or self.identifier(IdentifierKind.CLAIM),
            stance=self.rng.choice(list(Stance)),
            validity_text=self.text(6, nasty_odds=0.25),
            medium=self.rng.choice(list(Medium)),
            speaker=self.maybe(self.word().title()),
            organization=self.maybe("WHO"),
            source_url=self.maybe(f"https://example.org/{self.word()}"),
            confidence=round(self.rng.random(), 6),
        )

    def any_record(self):
        return self.rng.choice(
            [self.document, self.entity, self.context, self.claim, self.validation]
        )()
