"""Record remote-backend transcripts for the fixture corpus.

Runs the full pipeline against a synthetic chat-completions transport
that answers with rule-backend output in the remote wire shape, recording
every request/response pair. CI then exercises the remote backend in
replay mode with zero network access.
"""

from __future__ import annotations

import json
import shutil
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "src"))

from fcn.backends import (
    RemoteBackend,
    RemoteConfig,
    RuleBackend,
    bundled_lexicon,
)
from fcn.config import load_config
from fcn.extraction import decompose_compound
from fcn.ids import IdentifierKind, mint_identifier
from fcn.model import CredibilityTier, Platform, SourceDocument
from fcn.pipeline import run_pipeline
from fcn.preprocess import MentionSpan, SentenceSpan

HERE = Path(__file__).resolve().parent
TRANSCRIPTS = HERE / "transcripts"


class SyntheticTransport(RemoteBackend):
    """Remote backend whose HTTP layer is a rule-backend impersonator."""

    def __init__(self, config: RemoteConfig):
        super().__init__(config)
        self.rule = RuleBackend(bundled_lexicon())

    def _post(self, payload: dict) -> dict:
        user_input = payload["messages"][-1]["content"]
        system = payload["messages"][0]["content"]
        if '"stance"' in system:
            call = self.rule.classify_stance(user_input)
            content = json.dumps({"stance": call.stance.value, "confidence": call.confidence})
        elif '"extracted_profile"' in system:
            request = json.loads(user_input)
            extracted, inferred = self.rule.extract_profiles(
                _doc_from(request["body"]), request["subject"]
            )
            content = json.dumps(
                {
                    "extracted_profile": extracted.to_dict(),
                    "inferred_profile": inferred.to_dict(),
                }
            )
        else:
            request = json.loads(user_input)
            doc = _doc_from(request["body"])
            sentences = [
                SentenceSpan(doc_id=doc.id, index=s["index"], start=0, end=len(s["text"]), text=s["text"])
                for s in request["sentences"]
            ]
            text_by_index = {s.index: s.text for s in sentences}
            mentions = []
            for m in request["mentions"]:
                text = text_by_index[m["sentence"]]
                start = text.find(m["surface"])
                mentions.append(
                    MentionSpan(
                        doc_id=doc.id,
                        sentence_index=m["sentence"],
                        surface=m["surface"],
                        lexicon_key=self.rule.lexicon.resolve(m["surface"]) or m["surface"],
                        start=max(start, 0),
                        end=max(start, 0) + len(m["surface"]),
                    )
                )
            items = []
            for candidate in self.rule.extract_claims(doc, sentences, mentions):
                for atom in decompose_compound(candidate):
                    parse = self.rule.parse_grammar(atom)
                    item = {
                        "candidate_text": atom.candidate_text,
                        "subject_surface": parse.subject_surface or atom.subject_surface,
                        "compound": False,
                        "sentence_refs": list(atom.sentence_refs),
                        "claim_effect_type": list(parse.claim_effect_type),
                        "claim_intent": parse.claim_intent.value,
                        "claim_type": sorted(t.value for t in parse.claim_type),
                        "context": parse.context_fields,
                    }
                    for key, value in (
                        ("claim_property", parse.claim_property),
                        ("claim_effect", parse.claim_effect),
                        ("claim_mechanism", parse.claim_mechanism),
                        ("claim_condition", parse.claim_condition),
                    ):
                        if value is not None:
                            item[key] = value
                    items.append(item)
            content = json.dumps(items, ensure_ascii=False)
        return {"choices": [{"message": {"content": content}}]}


def _doc_from(body: str) -> SourceDocument:
    from datetime import datetime, timezone

    return SourceDocument(
        id=mint_identifier(IdentifierKind.DOCUMENT, "synthetic"),
        platform=Platform.FORUM,
        retrieved_at=datetime(2025, 1, 1, tzinfo=timezone.utc),
        body=body,
        raw_body=body,
        credibility_tier=CredibilityTier.INFORMAL,
    )


def main() -> None:
    if TRANSCRIPTS.exists():
        shutil.rmtree(TRANSCRIPTS)
    config = load_config()
    remote_config = RemoteConfig(transcript_dir=str(TRANSCRIPTS), mode="record")
    backend = SyntheticTransport(remote_config)
    with tempfile.TemporaryDirectory() as workdir:
        result = run_pipeline(HERE / "corpus.jsonl", workdir, config, backend=backend)
    count = len(list(TRANSCRIPTS.glob("*.json")))
    print(f"recorded {count} transcripts ({result.claims_final} claims)")


if __name__ == "__main__":
    main()
