"""Record service responses for the UI contract tests.

Runs the real pipeline + service on the bundled corpus and freezes the
JSON bodies the UI tests replay. Regenerate after any service change:

    python frontend/scripts/record_service_fixtures.py
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(REPO / "src"))

from fastapi.testclient import TestClient

from fcn.config import load_config
from fcn.pipeline import run_pipeline
from fcn.service import create_app

RECORDED = Path(__file__).resolve().parents[1] / "tests" / "recorded"


def main() -> None:
    RECORDED.mkdir(parents=True, exist_ok=True)
    config = load_config()
    with tempfile.TemporaryDirectory() as workdir:
        run_pipeline(REPO / "tests" / "fixtures" / "corpus.jsonl", workdir, config)
        app = create_app(workdir, config)
        with TestClient(app) as client:
            queue = client.get("/review/queue").json()
            _save("queue.json", queue)

            first = queue["entries"][0]["claim_id"]
            _save("claim_detail.json", client.get(f"/claims/{first}").json())
            _save("stats.json", client.get("/stats").json())

            error = client.post(
                f"/claims/{first}/review",
                json={"action": "edit", "reviewer": "recorder",
                      "edited_fields": {"claim_text": "rewritten"}},
            )
            assert error.status_code == 422
            _save("review_error_immutable.json", error.json())

            edit = client.post(
                f"/claims/{first}/review",
                json={"action": "edit", "reviewer": "recorder",
                      "decided_at": "2025-04-02T09:00:00Z",
                      "edited_fields": {"claim_intent": "myth"}},
            )
            assert edit.status_code == 200
            _save("review_edit_response.json", edit.json())
            _save("claim_detail_after_edit.json", client.get(f"/claims/{first}").json())

            accept_target = queue["entries"][1]["claim_id"]
            accept = client.post(
                f"/claims/{accept_target}/review",
                json={"action": "accept", "reviewer": "recorder",
                      "decided_at": "2025-04-02T09:05:00Z"},
            )
            assert accept.status_code == 200
            _save("review_accept_response.json", accept.json())
            _save("queue_after_decisions.json", client.get("/review/queue").json())
    print(f"recorded fixtures in {RECORDED}")


def _save(name: str, payload) -> None:
    (RECORDED / name).write_text(
        json.dumps(payload, indent=1, ensure_ascii=False, sort_keys=True) + "\n",
        encoding="utf-8",
    )


if __name__ == "__main__":
    main()
