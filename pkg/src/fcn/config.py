"""YAML configuration with documented defaults and env overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import yaml

from .errors import ConfigError
from .ingest import DEFAULT_KEYWORDS, DumpFormat, IngestConfig
from .model import Platform
from .preprocess import CleanupConfig

ENV_NAMESPACE = "FCN_NAMESPACE"
ENV_HOST = "FCN_HOST"
ENV_PORT = "FCN_PORT"
ENV_BACKEND = "FCN_BACKEND"


@dataclass(frozen=True)
class PipelineConfig:
    ingest: IngestConfig = IngestConfig()
    backend: str = "rule"
    workers: int = 1
    max_attempts: int = 3
    backoff_base: float = 0.5
    namespace: str = "https://fcn.example.org/"
    jaccard_threshold: float = 0.5
    lexicon_path: str | None = None
    synonyms_path: str | None = None
    categories_path: str | None = None
    fkg_links_path: str | None = None
    host: str = "127.0.0.1"
    port: int = 8040
    dump_format: DumpFormat = DumpFormat.JSONL_POSTS


def load_config(path: str | Path | None = None) -> PipelineConfig:
    """Build the pipeline configuration from a YAML file plus env.

    Missing file sections fall back to the documented defaults; the
    FCN_NAMESPACE / FCN_HOST / FCN_PORT / FCN_BACKEND environment
    variables override the file.
    """
    raw: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = yaml.safe_load(fh) or {}
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}")
        except yaml.YAMLError as exc:
            raise ConfigError(f"bad YAML in {path}: {exc}")
        if not isinstance(raw, dict):
            raise ConfigError(f"config root must be a mapping: {path}")

    ingest_raw = raw.get("ingest", {})
    try:
        platform = Platform(ingest_raw.get("platform_hint", "forum"))
    except ValueError:
        raise ConfigError(f"unknown platform_hint: {ingest_raw.get('platform_hint')!r}")
    cleanup = CleanupConfig(strip_quotes=bool(ingest_raw.get("strip_quotes", True)))
    ingest_cfg = IngestConfig(
        keyword_heuristics=tuple(ingest_raw.get("keywords", DEFAULT_KEYWORDS)),
        min_body_chars=int(ingest_raw.get("min_body_chars", 1500)),
        url_patterns=tuple(ingest_raw.get("url_patterns", ())),
        platform_hint=platform,
        cleanup=cleanup,
    )

    extract_raw = raw.get("extract", {})
    curation_raw = raw.get("curation", {})
    graph_raw = raw.get("graph", {})
    analytics_raw = raw.get("analytics", {})
    service_raw = raw.get("service", {})

    try:
        dump_format = DumpFormat(ingest_raw.get("format", "jsonl_posts"))
    except ValueError:
        raise ConfigError(f"unknown ingest format: {ingest_raw.get('format')!r}")

    return PipelineConfig(
        ingest=ingest_cfg,
        backend=os.environ.get(ENV_BACKEND, extract_raw.get("backend", "rule")),
        workers=int(extract_raw.get("workers", 1)),
        max_attempts=int(extract_raw.get("max_attempts", 3)),
        backoff_base=float(extract_raw.get("backoff_base", 0.5)),
        namespace=os.environ.get(ENV_NAMESPACE, graph_raw.get("namespace", "https://fcn.example.org/")),
        jaccard_threshold=float(analytics_raw.get("jaccard_threshold", 0.5)),
        lexicon_path=extract_raw.get("lexicon"),
        synonyms_path=curation_raw.get("synonyms"),
        categories_path=curation_raw.get("categories"),
        fkg_links_path=curation_raw.get("fkg_links"),
        host=os.environ.get(ENV_HOST, service_raw.get("host", "127.0.0.1")),
        port=int(os.environ.get(ENV_PORT, service_raw.get("port", 8040))),
        dump_format=dump_format,
    )
