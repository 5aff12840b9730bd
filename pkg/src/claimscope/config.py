"""Configuration: YAML file plus CLAIMSCOPE_* environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .gateway import HttpGateway, scripted_gateway_from_jsonl


@dataclass
class GatewayConfig:
    """Where completions come from: an HTTP endpoint or mock:<script.jsonl>."""

    endpoint: str = ""
    model: str = ""
    api_key: str | None = None
    timeout: float = 120.0
    retries: int = 2
    max_inflight: int = 4


@dataclass
class AppConfig:
    gateway: GatewayConfig = field(default_factory=GatewayConfig)
    judge: GatewayConfig = field(default_factory=GatewayConfig)
    corpus_dir: str | None = None
    retrieval_k: int = 5
    prompt_mode: str = "cdp_cr"
    candidate_cap: int = 20
    examples_path: str | None = None
    auth_token: str | None = None
    host: str = "127.0.0.1"
    port: int = 8000
    max_concurrent: int = 4


def _gateway_from_dict(data: dict) -> GatewayConfig:
    config = GatewayConfig()
    for key in ("endpoint", "model", "api_key", "timeout", "retries", "max_inflight"):
        if key in data:
            setattr(config, key, data[key])
    return config


def load_config(path: str | Path | None = None,
                environ: dict[str, str] | None = None) -> AppConfig:
    """Read config from YAML (optional) and apply environment overrides."""
    environ = os.environ if environ is None else environ
    config = AppConfig()
    if path is not None:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        if not isinstance(data, dict):
            raise ValueError(f"config file {path} must contain a mapping")
        config.gateway = _gateway_from_dict(data.get("gateway", {}))
        config.judge = _gateway_from_dict(data.get("judge", {}))
        for key in ("corpus_dir", "retrieval_k", "prompt_mode", "candidate_cap",
                    "examples_path", "auth_token", "host", "port", "max_concurrent"):
            if key in data:
                setattr(config, key, data[key])

    overrides = {
        "CLAIMSCOPE_ENDPOINT": ("gateway", "endpoint"),
        "CLAIMSCOPE_MODEL": ("gateway", "model"),
        "CLAIMSCOPE_API_KEY": ("gateway", "api_key"),
        "CLAIMSCOPE_JUDGE_ENDPOINT": ("judge", "endpoint"),
        "CLAIMSCOPE_JUDGE_MODEL": ("judge", "model"),
        "CLAIMSCOPE_JUDGE_API_KEY": ("judge", "api_key"),
    }
    for name, (section, attr) in overrides.items():
        if name in environ:
            setattr(getattr(config, section), attr, environ[name])
    if "CLAIMSCOPE_CORPUS" in environ:
        config.corpus_dir = environ["CLAIMSCOPE_CORPUS"]
    if "CLAIMSCOPE_AUTH_TOKEN" in environ:
        config.auth_token = environ["CLAIMSCOPE_AUTH_TOKEN"]
    if "CLAIMSCOPE_HOST" in environ:
        config.host = environ["CLAIMSCOPE_HOST"]
    if "CLAIMSCOPE_PORT" in environ:
        config.port = int(environ["CLAIMSCOPE_PORT"])
    return config


def build_gateway(config: GatewayConfig):
    """Instantiate the configured gateway; mock: endpoints load scripted replies."""
    if not config.endpoint:
        raise ValueError("gateway endpoint is not configured")
    if config.endpoint.startswith("mock:"):
        return scripted_gateway_from_jsonl(config.endpoint[len("mock:"):])
    if not config.model:
        raise ValueError("gateway model is not configured")
    return HttpGateway(endpoint=config.endpoint, model=config.model,
                       api_key=config.api_key, timeout=config.timeout,
                       retries=config.retries, max_inflight=config.max_inflight)
