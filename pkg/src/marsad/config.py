"""Runtime configuration.

Config files are INI-style ``key = value`` sections (parsed with
:mod:`configparser`).  Everything has a usable default so the CLI works with
no config at all; ``serve`` additionally requires at least one auth token.

Example::

    [auth]
    alice = s3cret-token

    [server]
    host = 127.0.0.1
    port = 8787
    worker_limit = 1
    cors_origins = http://localhost:5173

    [storage]
    data_dir = ./data

    [analysis]
    sentiment_threshold = 0.2
    propaganda_threshold = 0.5
    default_seed = 0

The ``MARSAD_CONFIG`` environment variable names a config file used when no
explicit path is given.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class Config:
    data_dir: Path = Path("data")
    # auth: principal name -> bearer token
    tokens: dict[str, str] = field(default_factory=dict)
    host: str = "127.0.0.1"
    port: int = 8787
    worker_limit: int = 1
    cors_origins: list[str] = field(default_factory=list)
    sentiment_threshold: float = 0.2
    propaganda_threshold: float = 0.5
    adapter_timeout: float = 30.0
    adapter_max_in_flight: int = 4
    webhook_timeout: float = 5.0
    default_seed: int = 0
    spike_window: int = 7
    spike_z_threshold: float = 2.0

    @classmethod
    def load(cls, path: str | os.PathLike | None = None) -> "Config":
        """Load config from ``path``, ``$MARSAD_CONFIG``, or defaults."""
        cfg = cls()
        if path is None:
            path = os.environ.get("MARSAD_CONFIG")
        if path is None:
            return cfg
        parser = configparser.ConfigParser()
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
        if parser.has_section("auth"):
            cfg.tokens = dict(parser.items("auth"))
        if parser.has_section("server"):
            s = parser["server"]
            cfg.host = s.get("host", cfg.host)
            cfg.port = s.getint("port", cfg.port)
            cfg.worker_limit = s.getint("worker_limit", cfg.worker_limit)
            origins = s.get("cors_origins", "")
            cfg.cors_origins = [o.strip() for o in origins.split(",") if o.strip()]
        if parser.has_section("storage"):
            cfg.data_dir = Path(parser["storage"].get("data_dir", str(cfg.data_dir)))
        if parser.has_section("analysis"):
            a = parser["analysis"]
            cfg.sentiment_threshold = a.getfloat("sentiment_threshold", cfg.sentiment_threshold)
            cfg.propaganda_threshold = a.getfloat("propaganda_threshold", cfg.propaganda_threshold)
            cfg.default_seed = a.getint("default_seed", cfg.default_seed)
            cfg.spike_window = a.getint("spike_window", cfg.spike_window)
            cfg.spike_z_threshold = a.getfloat("spike_z_threshold", cfg.spike_z_threshold)
        if parser.has_section("adapters"):
            ad = parser["adapters"]
            cfg.adapter_timeout = ad.getfloat("timeout", cfg.adapter_timeout)
            cfg.adapter_max_in_flight = ad.getint("max_in_flight", cfg.adapter_max_in_flight)
        return cfg
