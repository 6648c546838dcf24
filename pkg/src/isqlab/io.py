"""Run manifests, result files and the INI config schema.

Numerical outputs (CSV rows, JSON reports) contain no timestamps, so two runs
with the same parameters and seed write identical bytes. Timestamps live only
in the append-only ``manifest.jsonl``.
"""

import ast
import configparser
import csv
import hashlib
import json
import math
import threading
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError

SCHEMA_VERSION = "1.0"
ARTIFACT_VERSION = "0.1.0"

# Every accepted key, with its default. Anything else in a config is an error.
SCHEMA = {
    "run": {"seed": 0},
    "selftest": {
        "orders": (0.0, 0.5, 1.3, 2.5),
        "size": 256,
        "radius": 40.0,
        "unitarity_tol": 1e-10,
        "roundtrip_tol": 1e-9,
        "diagonal_tol": 1e-7,
    },
    "propagate": {
        "n": 3, "a": 1.0, "l": 0,
        "family": "gaussian", "alpha": 0.5, "beta": 0.0,
        "times": (0.1, 1.0, 10.0),
        "s": (0.0, 1.0),
        "radius": 300.0, "size": 1536,
    },
    "scatter": {
        "n": 3, "a": 1.0, "l": 0,
        "kind": "schrodinger", "direction": "forward", "s": 1.0,
        "family": "gaussian", "alpha": 0.5, "beta": 0.0,
        "schedule": (10.0, 20.0, 40.0, 80.0),
        "radius": 1100.0, "size": 3000,
    },
    "critical": {
        "n": 3, "s": 1.0,
        "field": "radial_gaussian", "alpha": 0.1, "offset": 0.0,
        "max_l": 4, "times": (1.0, 10.0),
        "schedule": (10.0, 20.0, 40.0, 80.0),
        "radius": 400.0, "size": 1024,
    },
    "inequalities": {
        "dimensions": (3, 4),
        "couplings": (1.0, 10.0),
        "s_values": (0.5, 1.0),
        "size": 512, "radius": 40.0,
        "spans": (4.0, 8.0, 16.0, 32.0, 64.0, 128.0),
        "kato_times": (),
        "refine": True,
    },
    "criterion": {
        "n": 3, "l": 0,
        "potential": "aubin_talenti", "strength": 0.5,
        "size": 1000, "radius": 100.0,
        "wave_size": 4000, "wave_radius": 200.0,
        "packet": (15.0, 2.0, 2.0),
        "identity_schedule": (2.5, 5.0, 10.0, 20.0),
        "sqrt_schedule": (10.0, 20.0, 40.0, 80.0),
    },
    "report": {"inputs": ()},
}


def _coerce(default, value):
    if isinstance(default, tuple):
        value = tuple(value) if isinstance(value, (list, tuple)) else (value,)
        return value
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"expected a boolean, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}")
        return float(value)
    if isinstance(default, str) and not isinstance(value, str):
        raise ConfigError(f"expected a string, got {value!r}")
    return value


def load_config(path=None, section=None):
    """Parse an INI file against :data:`SCHEMA`.

    Values are Python literals (``size = 1024``, ``times = (1, 10)``,
    ``kind = 'half_wave'``); bare words are read as strings. Unknown
    sections or keys raise :class:`ConfigError` naming all of them.
    """
    cfg = {name: dict(keys) for name, keys in SCHEMA.items()}
    if path is None:
        return cfg if section is None else {"run": cfg["run"], section: cfg[section]}
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    unknown = [f"[{s}]" for s in parser.sections() if s not in SCHEMA]
    for s in parser.sections():
        if s in SCHEMA:
            unknown += [f"{s}.{k}" for k in parser[s] if k not in SCHEMA[s]]
    if unknown:
        raise ConfigError("unknown config entries: " + ", ".join(unknown))
    for s in parser.sections():
        for k, raw in parser[s].items():
            try:
                value = ast.literal_eval(raw)
            except (ValueError, SyntaxError):
                value = raw.strip()
            try:
                cfg[s][k] = _coerce(SCHEMA[s][k], value)
            except ConfigError as exc:
                raise ConfigError(f"{s}.{k}: {exc}") from None
    return cfg if section is None else {"run": cfg["run"], section: cfg[section]}


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        x = x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def canonical_json(obj):
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"))


def file_hash(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    experiment: str
    params: dict
    input_hashes: dict = field(default_factory=dict)
    version: str = ARTIFACT_VERSION
    started: float = None
    finished: float = None
    outputs: list = field(default_factory=list)
    status: str = "running"

    @property
    def manifest_id(self):
        """Hash of experiment, parameters and version; independent of timing."""
        key = canonical_json({"experiment": self.experiment, "params": self.params, "version": self.version})
        return hashlib.sha256(key.encode()).hexdigest()[:16]

    def to_dict(self):
        d = asdict(self)
        d["manifest_id"] = self.manifest_id
        return _plain(d)


class ResultStore:
    """Output directory with a single-writer lock.

    All writes go through the lock, so experiments may run in threads.
    """

    def __init__(self, root, manifest):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.manifest = manifest
        self._lock = threading.Lock()

    @property
    def manifest_id(self):
        return self.manifest.manifest_id

    def _register(self, path):
        name = str(path.relative_to(self.root))
        if name not in self.manifest.outputs:
            self.manifest.outputs.append(name)

    def write_csv(self, name, columns, rows):
        """Write rows (dicts) with a fixed header; a ``manifest_id`` column is prepended."""
        path = self.root / name
        header = ["manifest_id", *columns]
        with self._lock:
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(header)
                for row in rows:
                    w.writerow([self.manifest_id] + [_cell(row.get(c)) for c in columns])
            self._register(path)
        return path

    def write_json(self, name, payload):
        path = self.root / name
        body = {"schema_version": SCHEMA_VERSION, "manifest_id": self.manifest_id, **_plain(payload)}
        with self._lock:
            path.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")
            self._register(path)
        return path

    def append_manifest(self):
        with self._lock:
            with open(self.root / "manifest.jsonl", "a") as fh:
                fh.write(canonical_json(self.manifest.to_dict()) + "\n")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, complex):
        return repr(v)
    return str(v)


def read_manifests(root):
    path = Path(root) / "manifest.jsonl"
    if not path.exists():
        return []
    return [json.loads(line) for line in path.read_text().splitlines() if line.strip()]


def now():
    return time.time()
