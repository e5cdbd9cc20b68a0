"""Run configuration: one YAML file plus command-line overrides."""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from billsim.align import AlignmentParams
from billsim.artifacts import section_hash
from billsim.corpus import BOILERPLATE_HEADINGS, CorpusFilterConfig
from billsim.sampler import SamplerConfig
from billsim.synth import SynthConfig

DEFAULTS = {
    "seed": 0,
    "corpus_dir": None,
    "output_dir": None,
    "filter": {"boilerplate_headings": sorted(BOILERPLATE_HEADINGS), "min_words_exclusive": 30, "slice_max_words": 400},
    "sampler": {"sim_low": 0.85, "sim_high": 1.0, "sample_size": 5400, "include_intra_bill": False},
    "synth": {
        "n_per_class": 2000,
        "swap_syn_prop_max": 0.10,
        "swap_syn_op_cap": 20,
        "related_band": [0.20, 0.40],
        "partial_band": [0.60, 0.80],
        "chunk_words_min": 5,
        "chunk_words_max": 15,
        "synonym_lexicon": None,
        "exclude_same_bill": True,
    },
    "alignment": {"match": 2.0, "mismatch": -1.0, "gap_open": -2.0, "gap_extend": -0.5},
    "classifier": {"C": 1.0, "norm": "l2", "two_stage": True, "balance": False},
    "aggregate": {"min_subsections": 10, "per_bin_cap": 600, "outlier_max_words": 400},
}

# keys that locate files or tune speed, never content
UNHASHED = {"corpus_dir", "output_dir"}


class ConfigError(ValueError):
    pass


def _merge(base: dict, override: dict, where: str) -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        if key not in base:
            raise ConfigError(f"{where}: unknown config key {key!r}")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"{where}: {key!r} must be a mapping")
            out[key] = _merge(base[key], val, f"{where}.{key}")
        else:
            out[key] = val
    return out


def parse_override(text: str) -> dict:
    """``section.key=value`` -> nested dict; the value is read as YAML."""
    path, sep, raw = text.partition("=")
    if not sep or not path:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    return _nest(path, yaml.safe_load(raw))


@dataclass
class RunConfig:
    data: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS))

    @classmethod
    def load(cls, path: str | Path | None = None, overrides: list[str] = ()) -> "RunConfig":
        data = copy.deepcopy(DEFAULTS)
        if path is not None:
            try:
                loaded = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
            except yaml.YAMLError as exc:
                raise ConfigError(f"{path}: invalid YAML ({exc})") from None
            if not isinstance(loaded, dict):
                raise ConfigError(f"{path}: top level must be a mapping")
            data = _merge(data, loaded, str(path))
        for text in overrides:
            data = _merge(data, parse_override(text), "--set")
        cfg = cls(data)
        cfg.validate()
        return cfg

    def set(self, dotted: str, value) -> None:
        self.data = _merge(self.data, _nest(dotted, value), "flag")
        self.validate()

    def validate(self) -> None:
        try:
            self.filter, self.sampler, self.synth, self.alignment
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid configuration: {exc}") from None
        clf = self.data["classifier"]
        if clf["norm"] not in ("l2", "none"):
            raise ConfigError("classifier.norm must be 'l2' or 'none'")
        try:
            # YAML 1.1 reads "1e-3" as a string, so coerce explicitly
            clf["C"] = float(clf["C"])
        except (TypeError, ValueError):
            raise ConfigError(f"classifier.C must be a number, got {clf['C']!r}") from None
        if not clf["C"] > 0:
            raise ConfigError("classifier.C must be > 0")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    @property
    def seed(self) -> int:
        return self.data["seed"]

    @property
    def filter(self) -> CorpusFilterConfig:
        f = self.data["filter"]
        return CorpusFilterConfig(frozenset(f["boilerplate_headings"]), int(f["min_words_exclusive"]), int(f["slice_max_words"]))

    @property
    def sampler(self) -> SamplerConfig:
        s = self.data["sampler"]
        return SamplerConfig(float(s["sim_low"]), float(s["sim_high"]), int(s["sample_size"]), self.seed, bool(s["include_intra_bill"]))

    @property
    def synth(self) -> SynthConfig:
        s = {k: v for k, v in self.data["synth"].items() if k != "n_per_class"}
        s["related_band"] = tuple(s["related_band"])
        s["partial_band"] = tuple(s["partial_band"])
        return SynthConfig(seed=self.seed, **s)

    @property
    def alignment(self) -> AlignmentParams:
        return AlignmentParams(**{k: float(v) for k, v in self.data["alignment"].items()})

    @property
    def classifier(self) -> dict:
        return dict(self.data["classifier"])

    @property
    def aggregate(self) -> dict:
        return dict(self.data["aggregate"])

    def section_hashes(self, *names: str) -> dict[str, str]:
        out = {}
        for name in names:
            if name in UNHASHED:
                continue
            value = self.data[name]
            if name == "filter":
                value = dict(value, boilerplate_headings=sorted(self.filter.boilerplate_headings))
            out[name] = section_hash(value)
        return out


def _nest(dotted: str, value) -> dict:
    for part in reversed(dotted.split(".")):
        value = {part: value}
    return value
