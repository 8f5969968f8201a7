"""
Parsers are interfaces for gathering run settings from configuration files
into a normalized RunConfig.
"""

import logging
import os

import pandas as pd

from em_sequence_toolkit.errors import ConfigError

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = "EMSEQ_CONFIG"


def _parse_bool(value):
    lowered = str(value).strip().lower()
    if lowered in ("1", "true", "yes", "y"):
        return True
    if lowered in ("0", "false", "no", "n"):
        return False
    raise ValueError("not a boolean: {!r}".format(value))


def _parse_int_list(value):
    return [int(v) for v in str(value).split(",") if v.strip()]


def _parse_float_list(value):
    parsed = []
    for v in str(value).split(","):
        v = v.strip()
        if not v:
            continue
        if "/" in v:
            numerator, denominator = v.split("/")
            parsed.append(float(numerator) / float(denominator))
        else:
            parsed.append(float(v))
    return parsed


def _parse_optional_str(value):
    value = str(value).strip()
    return value or None


def _parse_optional_int(value):
    value = str(value).strip()
    return int(value) if value else None


def _format_value(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ",".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


class Thresholds(object):
    """
    Gates applied by the verifiers.
    """

    SETTING_TYPES = {
        "theorem1_final_gate": float,
        "prop31_final_gate": float,
        "trend_window": int,
        "trend_tolerance": float,
        "rn_alpha_slack": int,
        "balance_l1": _parse_float_list,
        "balance_l2": _parse_float_list,
        "growth_min_ratio": float,
        "alpha_band": _parse_float_list,
        "naive_limit": int,
        "max_bits": int,
    }

    def __init__(
        self,
        theorem1_final_gate=0.05,
        prop31_final_gate=0.05,
        trend_window=3,
        trend_tolerance=0.001,
        rn_alpha_slack=3,
        balance_l1=(0.25, 0.75),
        balance_l2=(1.0 / 25.0, 8.0 / 11.0),
        growth_min_ratio=0.1,
        alpha_band=(0.5, 3.0),
        naive_limit=100000,
        max_bits=2 ** 32,
    ):
        """
        Parameters
        ----------
        theorem1_final_gate: float
            Bound on the Theorem 1 residual ratio at the last checkpoint

        prop31_final_gate: float
            Bound on each R_n residual ratio at the last checkpoint

        trend_window: int
            Number of trailing checkpoints over which residuals must not increase

        trend_tolerance: float
            Absolute slack allowed on a trend step

        rn_alpha_slack: int
            c in |R_n| >= n - alpha(n) - c

        balance_l1, balance_l2: list
            [low, high] frequency bands for single bits and bit pairs

        growth_min_ratio: float
            Lower bound on min_k i_k / 2^(k/2)

        alpha_band: list
            [low, high] band for alpha(n) / log2(n)

        naive_limit: int
            Largest n the naive engine runs without --force

        max_bits: int
            Bit-storage limit
        """
        self.theorem1_final_gate = theorem1_final_gate
        self.prop31_final_gate = prop31_final_gate
        self.trend_window = trend_window
        self.trend_tolerance = trend_tolerance
        self.rn_alpha_slack = rn_alpha_slack
        self.balance_l1 = list(balance_l1)
        self.balance_l2 = list(balance_l2)
        self.growth_min_ratio = growth_min_ratio
        self.alpha_band = list(alpha_band)
        self.naive_limit = naive_limit
        self.max_bits = max_bits

    def to_dict(self):
        return {name: getattr(self, name) for name in self.SETTING_TYPES}

    def __eq__(self, other):
        if not isinstance(other, Thresholds):
            return NotImplemented
        return self.to_dict() == other.to_dict()


DEFAULT_CHECKPOINTS = [1000, 3000, 10000, 30000, 100000]


class RunConfig(object):
    """
    Every parameter of a run. A run is reproducible from its RunConfig alone.
    """

    SETTING_TYPES = {
        "command": _parse_optional_str,
        "n": int,
        "engine": str,
        "word_len": int,
        "max_word_len": int,
        "checkpoints": _parse_int_list,
        "rng_seed": int,
        "samples": int,
        "force": _parse_bool,
        "jobs": int,
        "lemma": str,
        "output_format": str,
        "words": lambda value: [w.strip() for w in str(value).split(",") if w.strip()],
        "max_depth": _parse_optional_int,
        "color_balance": _parse_bool,
        "residuals": _parse_bool,
        "out": _parse_optional_str,
        "trace_out": _parse_optional_str,
        "report": _parse_optional_str,
        "summary": _parse_optional_str,
        "dot": _parse_optional_str,
        "stats_out": _parse_optional_str,
        "words_out": _parse_optional_str,
    }

    def __init__(self, **settings):

        self.command = None
        self.n = 1000
        self.engine = "fast"
        self.word_len = 1
        self.max_word_len = 10
        self.checkpoints = list(DEFAULT_CHECKPOINTS)
        self.rng_seed = 1
        self.samples = 10000
        self.force = False
        self.jobs = 1
        self.lemma = "all"
        self.output_format = "text"
        self.words = []
        self.max_depth = None
        self.color_balance = True
        self.residuals = False
        self.out = None
        self.trace_out = None
        self.report = None
        self.summary = None
        self.dot = None
        self.stats_out = None
        self.words_out = None
        self.thresholds = Thresholds()

        self.update(settings)

    def update(self, settings):
        """
        Apply settings by name. Threshold names are routed to the nested Thresholds.

        Parameters
        ----------
        settings: dict
        """
        for name, value in settings.items():
            if name in self.SETTING_TYPES:
                setattr(self, name, value)
            elif name in Thresholds.SETTING_TYPES:
                setattr(self.thresholds, name, value)
            elif name == "thresholds":
                self.thresholds = value
            else:
                raise ConfigError("Unknown setting {!r}".format(name))

    def effective_checkpoints(self):
        """
        Checkpoints not beyond n, sorted, with n itself as the final one.
        """
        points = sorted(set(c for c in self.checkpoints if 1 <= c <= self.n))
        if not points or points[-1] != self.n:
            points.append(self.n)
        return points

    def to_dict(self):

        settings = {name: getattr(self, name) for name in self.SETTING_TYPES}
        settings.update(self.thresholds.to_dict())
        return settings

    def to_tsv(self):
        """
        Render in the two-column tab separated config format.

        Returns
        -------
        str
        """
        rows = ["setting_name\tvalue"]
        for name, value in self.to_dict().items():
            rows.append("{}\t{}".format(name, _format_value(value)))

        return "\n".join(rows) + "\n"

    def __eq__(self, other):
        if not isinstance(other, RunConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self):
        return "RunConfig(command={}, n={}, engine={})".format(self.command, self.n, self.engine)


class RunConfigParser(object):
    def get_settings(self):
        raise NotImplementedError

    def get_run_config(self, base=None):
        raise NotImplementedError


class RunConfigParserTSV(RunConfigParser):
    """
    Parser for two-column tab separated config files with header
    setting_name<TAB>value. List values are comma separated.
    """

    def __init__(self, path_to_tsv=None):

        self.tsv_path = path_to_tsv
        try:
            data = pd.read_csv(path_to_tsv, sep="\t", dtype=str, keep_default_na=False)
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise ConfigError("Cannot read config {}: {}".format(path_to_tsv, e))

        if list(data.columns) != ["setting_name", "value"]:
            raise ConfigError("Config {} must have columns setting_name, value".format(path_to_tsv))

        if data["setting_name"].duplicated().any():
            duplicated = sorted(set(data.loc[data["setting_name"].duplicated(), "setting_name"]))
            raise ConfigError("Config {} repeats settings {}".format(path_to_tsv, duplicated))

        self.settings_df = data.set_index("setting_name")

    def get_settings(self):
        """
        Get typed settings.

        Returns
        -------
        dict
        """
        settings = dict()
        for name, row in self.settings_df.iterrows():
            converter = RunConfig.SETTING_TYPES.get(name, Thresholds.SETTING_TYPES.get(name))
            if converter is None:
                raise ConfigError("Unknown setting {!r} in {}".format(name, self.tsv_path))
            try:
                settings[name] = converter(row["value"])
            except ValueError as e:
                raise ConfigError("Bad value for {!r} in {}: {}".format(name, self.tsv_path, e))

        return settings

    def get_run_config(self, base=None):
        """
        Get a config with file settings applied over base (defaults if None).

        Returns
        -------
        RunConfig
        """
        config = base if base is not None else RunConfig()
        config.update(self.get_settings())
        logger.debug("Loaded %d settings from %s", len(self.settings_df), self.tsv_path)

        return config


def resolve_config_path(path=None):
    """
    The config file to read: the given path, else EMSEQ_CONFIG, else None.
    """
    if path:
        return path

    return os.getenv(CONFIG_ENV_VAR) or None
