"""JSON scenario configuration.

A configuration file is a single JSON object::

    {
      "n_T": 4,
      "snr_db": 10,                       # number or list of numbers
      "mode": "statistical",              # or "full_csi"
      "sigma_R": {"jakes": {"phi": 0.5, "d_over_lambda": 0.5, "scale": 1.0}},
      "sigma_E": {"jakes": {"phi": 0.3, "scale": 0.3}},
      "h_R": [[0.43, 0.04], ...],         # full_csi only; or {"sample": {"seed": 7}}
      "solver": {"beta": 1.0, "tol": 1e-6, "max_iters": 300, "n_starts": 1, "seed": 0},
      "mc": {"n_samples": 100000, "seed": 1}
    }

Covariances may instead be given explicitly as a list of rows. Complex
numbers are written as ``[re, im]`` pairs, real numbers as plain numbers.
Unknown fields are rejected. Errors carry the offending field and, where it
can be located, its line in the file.
"""

import copy
import json
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, MisoWiretapError
from .hermitian import (HermitianMatrix, Mode, Scenario, as_generator, jakes_covariance,
                        matrix_sqrt, sample_standard_complex_gaussian, snr_db_to_rho)

TOP_FIELDS = {"n_T", "snr_db", "mode", "sigma_R", "sigma_E", "h_R", "solver", "mc"}
REQUIRED = ("n_T", "snr_db", "mode", "sigma_E")
JAKES_FIELDS = {"phi", "d_over_lambda", "scale"}
SOLVER_DEFAULTS = {"beta": 1.0, "tol": 1e-6, "max_iters": 300, "n_starts": 1, "seed": 0}
MC_DEFAULTS = {"n_samples": 100000, "seed": 1}


def _line_of(text, key):
    if text is None:
        return None
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


class _Ctx:
    def __init__(self, text):
        self.text = text

    def fail(self, msg, field):
        key = field.rsplit(".", 1)[-1] if field else None
        raise ConfigError(msg, field=field, line=_line_of(self.text, key) if key else None)


def _number(ctx, v, field, positive=False, nonneg=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        ctx.fail(f"expected a finite number, got {v!r}", field)
    if positive and v <= 0:
        ctx.fail(f"must be positive, got {v!r}", field)
    if nonneg and v < 0:
        ctx.fail(f"must be non-negative, got {v!r}", field)
    return float(v)


def _integer(ctx, v, field, minimum):
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        ctx.fail(f"expected an integer >= {minimum}, got {v!r}", field)
    return v


def _complex(ctx, v, field):
    if isinstance(v, list):
        if len(v) != 2:
            ctx.fail("complex entries are [re, im] pairs", field)
        return complex(_number(ctx, v[0], field), _number(ctx, v[1], field))
    return complex(_number(ctx, v, field))


def _check_keys(ctx, obj, allowed, field):
    if not isinstance(obj, dict):
        ctx.fail("expected an object", field)
    for k in obj:
        if k not in allowed:
            ctx.fail(f"unknown field (allowed: {', '.join(sorted(allowed))})", f"{field}.{k}" if field else k)


def _covariance_spec(ctx, v, field, n):
    if isinstance(v, dict):
        _check_keys(ctx, v, {"jakes"}, field)
        if "jakes" not in v:
            ctx.fail("expected {'jakes': {...}} or an explicit matrix", field)
        j = v["jakes"]
        _check_keys(ctx, j, JAKES_FIELDS, f"{field}.jakes")
        if "phi" not in j:
            ctx.fail("missing required field", f"{field}.jakes.phi")
        return {"jakes": {
            "phi": _number(ctx, j["phi"], f"{field}.jakes.phi", nonneg=True),
            "d_over_lambda": _number(ctx, j.get("d_over_lambda", 0.5), f"{field}.jakes.d_over_lambda",
                                     positive=True),
            "scale": _number(ctx, j.get("scale", 1.0), f"{field}.jakes.scale", positive=True),
        }}
    if not isinstance(v, list) or len(v) != n or any(not isinstance(r, list) or len(r) != n for r in v):
        ctx.fail(f"expected an {n}x{n} matrix (list of rows) or a jakes object", field)
    rows = [[_complex(ctx, x, field) for x in r] for r in v]
    return {"matrix": [[[z.real, z.imag] for z in r] for r in rows]}


def _h_spec(ctx, v, n):
    if isinstance(v, dict):
        _check_keys(ctx, v, {"sample"}, "h_R")
        if "sample" not in v:
            ctx.fail("expected {'sample': {'seed': N}} or a vector", "h_R")
        _check_keys(ctx, v["sample"], {"seed"}, "h_R.sample")
        seed = _integer(ctx, v["sample"].get("seed", 0), "h_R.sample.seed", 0)
        return {"sample": {"seed": seed}}
    if not isinstance(v, list) or len(v) != n:
        ctx.fail(f"expected a vector of {n} entries", "h_R")
    return {"vector": [[z.real, z.imag] for z in (_complex(ctx, x, "h_R") for x in v)]}


def _section(ctx, raw, name, defaults, ints):
    if raw is None:
        return dict(defaults)
    _check_keys(ctx, raw, set(defaults), name)
    out = dict(defaults)
    for k, v in raw.items():
        f = f"{name}.{k}"
        if k in ints:
            out[k] = _integer(ctx, v, f, ints[k])
        else:
            out[k] = _number(ctx, v, f, positive=(k != "tol"), nonneg=True)
    return out


@dataclass
class ScenarioConfig:
    """Validated configuration; ``data`` is the normalised JSON-ready form."""

    data: dict

    @classmethod
    def from_dict(cls, raw, text=None):
        ctx = _Ctx(text)
        _check_keys(ctx, raw, TOP_FIELDS, "")
        for k in REQUIRED:
            if k not in raw:
                ctx.fail("missing required field", k)
        n = _integer(ctx, raw["n_T"], "n_T", 1)
        snr = raw["snr_db"]
        if isinstance(snr, list):
            if not snr:
                ctx.fail("empty SNR list", "snr_db")
            snr = [_number(ctx, x, "snr_db") for x in snr]
        else:
            snr = _number(ctx, snr, "snr_db")
        try:
            mode = Mode(raw["mode"]).value
        except ValueError:
            ctx.fail(f"expected 'statistical' or 'full_csi', got {raw['mode']!r}", "mode")
        data = {"n_T": n, "snr_db": snr, "mode": mode,
                "sigma_E": _covariance_spec(ctx, raw["sigma_E"], "sigma_E", n)}
        if "sigma_R" in raw:
            data["sigma_R"] = _covariance_spec(ctx, raw["sigma_R"], "sigma_R", n)
        elif mode == Mode.STATISTICAL.value:
            ctx.fail("missing required field", "sigma_R")
        if mode == Mode.FULL_CSI.value:
            if "h_R" not in raw:
                ctx.fail("missing required field for full_csi mode", "h_R")
            data["h_R"] = _h_spec(ctx, raw["h_R"], n)
        elif "h_R" in raw:
            ctx.fail("only allowed in full_csi mode", "h_R")
        data["solver"] = _section(ctx, raw.get("solver"), "solver", SOLVER_DEFAULTS,
                                  {"max_iters": 0, "n_starts": 1, "seed": 0})
        data["mc"] = _section(ctx, raw.get("mc"), "mc", MC_DEFAULTS, {"n_samples": 1000, "seed": 0})
        cfg = cls(data)
        try:
            cfg.scenario(snr if not isinstance(snr, list) else snr[0])
        except ConfigError:
            raise
        except MisoWiretapError as exc:
            raise ConfigError(str(exc)) from exc
        return cfg

    @classmethod
    def from_json(cls, text):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno) from exc
        return cls.from_dict(raw, text)

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        return cls.from_json(text)

    @property
    def mode(self):
        return Mode(self.data["mode"])

    @property
    def solver(self):
        return self.data["solver"]

    @property
    def mc(self):
        return self.data["mc"]

    def snr_values(self):
        snr = self.data["snr_db"]
        return list(snr) if isinstance(snr, list) else [snr]

    def override_seed(self, seed):
        """Copy with every seed in the configuration replaced by ``seed``."""
        data = copy.deepcopy(self.data)
        data["solver"]["seed"] = seed
        data["mc"]["seed"] = seed
        if "sample" in data.get("h_R", {}):
            data["h_R"]["sample"]["seed"] = seed
        return ScenarioConfig(data)

    def with_param(self, name, value):
        """Copy with ``snr_db``, ``phi_R`` or ``phi_E`` set to ``value``."""
        data = copy.deepcopy(self.data)
        if name == "snr_db":
            data["snr_db"] = float(value)
        elif name in ("phi_R", "phi_E"):
            key = "sigma_R" if name == "phi_R" else "sigma_E"
            if "jakes" not in data.get(key, {}):
                raise ConfigError(f"sweeping {name} needs a jakes {key}", field=key)
            data[key]["jakes"]["phi"] = float(value)
        else:
            raise ConfigError(f"unknown sweep parameter {name!r}", field="param")
        return ScenarioConfig(data)

    def _covariance(self, key):
        spec = self.data.get(key)
        n = self.data["n_T"]
        if spec is None:
            return HermitianMatrix(np.eye(n))
        if "jakes" in spec:
            j = spec["jakes"]
            return jakes_covariance(n, j["phi"], j["d_over_lambda"], j["scale"])
        m = np.array([[complex(*x) for x in r] for r in spec["matrix"]])
        try:
            return HermitianMatrix(m)
        except MisoWiretapError as exc:
            raise ConfigError(str(exc), field=key) from exc

    def _h_r(self, sigma_r):
        spec = self.data["h_R"]
        if "vector" in spec:
            return np.array([complex(*x) for x in spec["vector"]])
        rng = as_generator(spec["sample"]["seed"])
        hw = sample_standard_complex_gaussian(self.data["n_T"], rng)
        return matrix_sqrt(sigma_r).array @ hw

    def scenario(self, snr_db=None):
        """Build the :class:`Scenario` at ``snr_db`` (default: the scalar SNR)."""
        if snr_db is None:
            snr = self.data["snr_db"]
            if isinstance(snr, list):
                raise ConfigError("a scalar snr_db is required here", field="snr_db")
            snr_db = snr
        sr = self._covariance("sigma_R")
        se = self._covariance("sigma_E")
        rho = snr_db_to_rho(snr_db)
        try:
            if self.mode is Mode.FULL_CSI:
                return Scenario.full_csi(self._h_r(sr), se, rho, sigma_r=sr)
            return Scenario.statistical(sr, se, rho)
        except MisoWiretapError as exc:
            raise ConfigError(str(exc)) from exc
