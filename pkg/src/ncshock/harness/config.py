"""Run configurations, initial data and the built-in test cases.

Config files are flat YAML mappings.  Every value is a scalar or a list of
reals, and floats are written with ``repr`` precision so a dump followed by a
load gives back an equal :class:`RunConfig`.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
import yaml

from ..model import ModelParams, State
from ..scheme import Boundary, MeshSignPolicy, PiecewiseConstant, SchemeConfig


class SchemeName(enum.Enum):
    REC_NC = "RecNC"
    REC_NCC = "RecNCC"
    GODUNOV = "Godunov"
    GLIMM = "Glimm"

    @classmethod
    def parse(cls, text: str) -> "SchemeName":
        key = text.replace("+", "").replace("-", "").replace("_", "").lower()
        for item in cls:
            if item.value.lower() == key:
                return item
        raise ValueError(f"unknown scheme {text!r}; choose from {[s.value for s in cls]}")


@dataclass(frozen=True)
class TrigData:
    """``v = v_mean + v_amp*sin(2 pi v_freq x)``, ``w = w_mean + w_amp*cos(2 pi w_freq x)``."""

    v_mean: float
    v_amp: float
    v_freq: float
    w_mean: float
    w_amp: float
    w_freq: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        v = self.v_mean + self.v_amp * np.sin(2.0 * np.pi * self.v_freq * x)
        w = self.w_mean + self.w_amp * np.cos(2.0 * np.pi * self.w_freq * x)
        return v, w

    def as_list(self) -> list[float]:
        return [float(getattr(self, f.name)) for f in dataclasses.fields(self)]


InitialData = Union[PiecewiseConstant, TrigData]


@dataclass(frozen=True)
class RunConfig:
    name: str
    model: ModelParams
    initial: InitialData
    scheme: SchemeName = SchemeName.REC_NC
    scheme_config: SchemeConfig = SchemeConfig()
    x_lo: float = -1.0
    x_hi: float = 1.0
    n_cells: int = 200
    t_final: float = 1.0
    snapshot_times: tuple[float, ...] = ()
    boundary: Boundary = Boundary.CONSTANT
    seed: int = 0
    output_dir: str = "out"
    mass_samples: int = 200
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.x_hi > self.x_lo:
            raise ValueError("need x_hi > x_lo")
        if self.n_cells < 4:
            raise ValueError(f"n_cells must be >= 4, got {self.n_cells}")
        if not (math.isfinite(self.t_final) and self.t_final > 0.0):
            raise ValueError(f"t_final must be > 0, got {self.t_final}")
        for t in self.snapshot_times:
            if not 0.0 <= t <= self.t_final:
                raise ValueError(f"snapshot time {t} outside [0, {self.t_final}]")
        if self.scheme is SchemeName.GLIMM and self.scheme_config.cfl > 0.5:
            raise ValueError("Glimm needs cfl <= 1/2")
        # the scheme name decides classical detection
        wanted = self.scheme is SchemeName.REC_NCC
        if self.scheme_config.detect_classical != wanted:
            object.__setattr__(self, "scheme_config",
                               dataclasses.replace(self.scheme_config, detect_classical=wanted))

    @property
    def period(self) -> Optional[float]:
        return self.x_hi - self.x_lo if self.boundary is Boundary.PERIODIC else None

    @property
    def output_times(self) -> tuple[float, ...]:
        """Sorted snapshot times, always ending with ``t_final``."""
        return tuple(sorted(set(self.snapshot_times) | {self.t_final}))

    def with_overrides(self, **kw) -> "RunConfig":
        """Copy with top-level fields or ``cfl``/``mesh_*`` scheme fields replaced."""
        scheme_kw = {k: kw.pop(k) for k in list(kw) if k in _SCHEME_FIELDS}
        if "scheme" in kw and isinstance(kw["scheme"], str):
            kw["scheme"] = SchemeName.parse(kw["scheme"])
        cfg = dataclasses.replace(self, **kw)
        if scheme_kw:
            cfg = dataclasses.replace(cfg, scheme_config=dataclasses.replace(cfg.scheme_config, **scheme_kw))
        return cfg

    # -- flat mapping -----------------------------------------------------

    def to_dict(self) -> dict:
        sc = self.scheme_config
        d = {
            "name": self.name,
            "m": float(self.model.m),
            "beta": float(self.model.beta),
            "scheme": self.scheme.value,
            "cfl": float(sc.cfl),
            "mesh_speed_margin": float(sc.mesh_speed_margin),
            "mesh_sign_policy": sc.mesh_sign_policy.value,
            "detect_nonclassical": bool(sc.detect_nonclassical),
            "x_lo": float(self.x_lo),
            "x_hi": float(self.x_hi),
            "n_cells": int(self.n_cells),
            "t_final": float(self.t_final),
            "snapshot_times": [float(t) for t in self.snapshot_times],
            "boundary": self.boundary.value,
            "seed": int(self.seed),
            "output_dir": self.output_dir,
            "mass_samples": int(self.mass_samples),
        }
        if isinstance(self.initial, PiecewiseConstant):
            d["initial_kind"] = "piecewise"
            d["breaks"] = [float(b) for b in self.initial.breaks]
            d["values"] = [[float(a), float(b)] for a, b in self.initial.values]
        else:
            d["initial_kind"] = "trig"
            d["trig"] = self.initial.as_list()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        known = {"name", "m", "beta", "scheme", "cfl", "mesh_speed_margin", "mesh_sign_policy",
                 "detect_nonclassical", "x_lo", "x_hi", "n_cells", "t_final", "snapshot_times",
                 "boundary", "seed", "output_dir", "mass_samples", "initial_kind", "breaks",
                 "values", "trig"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kind = d.get("initial_kind")
        if kind == "piecewise":
            initial = PiecewiseConstant(tuple(float(b) for b in d["breaks"]),
                                        tuple((float(a), float(b)) for a, b in d["values"]))
        elif kind == "trig":
            initial = TrigData(*(float(x) for x in d["trig"]))
        else:
            raise ValueError(f"initial_kind must be 'piecewise' or 'trig', got {kind!r}")
        defaults = SchemeConfig()
        sc = SchemeConfig(
            cfl=float(d.get("cfl", defaults.cfl)),
            mesh_speed_margin=float(d.get("mesh_speed_margin", defaults.mesh_speed_margin)),
            mesh_sign_policy=MeshSignPolicy(d.get("mesh_sign_policy", defaults.mesh_sign_policy.value)),
            detect_nonclassical=bool(d.get("detect_nonclassical", True)),
        )
        return cls(
            name=str(d.get("name", "custom")),
            model=ModelParams(float(d["m"]), float(d["beta"])),
            initial=initial,
            scheme=SchemeName.parse(str(d.get("scheme", "RecNC"))),
            scheme_config=sc,
            x_lo=float(d["x_lo"]),
            x_hi=float(d["x_hi"]),
            n_cells=int(d["n_cells"]),
            t_final=float(d["t_final"]),
            snapshot_times=tuple(float(t) for t in d.get("snapshot_times", ())),
            boundary=Boundary(d.get("boundary", Boundary.CONSTANT.value)),
            seed=int(d.get("seed", 0)),
            output_dir=str(d.get("output_dir", "out")),
            mass_samples=int(d.get("mass_samples", 200)),
        )

    def dumps(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        data = yaml.safe_load(text)
        if not isinstance(data, dict):
            raise ValueError("config file must hold a mapping")
        return cls.from_dict(data)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.loads(Path(path).read_text())


_SCHEME_FIELDS = {"cfl", "mesh_speed_margin", "mesh_sign_policy", "detect_nonclassical"}


# ---------------------------------------------------------------------------
# built-in tests

TEST_IDS = ("1", "2", "3a", "3b", "3c", "4", "5")

TEST3_EPS = {"3a": 0.0, "3b": 0.05, "3c": 0.1}

#: Test 4 snapshot presets; both 0.1 and 1.0 are kept as final-figure candidates.
TEST4_TIMES = (0.015, 0.06, 0.1, 1.0)


def riemann_initial(left: State, right: State, x0: float = 0.0) -> PiecewiseConstant:
    return PiecewiseConstant((x0,), (tuple(map(float, left)), tuple(map(float, right))))


def test5_initial() -> PiecewiseConstant:
    return PiecewiseConstant((0.3, 0.3 + 2.0 / 3.0), ((0.3, 0.4), (0.15, -0.2), (0.1, 0.4)))


def builtin_test(test_id: str, scheme: str = "RecNC") -> RunConfig:
    """Parameters of the built-in tests ``1, 2, 3a, 3b, 3c, 4, 5``."""
    tid = str(test_id)
    name = SchemeName.parse(scheme)
    if tid == "1":
        return RunConfig("test1", ModelParams(1.0, 2.0 / 3.0),
                         riemann_initial(State(-10.0, -6.0), State(110.0, 9.0)), name,
                         x_lo=-0.5, x_hi=0.5, n_cells=200, t_final=0.038)
    if tid == "2":
        return RunConfig("test2", ModelParams(1.0, 2.0 / 3.0),
                         riemann_initial(State(6.0, 1.0), State(-10.0, 2.0)), name,
                         x_lo=-1.0, x_hi=1.0, n_cells=200, t_final=0.15)
    if tid in TEST3_EPS:
        eps = TEST3_EPS[tid]
        return RunConfig(f"test{tid}", ModelParams(2.0, 2.0 / 3.0),
                         riemann_initial(State(1.0, 1.0 + eps), State(-11.0, -3.0)), name,
                         x_lo=-1.5, x_hi=2.5, n_cells=2400, t_final=0.4)
    if tid == "4":
        return RunConfig("test4", ModelParams(1.0, 0.95), TrigData(0.0, 3.0, 1.0, 1.0, 3.0, 4.0), name,
                         x_lo=0.0, x_hi=1.0, n_cells=1000, t_final=1.0, snapshot_times=TEST4_TIMES,
                         boundary=Boundary.PERIODIC)
    if tid == "5":
        return RunConfig("test5", ModelParams(0.05, 1.0), test5_initial(), name,
                         x_lo=0.0, x_hi=1.0, n_cells=2000, t_final=40.0, snapshot_times=(20.0, 40.0),
                         boundary=Boundary.PERIODIC)
    raise ValueError(f"unknown test id {test_id!r}; choose from {TEST_IDS}")
