"""Experiment descriptions: a flat, sectioned key/value config format.

Sections mirror the pipeline stages: [source], [trigger], [output],
[losses], [measurement], [outputs] and the optional [scan].  Unknown
sections or keys are hard errors so that reproduction fixtures cannot
silently drift.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

from .covariance import LossParams
from .errors import ConfigError
from .wigner import GridSpec

_SECTION_KEYS = {
    "source": {"kind", "gamma1", "gamma2", "epsilon", "r", "covariance"},
    "trigger": {
        "tap_amplitude",
        "filter_width",
        "window_center",
        "window_width",
        "detector_efficiency",
    },
    "output": {"envelope", "alpha", "center", "table"},
    "losses": {"eta1", "xi1", "eta2", "xi2"},
    "measurement": {"kind", "n"},
    "outputs": {"grid", "metrics", "coherence", "coherence_halfwidth", "coherence_points"},
    "scan": {"alpha_min", "alpha_max", "samples", "objective"},
}

_ALL_METRICS = (
    "probability",
    "wigner_origin",
    "fidelity_fock0",
    "fidelity_fock1",
    "fidelity_fock2",
    "purity",
)


@dataclass(frozen=True)
class SourceConfig:
    kind: str
    gamma1: float = 1.0
    gamma2: float = 0.0
    epsilon: float = 0.0
    r: float = 0.0
    covariance: str = ""


@dataclass(frozen=True)
class TriggerConfig:
    tap_amplitude: float
    filter_width: float | None
    window_center: float
    window_width: float
    detector_efficiency: float


@dataclass(frozen=True)
class OutputModeConfig:
    envelope: str
    alpha: float | None
    center: float
    table: str = ""


@dataclass(frozen=True)
class MeasurementConfig:
    kind: str
    n: int = 0


@dataclass(frozen=True)
class OutputsConfig:
    grid: GridSpec = field(default_factory=GridSpec)
    metrics: tuple[str, ...] = _ALL_METRICS
    coherence: bool = False
    coherence_halfwidth: float = 10.0
    coherence_points: int = 201


@dataclass(frozen=True)
class ScanConfig:
    alpha_min: float
    alpha_max: float
    samples: int = 50
    objective: str = "origin_value"


@dataclass(frozen=True)
class ExperimentConfig:
    source: SourceConfig
    measurement: MeasurementConfig
    trigger: TriggerConfig | None = None
    output: OutputModeConfig | None = None
    losses: LossParams = field(default_factory=LossParams)
    outputs: OutputsConfig = field(default_factory=OutputsConfig)
    scan: ScanConfig | None = None

    def echo_lines(self) -> list[str]:
        """Provenance echo of every parsed value, deterministic order."""
        lines = []

        def emit(section, name, value):
            lines.append(f"config.{section}.{name} = {value}")

        s = self.source
        emit("source", "kind", s.kind)
        if s.kind == "opo":
            emit("source", "gamma1", f"{s.gamma1:.9g}")
            emit("source", "gamma2", f"{s.gamma2:.9g}")
            emit("source", "epsilon", f"{s.epsilon:.9g}")
        elif s.kind == "tmsv":
            emit("source", "r", f"{s.r:.9g}")
        else:
            emit("source", "covariance", s.covariance)
        if self.trigger is not None:
            t = self.trigger
            emit("trigger", "tap_amplitude", f"{t.tap_amplitude:.9g}")
            emit(
                "trigger",
                "filter_width",
                "none" if t.filter_width is None else f"{t.filter_width:.9g}",
            )
            emit("trigger", "window_center", f"{t.window_center:.9g}")
            emit("trigger", "window_width", f"{t.window_width:.9g}")
            emit("trigger", "detector_efficiency", f"{t.detector_efficiency:.9g}")
        if self.output is not None:
            o = self.output
            emit("output", "envelope", o.envelope)
            if o.envelope == "exponential":
                emit("output", "alpha", f"{o.alpha:.9g}")
            else:
                emit("output", "table", o.table)
            emit("output", "center", f"{o.center:.9g}")
        losses = self.losses
        emit("losses", "eta1", f"{losses.eta1:.9g}")
        emit("losses", "xi1", f"{losses.xi1:.9g}")
        emit("losses", "eta2", f"{losses.eta2:.9g}")
        emit("losses", "xi2", f"{losses.xi2:.9g}")
        emit("measurement", "kind", self.measurement.kind)
        if self.measurement.kind == "number":
            emit("measurement", "n", str(self.measurement.n))
        return lines


def _want_float(section, key, raw):
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a number") from None


def _want_int(section, key, raw):
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not an integer") from None


def _want_bool(section, key, raw):
    low = raw.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"[{section}] {key} = {raw!r} is not a boolean")


def parse_config(path) -> ExperimentConfig:
    """Parse and validate an experiment description file."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cp.read_file(fh, source=str(path))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc

    for section in cp.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown section [{section}] in {path}")
        for key in cp[section]:
            if key not in _SECTION_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}] of {path}")

    if "source" not in cp:
        raise ConfigError(f"missing [source] section in {path}")
    src = cp["source"]
    kind = src.get("kind", "").strip()
    if kind not in ("opo", "tmsv", "direct"):
        raise ConfigError(f"[source] kind must be opo, tmsv or direct, got {kind!r}")
    if kind == "opo":
        if "epsilon" not in src:
            raise ConfigError("[source] kind = opo requires epsilon")
        source = SourceConfig(
            kind="opo",
            gamma1=_want_float("source", "gamma1", src.get("gamma1", "1.0")),
            gamma2=_want_float("source", "gamma2", src.get("gamma2", "0.0")),
            epsilon=_want_float("source", "epsilon", src["epsilon"]),
        )
    elif kind == "tmsv":
        if "r" not in src:
            raise ConfigError("[source] kind = tmsv requires r")
        source = SourceConfig(kind="tmsv", r=_want_float("source", "r", src["r"]))
    else:
        if "covariance" not in src:
            raise ConfigError("[source] kind = direct requires covariance (a file path)")
        source = SourceConfig(kind="direct", covariance=src["covariance"].strip())

    trigger = None
    output = None
    if kind == "opo":
        if "trigger" not in cp:
            raise ConfigError("[trigger] section required for an opo source")
        if "output" not in cp:
            raise ConfigError("[output] section required for an opo source")
        trg = cp["trigger"]
        for req in ("tap_amplitude", "filter_width", "window_width"):
            if req not in trg:
                raise ConfigError(f"[trigger] missing required key {req}")
        fw_raw = trg["filter_width"].strip().lower()
        filter_width = None if fw_raw == "none" else _want_float("trigger", "filter_width", fw_raw)
        trigger = TriggerConfig(
            tap_amplitude=_want_float("trigger", "tap_amplitude", trg["tap_amplitude"]),
            filter_width=filter_width,
            window_center=_want_float("trigger", "window_center", trg.get("window_center", "0.0")),
            window_width=_want_float("trigger", "window_width", trg["window_width"]),
            detector_efficiency=_want_float(
                "trigger", "detector_efficiency", trg.get("detector_efficiency", "1.0")
            ),
        )
        out = cp["output"]
        envelope = out.get("envelope", "exponential").strip()
        if envelope == "exponential":
            if "alpha" not in out:
                raise ConfigError("[output] exponential envelope requires alpha")
            output = OutputModeConfig(
                envelope="exponential",
                alpha=_want_float("output", "alpha", out["alpha"]),
                center=_want_float("output", "center", out.get("center", "0.0")),
            )
        elif envelope == "tabulated":
            if "table" not in out:
                raise ConfigError("[output] tabulated envelope requires table (a file path)")
            output = OutputModeConfig(
                envelope="tabulated",
                alpha=None,
                center=_want_float("output", "center", out.get("center", "0.0")),
                table=out["table"].strip(),
            )
        else:
            raise ConfigError(
                f"[output] envelope must be exponential or tabulated, got {envelope!r}"
            )
    elif "trigger" in cp or "output" in cp:
        raise ConfigError(
            "[trigger]/[output] sections apply only to an opo source; "
            f"source kind here is {kind}"
        )

    losses = LossParams()
    if "losses" in cp:
        ls = cp["losses"]
        try:
            losses = LossParams(
                eta1=_want_float("losses", "eta1", ls.get("eta1", "0.0")),
                eta2=_want_float("losses", "eta2", ls.get("eta2", "0.0")),
                xi1=_want_float("losses", "xi1", ls.get("xi1", "0.0")),
                xi2=_want_float("losses", "xi2", ls.get("xi2", "0.0")),
            )
        except ValueError as exc:
            raise ConfigError(f"[losses] {exc}") from exc

    if "measurement" not in cp:
        raise ConfigError(f"missing [measurement] section in {path}")
    ms = cp["measurement"]
    mkind = ms.get("kind", "").strip()
    if mkind not in ("number", "on", "click", "vacuum"):
        raise ConfigError(
            f"[measurement] kind must be number, on, click or vacuum, got {mkind!r}"
        )
    n = 0
    if mkind == "number":
        if "n" not in ms:
            raise ConfigError("[measurement] kind = number requires n")
        n = _want_int("measurement", "n", ms["n"])
        if n not in (0, 1, 2):
            raise ConfigError(f"[measurement] n must be 0, 1 or 2, got {n}")
    elif "n" in ms:
        raise ConfigError(f"[measurement] n applies only to number detection")
    measurement = MeasurementConfig(kind=mkind, n=n)

    outputs = OutputsConfig()
    if "outputs" in cp:
        osec = cp["outputs"]
        grid = GridSpec()
        if "grid" in osec:
            grid = parse_grid(osec["grid"])
        metrics = _ALL_METRICS
        if "metrics" in osec:
            metrics = tuple(tok.strip() for tok in osec["metrics"].split(",") if tok.strip())
            bad = [m for m in metrics if m not in _ALL_METRICS]
            if bad:
                raise ConfigError(f"[outputs] unknown metrics {bad}")
        outputs = OutputsConfig(
            grid=grid,
            metrics=metrics,
            coherence=_want_bool("outputs", "coherence", osec.get("coherence", "false")),
            coherence_halfwidth=_want_float(
                "outputs", "coherence_halfwidth", osec.get("coherence_halfwidth", "10.0")
            ),
            coherence_points=_want_int(
                "outputs", "coherence_points", osec.get("coherence_points", "201")
            ),
        )

    scan = None
    if "scan" in cp:
        sc = cp["scan"]
        for req in ("alpha_min", "alpha_max"):
            if req not in sc:
                raise ConfigError(f"[scan] missing required key {req}")
        objective = sc.get("objective", "origin_value").strip()
        if objective not in ("origin_value", "fock1_fidelity"):
            raise ConfigError(
                f"[scan] objective must be origin_value or fock1_fidelity, got {objective!r}"
            )
        scan = ScanConfig(
            alpha_min=_want_float("scan", "alpha_min", sc["alpha_min"]),
            alpha_max=_want_float("scan", "alpha_max", sc["alpha_max"]),
            samples=_want_int("scan", "samples", sc.get("samples", "50")),
            objective=objective,
        )
        if scan.alpha_min <= 0 or scan.alpha_max < scan.alpha_min:
            raise ConfigError(
                f"[scan] bad range [{scan.alpha_min}, {scan.alpha_max}]"
            )

    return ExperimentConfig(
        source=source,
        measurement=measurement,
        trigger=trigger,
        output=output,
        losses=losses,
        outputs=outputs,
        scan=scan,
    )


def parse_grid(raw: str) -> GridSpec:
    """Parse a grid spec "xmin,xmax,pmin,pmax,nx,np"."""
    toks = [t.strip() for t in raw.split(",")]
    if len(toks) != 6:
        raise ConfigError(f"grid spec needs 6 comma-separated values, got {raw!r}")
    try:
        xmin, xmax, pmin, pmax = (float(t) for t in toks[:4])
        nx, np_ = int(toks[4]), int(toks[5])
    except ValueError:
        raise ConfigError(f"bad grid spec {raw!r}") from None
    try:
        return GridSpec(xmin=xmin, xmax=xmax, pmin=pmin, pmax=pmax, nx=nx, np_=np_)
    except ValueError as exc:
        raise ConfigError(f"bad grid spec {raw!r}: {exc}") from exc
