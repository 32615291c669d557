"""``topochain`` command-line front end.

Every command validates its configuration, computes all results in memory,
and only then writes its files (atomically) and prints a JSON summary.
Exit status: 0 success, 2 validation error, 3 numerical error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import bloch, driven, scattering, spectrum
from .emit import csv_text, json_text, write_outputs
from .errors import (
    EvanescentLeadError,
    GaplessError,
    NoEdgeStateError,
    NotInGapError,
    NumericalError,
    SingularMatrixError,
    UndersampledError,
    ValidationError,
)
from .lattice import LatticeParams

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4
MAX_GRID = 4096
COMMANDS = ("spectrum", "chern", "steady", "wind", "pump", "green-verify")

PARAM_KEYS = ("J", "delta", "Je", "DeltaC", "kappa", "theta", "L", "g0", "DeltaQ", "chirality")
OPTION_KEYS = ("grid", "ep", "out", "unit", "drive_site", "omega", "sweep", "band_map")


@dataclass
class RunConfig:
    params: LatticeParams
    given: frozenset  # parameter keys set explicitly by file or flag
    grid: tuple[int, int] | None = None
    ep: float = 0.0
    out: Path = Path(".")
    unit: str = "je"
    unit_scale: float = 1.0
    drive_site: int = 0
    omega: float = driven.DEFAULT_OMEGA
    sweep: tuple[int, ...] = (20, 40, 60)
    band_map: bool = False

    def grid_or(self, default: tuple[int, int]) -> tuple[int, int]:
        return self.grid if self.grid is not None else default


def parse_grid(value) -> tuple[int, int]:
    """Accept ``N``, ``"N"``, ``"NxM"`` or ``[N, M]``."""
    try:
        if isinstance(value, (list, tuple)):
            n, m = (int(v) for v in value)
        elif isinstance(value, int):
            n = m = value
        else:
            parts = str(value).lower().split("x")
            if len(parts) == 1:
                n = m = int(parts[0])
            elif len(parts) == 2:
                n, m = int(parts[0]), int(parts[1])
            else:
                raise ValueError
    except (TypeError, ValueError):
        raise ValidationError(f"invalid grid specification {value!r}") from None
    if not (1 <= n <= MAX_GRID and 1 <= m <= MAX_GRID):
        raise ValidationError(f"grid {n}x{m} outside 1..{MAX_GRID}")
    return n, m


def _finite(name, value) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a number, got {value!r}") from None
    if not math.isfinite(x):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return x


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topochain",
        description="Photonic Chern insulator in a 1D circuit-QED chain: spectra, "
        "invariants, steady states and reflection windings.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="flat JSON document of parameters")
    parser.add_argument("--delta", type=float)
    parser.add_argument("--J", type=float)
    parser.add_argument("--Je", type=float)
    parser.add_argument("--L", type=int)
    parser.add_argument("--theta", type=float)
    parser.add_argument("--kappa", type=float)
    parser.add_argument("--delta-c", dest="DeltaC", type=float)
    parser.add_argument("--chirality", type=int, choices=(1, -1))
    parser.add_argument("--ep", type=float, help="probe energy inside the gap")
    parser.add_argument("--grid", help="N or NxM")
    parser.add_argument("--out", type=Path, help="output directory (default: .)")
    parser.add_argument("--unit", choices=("je", "raw"))
    parser.add_argument("--drive-site", dest="drive_site", type=int)
    parser.add_argument("--omega", type=float, help="drive amplitude")
    parser.add_argument("--sweep", help="comma-separated chain lengths for green-verify")
    parser.add_argument("--band-map", dest="band_map", action="store_true", default=None,
                        help="chern: also write the (kx, theta) band/curvature map")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    raw: dict = {}
    if args.config is not None:
        with open(args.config) as fh:  # OSError propagates as an I/O failure
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"config is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ValidationError("config must be a flat JSON object")
        unknown = set(raw) - set(PARAM_KEYS) - set(OPTION_KEYS)
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    for key in PARAM_KEYS + OPTION_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value

    unit = raw.get("unit", "je")
    if unit not in ("je", "raw"):
        raise ValidationError(f"unit must be 'je' or 'raw', got {unit!r}")

    values = {}
    for key in ("J", "delta", "Je", "DeltaC", "kappa", "theta"):
        if key in raw:
            values[key] = _finite(key, raw[key])
    if "L" in raw:
        if isinstance(raw["L"], bool) or not isinstance(raw["L"], (int, float)) or raw["L"] != int(raw["L"]):
            raise ValidationError(f"L must be an integer, got {raw['L']!r}")
        values["L"] = int(raw["L"])
    if "chirality" in raw:
        values["chirality"] = int(raw["chirality"])
    g0 = _finite("g0", raw["g0"]) if raw.get("g0") is not None else None
    dq = _finite("DeltaQ", raw["DeltaQ"]) if raw.get("DeltaQ") is not None else None
    if (g0 is None) != (dq is None):
        raise ValidationError("g0 and DeltaQ must be given together")
    if g0 is not None:
        if dq == 0:
            raise ValidationError("DeltaQ must be nonzero")
        je_from_qubit = g0**2 / dq
        if "Je" in values and abs(values["Je"] - je_from_qubit) > 1e-12 * abs(je_from_qubit):
            raise ValidationError("Je disagrees with g0^2/DeltaQ")
        values["Je"] = je_from_qubit

    scale = 1.0
    if unit == "je":
        # energies are multiples of Je: compute in Je = 1 units and emit the same
        scale = values.get("Je", 1.0)
        if scale <= 0:
            raise ValidationError("--unit je requires Je > 0")
        values["Je"] = 1.0
    elif g0 is not None:
        values["g0"], values["DeltaQ"] = g0, dq

    params = LatticeParams(**values)
    given = frozenset(k for k in PARAM_KEYS if k in raw)
    cfg = RunConfig(params=params, given=given, unit=unit, unit_scale=scale)
    if "grid" in raw:
        cfg.grid = parse_grid(raw["grid"])
    if "ep" in raw:
        cfg.ep = _finite("ep", raw["ep"])
    if "out" in raw:
        cfg.out = Path(raw["out"])
    if "drive_site" in raw:
        cfg.drive_site = int(raw["drive_site"])
        if not 0 <= cfg.drive_site < params.L:
            raise ValidationError(f"drive_site {cfg.drive_site} outside 0..{params.L - 1}")
    if "omega" in raw:
        cfg.omega = _finite("omega", raw["omega"])
    if "sweep" in raw:
        sweep = raw["sweep"]
        try:
            items = sweep.split(",") if isinstance(sweep, str) else list(sweep)
            cfg.sweep = tuple(int(s) for s in items)
        except (TypeError, ValueError):
            raise ValidationError(f"invalid sweep {sweep!r}") from None
        if not cfg.sweep:
            raise ValidationError("sweep must list at least one chain length")
        for L in cfg.sweep:
            params.replace(L=L)  # validates each length
    if "band_map" in raw:
        cfg.band_map = bool(raw["band_map"])
    return cfg


def _common_summary(cfg: RunConfig) -> dict:
    p = cfg.params
    return {
        "params": {
            "J": p.J, "delta": p.delta, "Je": p.Je, "DeltaC": p.DeltaC,
            "kappa": p.kappa, "theta": p.theta, "L": p.L, "chirality": p.chirality,
        },
        "unit": cfg.unit,
        "unit_scale": cfg.unit_scale,
    }


def cmd_spectrum(cfg: RunConfig):
    p = cfg.params
    n_theta = cfg.grid_or((spectrum.DEFAULT_THETA_POINTS, 1))[0]
    if n_theta < 2:
        raise ValidationError("spectrum needs at least 2 theta points")
    table = spectrum.open_spectrum(p, spectrum.default_theta_grid(n_theta))
    theta = p.theta if "theta" in cfg.given else 0.5 * math.pi
    files = {
        "spectrum.csv": csv_text(("theta", "level_index", "energy", "is_edge"),
                                 spectrum.spectrum_rows(table)),
    }
    try:
        levels, profiles, ipr = spectrum.identify_edge_states(p, theta)
    except NoEdgeStateError:
        levels, profiles, ipr = [], [], []
    for k, prof in enumerate(profiles):
        files[f"edge_profile_{k}.csv"] = csv_text(
            ("site", "probability"), enumerate(float(x) for x in prof.site_probabilities)
        )
    window = spectrum.edge_theta_window(table)
    summary = _common_summary(cfg) | {
        "theta_points": int(n_theta),
        "max_edge_levels": int(table.edge_counts().max()),
        "edge_theta_window": list(window) if window else None,
        "profile_theta": theta,
        "edge_levels_at_theta": levels,
        "ipr": ipr,
        "boundary_weight": [list(prof.boundary_weight()) for prof in profiles],
    }
    files["spectrum.json"] = json_text(summary)
    return summary, files


def cmd_chern(cfg: RunConfig):
    p = cfg.params
    nk, nt = cfg.grid_or((256, 256))
    analytic = bloch.chern_analytic(p)
    solid = bloch.chern_solid_angle(p, nk, nt)
    link = bloch.chern_gauge_link(p, nk, nt)
    summary = _common_summary(cfg) | {
        "analytic": analytic,
        "solid_angle": solid.rounded,
        "solid_angle_value": solid.value,
        "solid_angle_error": solid.quantization_error,
        "gauge_link": link.rounded,
        "gauge_link_value": link.value,
        "grid": [nk, nt],
        "agreement": analytic == solid.rounded == link.rounded,
    }
    files = {"chern.json": json_text(summary)}
    if cfg.band_map:
        files["band_map.csv"] = csv_text(
            ("kx", "theta", "E_minus", "E_plus", "berry_curvature"), bloch.band_map(p, nk, nt)
        )
    return summary, files


def _driven_defaults(cfg: RunConfig):
    p = cfg.params
    kappa = p.kappa if "kappa" in cfg.given else driven.DEFAULT_KAPPA
    detuning = p.DeltaC if "DeltaC" in cfg.given else driven.EDGE_PROBE_DETUNING
    return kappa, detuning


def cmd_steady(cfg: RunConfig):
    p = cfg.params
    kappa, detuning = _driven_defaults(cfg)
    if "theta" in cfg.given:
        theta = p.theta
    else:
        # tune onto the left edge branch at the edge-probe detuning
        theta = driven.edge_resonance_theta(p, kappa, driven.EDGE_PROBE_DETUNING)
    drive = driven.DriveConfig.single_site(p, cfg.drive_site, cfg.omega, kappa, detuning)
    state = driven.steady_state(p, drive, theta)
    summary = _common_summary(cfg) | {
        "theta": theta,
        "DeltaC": detuning,
        "kappa": kappa,
        "drive_site": cfg.drive_site,
        "omega": cfg.omega,
        "total_photons": state.total,
        "max_site": int(state.photon_numbers.argmax()),
    }
    files = {
        "occupation.csv": csv_text(("site", "photon_number"), driven.occupation_rows(state)),
        "steady.json": json_text(summary),
    }
    return summary, files


def cmd_wind(cfg: RunConfig):
    p = cfg.params
    kappa, detuning = _driven_defaults(cfg)
    n_theta = cfg.grid_or((256, 1))[0]
    trace = driven.reflection_trace(p, kappa, detuning, n_theta)
    summary = _common_summary(cfg) | trace.summary() | {"kappa": kappa, "DeltaC": detuning}
    files = {
        "reflection_trace.csv": csv_text(("theta", "re_r", "im_r", "phase_unwrapped"),
                                         trace.rows()),
        "winding.json": json_text(summary),
    }
    return summary, files


def cmd_pump(cfg: RunConfig):
    p = cfg.params
    n_theta = cfg.grid_or((256, 1))[0]
    closed = scattering.pumped_charge_trace(p, cfg.ep, n_theta)
    numeric = scattering.fisher_lee_trace(p, cfg.ep, n_theta)
    chern = bloch.chern_analytic(p)
    summary = _common_summary(cfg) | {
        "Q": closed.winding,
        "Q_fisher_lee": numeric.winding,
        "chern": chern,
        "equal": closed.winding == chern,
        "residual": closed.residual,
        "Ep": cfg.ep,
        "grid": int(len(closed.theta_grid)),
    }
    header = ("theta", "re_r", "im_r", "phase")
    files = {
        "pump_closed.csv": csv_text(header, closed.rows()),
        "pump_fisher_lee.csv": csv_text(header, numeric.rows()),
        "pump.json": json_text(summary),
    }
    return summary, files


def green_verify(p: LatticeParams, Ep: float, sweep, n_theta: int = 64, tol: float = 1e-6):
    """Deviation of the Fisher-Lee reflection from the closed form over an L sweep."""
    import numpy as np

    thetas = np.linspace(0.0, 2.0 * math.pi, n_theta, endpoint=False)
    E = Ep + p.DeltaC
    closed = [scattering.reflection_closed(p, Ep, t) for t in thetas]
    rows = []
    for L in sweep:
        q = p.replace(L=L)
        dev = max(abs(scattering.reflection_fisher_lee(q, E, t) - c) for t, c in zip(thetas, closed))
        rows.append({"L": L, "max_deviation": dev})
    devs = [r["max_deviation"] for r in rows]
    monotone = all(b <= a for a, b in zip(devs, devs[1:]))
    unimodular = max(abs(abs(c) - 1.0) for c in closed)
    return {
        "Ep": Ep,
        "theta_points": n_theta,
        "sweep": rows,
        "monotone": monotone,
        "final_deviation": devs[-1],
        "tolerance": tol,
        "unimodularity_error": unimodular,
        "pass": monotone and devs[-1] < tol,
    }


def cmd_green_verify(cfg: RunConfig):
    n_theta = cfg.grid_or((64, 1))[0]
    report = green_verify(cfg.params, cfg.ep, cfg.sweep, n_theta)
    summary = _common_summary(cfg) | report
    return summary, {"green_verify.json": json_text(summary)}


HANDLERS = {
    "spectrum": cmd_spectrum,
    "chern": cmd_chern,
    "steady": cmd_steady,
    "wind": cmd_wind,
    "pump": cmd_pump,
    "green-verify": cmd_green_verify,
}


def _error_kind(exc: Exception) -> str:
    for cls, name in (
        (GaplessError, "gapless"),
        (EvanescentLeadError, "evanescent"),
        (NotInGapError, "not_in_gap"),
        (SingularMatrixError, "singular"),
        (UndersampledError, "undersampled"),
        (NoEdgeStateError, "no_edge_state"),
    ):
        if isinstance(exc, cls):
            return name
    return "numerical"


def _fail(kind: str, exc: Exception, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc)}, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        summary, files = HANDLERS[args.command](cfg)
        write_outputs(cfg.out, files)
    except ValidationError as exc:
        return _fail("validation", exc, EXIT_VALIDATION)
    except NumericalError as exc:
        return _fail(_error_kind(exc), exc, EXIT_NUMERICAL)
    except OSError as exc:
        return _fail("io", exc, EXIT_IO)
    sys.stdout.write(json_text(summary))
    return EXIT_OK
