"""Run configuration: JSON loading, schema validation and unit conversion.

Config files use the units of the figures (um, nm, MHz, kHz, ...).  Everything
is converted to SI exactly once, in :func:`build_run_config`.  A user file is
overlaid on the shipped ``flagship`` preset; the ``mode`` and ``field``
blocks are replaced whole rather than merged key by key.
"""
import copy
import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema

from .constants import TWO_PI
from .field import OpticalParams, ToroidGeometry, calibrate_field_model
from .mechanics import MAX_MODE_INDEX, MembraneGeometry, build_mode, eigenfrequency

UM, NM = 1e-6, 1e-9
REPLACED_BLOCKS = ("mode", "field")
RANGE_KEYS = frozenset({"lx_um", "ly_um", "x", "y", "g1_kHz"})


class ConfigError(Exception):
    """Invalid or unreadable configuration (CLI exit status 2)."""


_POS = {"type": "number", "exclusiveMinimum": 0}
_NUM = {"type": "number"}
_RANGE = {"type": "array", "prefixItems": [_NUM, _NUM, {"type": "integer", "minimum": 2}], "minItems": 3, "maxItems": 3}


def _block(props, required=()):
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "geometry": _block(
            {"D_um": _POS, "d_um": _POS, "z0_nm": _POS, "l_x_um": _POS, "l_y_um": _POS, "h_nm": _POS},
            ["D_um", "d_um", "z0_nm", "l_x_um", "l_y_um", "h_nm"],
        ),
        "materials": _block(
            {"rho_kg_m3": _POS, "tension_GPa": _POS, "n_sin_real": {"type": "number", "exclusiveMinimum": 1},
             "n_sin_imag": {"type": "number", "minimum": 0}},
            ["rho_kg_m3", "tension_GPa", "n_sin_real", "n_sin_imag"],
        ),
        "optics": _block({"lambda_nm": _POS, "kappa_MHz": _POS, "kappa_ext_MHz": _POS}, ["lambda_nm", "kappa_MHz", "kappa_ext_MHz"]),
        "field": {
            "oneOf": [
                _block({"preset": {"type": "string"}, "ring_width_um": _POS}, ["preset"]),
                _block(
                    {"omega_s_prime_GHz_per_nm": _POS, "omega_s_dprime_MHz_per_nm2": {"type": "number", "exclusiveMaximum": 0},
                     "z_ref_nm": _POS, "ring_width_um": _POS, "rel_field": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}},
                    ["omega_s_prime_GHz_per_nm", "omega_s_dprime_MHz_per_nm2", "z_ref_nm"],
                ),
            ]
        },
        "mode": {
            "type": "object",
            "properties": {
                "j": {"type": "integer", "minimum": 1, "maximum": MAX_MODE_INDEX},
                "k": {"type": "integer", "minimum": 1, "maximum": MAX_MODE_INDEX},
                "Q_m": _POS, "gamma_m_Hz": _POS, "nominal_freq_MHz": _POS,
            },
            "required": ["j", "k"],
            "oneOf": [{"required": ["Q_m"]}, {"required": ["gamma_m_Hz"]}],
            "additionalProperties": False,
        },
        "sweep": _block({
            "modes": _block({"j_max": {"type": "integer", "minimum": 0, "maximum": MAX_MODE_INDEX},
                             "k_max": {"type": "integer", "minimum": 0, "maximum": MAX_MODE_INDEX}}),
            "static": _block({"start_nm": _POS, "stop_nm": _POS, "steps": {"type": "integer", "minimum": 2}}),
            "coupling": _block({"lx_um": _RANGE, "ly_um": _RANGE}),
            "misalign": _block({"mode": {"type": "array", "items": {"type": "integer", "minimum": 1, "maximum": MAX_MODE_INDEX},
                                        "minItems": 2, "maxItems": 2},
                               "pair": {"enum": ["displacement", "tilt"]}, "x": _RANGE, "y": _RANGE}),
            "omit": _block({"n_start": _POS, "n_stop": _POS, "steps": {"type": "integer", "minimum": 2},
                            "inset_n": _POS, "inset_steps": {"type": "integer", "minimum": 2}}),
            "switch": _block({"g1_kHz": _RANGE, "kappa_MHz": {"type": "array", "items": _POS, "minItems": 1}}),
            "entangle": _block({"temperatures_K": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1}}),
        }),
        "apps": _block({
            "omit": _block({"omega_m_MHz": _POS, "g1_kHz": _POS, "kappa_MHz": _POS, "gamma_m_Hz": _POS}),
            "switch": _block({"omega_m_MHz": _POS}),
            "entangle": _block({"omega_m_MHz": _POS, "g1_kHz": _POS, "kappa_MHz": _POS, "Q_m": _POS,
                                "power_uW": {"type": "number", "minimum": 0}, "lambda_nm": _POS,
                                "detuning_over_omega_m": _NUM,
                                "kappa_ext_over_kappa": {"type": "number", "exclusiveMinimum": 0, "maximum": 1}}),
        }),
        "output": _block({"path": {"type": "string"}, "format": {"enum": ["csv", "json"]}}),
    },
}


def _read_json(text, origin):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{origin}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _preset_text(name):
    try:
        return resources.files("nearfield_om.presets").joinpath(f"{name}.json").read_text()
    except FileNotFoundError:
        return None


def preset_names():
    return sorted(
        p.name[:-5] for p in resources.files("nearfield_om.presets").iterdir()
        if p.name.endswith(".json") and p.name != "field_presets.json"
    )


def field_presets():
    return json.loads(_preset_text("field_presets"))


def merge(base, overlay):
    """Deep-merge ``overlay`` onto ``base``; :data:`REPLACED_BLOCKS` are replaced whole."""
    out = copy.deepcopy(base)
    for key, value in overlay.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict) and key not in REPLACED_BLOCKS:
            out[key] = merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def defaults():
    return json.loads(_preset_text("flagship"))


def load_raw(source=None):
    """Merged config dict from a path, a shipped preset name, or ``None`` (flagship)."""
    if source is None:
        return defaults()
    path = Path(source)
    if path.is_file():
        overlay = _read_json(path.read_text(), str(path))
    else:
        text = _preset_text(str(source))
        if text is None:
            raise ConfigError(f"config {source!r} is neither a file nor a shipped preset ({', '.join(preset_names())})")
        overlay = _read_json(text, f"preset {source}")
    if not isinstance(overlay, dict):
        raise ConfigError("config must be a JSON object")
    return merge(defaults(), overlay)


def validate_raw(raw):
    validator = jsonschema.Draft202012Validator(SCHEMA)
    err = jsonschema.exceptions.best_match(validator.iter_errors(raw))
    if err is not None:
        where = ".".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {err.message}")
    sweep = raw.get("sweep", {})
    for name, spec in sweep.items():
        for key in RANGE_KEYS.intersection(spec):
            if spec[key][0] == spec[key][1]:
                raise ConfigError(f"sweep.{name}.{key}: empty range")
    static = sweep.get("static", {})
    if static and static.get("start_nm") == static.get("stop_nm"):
        raise ConfigError("sweep.static: empty range")
    omit = sweep.get("omit", {})
    if omit and omit.get("n_start") == omit.get("n_stop"):
        raise ConfigError("sweep.omit: empty range")
    preset = raw.get("field", {}).get("preset")
    if preset is not None and preset not in field_presets():
        raise ConfigError(f"field.preset: unknown preset {preset!r} (known: {', '.join(sorted(field_presets()))})")
    opt = raw["optics"]
    if opt["kappa_ext_MHz"] > opt["kappa_MHz"]:
        raise ConfigError("optics.kappa_ext_MHz: must not exceed kappa_MHz")


def config_hash(raw):
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class RunConfig:
    raw: dict
    hash: str
    membrane: MembraneGeometry
    toroid: ToroidGeometry
    optics: OpticalParams
    kappa_ext: float
    field: object
    field_preset: str | None
    field_quantitative: bool
    j: int
    k: int
    quality_factor: float
    nominal_omega_m: float | None

    @property
    def sweep(self):
        return self.raw["sweep"]

    @property
    def apps(self):
        return self.raw["apps"]

    def mode(self, j=None, k=None, membrane=None):
        """Mechanical mode ``(j, k)`` (default: the configured one) sharing the configured Q."""
        j = self.j if j is None else j
        k = self.k if k is None else k
        override = self.nominal_omega_m if (j, k, membrane) == (self.j, self.k, None) else None
        return build_mode(membrane or self.membrane, j, k, self.quality_factor, omega_m=override)


def build_run_config(raw):
    """Validate a merged config dict and convert it to SI."""
    validate_raw(raw)
    geo, mat, opt, mode = raw["geometry"], raw["materials"], raw["optics"], raw["mode"]
    try:
        membrane = MembraneGeometry(
            l_x=geo["l_x_um"] * UM, l_y=geo["l_y_um"] * UM, h=geo["h_nm"] * NM,
            rho=mat["rho_kg_m3"], tension=mat["tension_GPa"] * 1e9,
        )
        toroid = ToroidGeometry(D=geo["D_um"] * UM, d=geo["d_um"] * UM, z0=geo["z0_nm"] * NM)
        optics = OpticalParams(
            lambda0=opt["lambda_nm"] * NM, kappa=TWO_PI * opt["kappa_MHz"] * 1e6,
            eps_sin=complex(mat["n_sin_real"], mat["n_sin_imag"]) ** 2,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    fblock = raw["field"]
    preset = fblock.get("preset")
    if preset is not None:
        cal = dict(field_presets()[preset])
        if "ring_width_um" in fblock:
            cal["ring_width_um"] = fblock["ring_width_um"]
        quantitative = bool(cal.get("quantitative", False))
    else:
        cal = fblock
        quantitative = True
    field = calibrate_field_model(
        TWO_PI * cal["omega_s_prime_GHz_per_nm"] * 1e9 / NM,
        TWO_PI * cal["omega_s_dprime_MHz_per_nm2"] * 1e6 / NM**2,
        cal["z_ref_nm"] * NM,
        ring_width=cal.get("ring_width_um", 0.5) * UM,
        rel_field=cal.get("rel_field", 0.15),
        major_diameter=toroid.D,
        thickness=membrane.h,
        optics=optics,
    )

    j, k = mode["j"], mode["k"]
    nominal = TWO_PI * mode["nominal_freq_MHz"] * 1e6 if "nominal_freq_MHz" in mode else None
    omega = nominal if nominal is not None else eigenfrequency(membrane, j, k)
    q = mode["Q_m"] if "Q_m" in mode else omega / (TWO_PI * mode["gamma_m_Hz"])
    return RunConfig(
        raw=raw, hash=config_hash(raw), membrane=membrane, toroid=toroid, optics=optics,
        kappa_ext=TWO_PI * opt["kappa_ext_MHz"] * 1e6, field=field, field_preset=preset,
        field_quantitative=quantitative, j=j, k=k, quality_factor=q, nominal_omega_m=nominal,
    )


def load_config(source=None):
    return build_run_config(load_raw(source))
