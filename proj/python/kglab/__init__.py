"""Python access to the kglab kernels and verification checks."""
import json

from ._kglab import (
    ConfigError,
    RangeError,
    bessel_j,
    bound_states,
    check_names,
    cosine_c1,
    fractional_bound,
    fractional_kernel,
    lorentz_norm,
    sine_bessel_part,
    sine_wave_mass,
)
from ._kglab import run_check_json as _run_check_json


def run_check(name, settings=None, seed=20240917, jobs=1):
    """Run a registered check and return its report as a dict."""
    payload = json.dumps(settings) if settings else ""
    return json.loads(_run_check_json(name, payload, seed, jobs))


__all__ = [
    "ConfigError",
    "RangeError",
    "bessel_j",
    "bound_states",
    "check_names",
    "cosine_c1",
    "fractional_bound",
    "fractional_kernel",
    "lorentz_norm",
    "run_check",
    "sine_bessel_part",
    "sine_wave_mass",
]
