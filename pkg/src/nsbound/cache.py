"""Exact on-disk cache for unit systems, keyed by (p, d, precision).

Serialization is lossless: rational coordinates go out as num/den
strings and interval endpoints as dyadic (mantissa, exponent) pairs, so
a round-tripped unit system compares equal to a freshly built one.
"""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from typing import Optional

import gmpy2

from .cartan import CartanContext, build_context
from .cyclotomic import CycloNumber
from .numerics import RealInterval
from .units import UnitSystem, build_unit_system

CACHE_VERSION = 1
CACHE_ENV = "NSBOUND_CACHE_DIR"


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _frac_parse(s: str) -> Fraction:
    num, den = s.split("/")
    return Fraction(int(num), int(den))


def _cyclo_out(x: CycloNumber):
    return [_frac_str(c) for c in x.coeffs]


def _cyclo_in(p: int, data) -> CycloNumber:
    return CycloNumber(p, tuple(_frac_parse(s) for s in data))


def _mpfr_out(x):
    m, e = x.as_mantissa_exp()
    return [str(int(m)), int(e)]


def _mpfr_in(data):
    m, e = int(data[0]), int(data[1])
    if e >= 0:
        q = gmpy2.mpq(m * 2 ** e, 1)
    else:
        q = gmpy2.mpq(m, 2 ** (-e))
    return gmpy2.mpfr(q, max(abs(m).bit_length(), 2))  # exactly representable


def _interval_out(x: RealInterval):
    return {"lo": _mpfr_out(x.lo), "hi": _mpfr_out(x.hi), "prec": x.prec}


def _interval_in(data) -> RealInterval:
    return RealInterval(_mpfr_in(data["lo"]), _mpfr_in(data["hi"]), data["prec"])


def cache_path(cache_dir: str, p: int, d: int, prec: int) -> str:
    return os.path.join(cache_dir, f"unitsystem_p{p}_d{d}_b{prec}_v{CACHE_VERSION}.json")


def save_unit_system(cache_dir: str, us: UnitSystem) -> str:
    payload = {
        "version": CACHE_VERSION,
        "p": us.ctx.p,
        "d": us.ctx.d,
        "prec": us.prec,
        "eta0_exponent": us.eta0_exponent,
        "independent": list(us.independent),
        "xi": [_cyclo_out(x) for x in us.xi],
        "eta": [_cyclo_out(x) for x in us.eta],
        "mu": _cyclo_out(us.mu),
        "A": [[_interval_out(x) for x in row] for row in us.A],
        "A_inv": [[_interval_out(x) for x in row] for row in us.A_inv],
        "det_A": _interval_out(us.det_A),
    }
    os.makedirs(cache_dir, exist_ok=True)
    path = cache_path(cache_dir, us.ctx.p, us.ctx.d, us.prec)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh)
        os.replace(tmp, path)  # atomic publish
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)
    return path


def load_unit_system(cache_dir: str, ctx: CartanContext, prec: int) -> Optional[UnitSystem]:
    path = cache_path(cache_dir, ctx.p, ctx.d, prec)
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("version") != CACHE_VERSION or payload["p"] != ctx.p \
            or payload["d"] != ctx.d or payload["prec"] != prec:
        return None
    p = ctx.p
    return UnitSystem(
        ctx,
        tuple(_cyclo_in(p, x) for x in payload["xi"]),
        tuple(_cyclo_in(p, x) for x in payload["eta"]),
        tuple(payload["independent"]),
        _cyclo_in(p, payload["mu"]),
        payload["eta0_exponent"],
        tuple(tuple(_interval_in(x) for x in row) for row in payload["A"]),
        tuple(tuple(_interval_in(x) for x in row) for row in payload["A_inv"]),
        _interval_in(payload["det_A"]),
        payload["prec"],
    )


def cached_unit_system(cache_dir: Optional[str]):
    """Loader hook for the pipeline: read-through cache when a dir is set."""
    if cache_dir is None:
        return None

    def loader(ctx: CartanContext, prec: int) -> UnitSystem:
        us = load_unit_system(cache_dir, ctx, prec)
        if us is None:
            us = build_unit_system(ctx, prec)
            save_unit_system(cache_dir, us)
        return us

    return loader
