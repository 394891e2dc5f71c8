"""Stateless HTTP JSON API: reconstruction, sampling, and CGR rendering.

All handlers are pure functions of the request; the only shared state is the
per-k constraint-system cache, which is immutable after construction. Served
single-binary via `chaoskit serve`.
"""

from __future__ import annotations

import base64
from typing import Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from .seqcore import DnaSequence, SequenceAlphabetError, count_kmers
from .distribution import (
    KmerDistribution,
    MAX_ORDER,
    MIN_ORDER,
    empirical_distribution,
    hit_and_run_sample,
)
from .debruijn import reconstruct
from .imaging import pgm_bytes, render_cgr

MAX_SEQUENCE_LENGTH = 2_000_000
MAX_RESPONSE_SEQUENCE = 100_000
MAX_CGR_RESOLUTION = 10

#: Sampler defaults for the service; the library default of 1000x the kernel
#: dimension is far too slow for a synchronous endpoint at k=6, so requests
#: get a bounded default and an explicit cap instead.
DEFAULT_SAMPLE_ITERATIONS = 1_000
MAX_SAMPLE_ITERATIONS = 100_000
DEFAULT_SAMPLE_SEED = 42


class _ApiError(Exception):
    def __init__(self, status: int, message: str):
        self.status = status
        self.message = message


def _require_int(payload: dict, name: str, default: Optional[int] = None) -> int:
    value = payload.get(name, default)
    if value is None:
        raise _ApiError(400, f"missing required field '{name}'")
    if isinstance(value, bool) or not isinstance(value, int):
        raise _ApiError(400, f"field '{name}' must be an integer")
    return value


def _validate_order(k: int) -> None:
    if not MIN_ORDER <= k <= MAX_ORDER:
        raise _ApiError(400, f"k must be in [{MIN_ORDER}, {MAX_ORDER}], got {k}")


def _theta_from_list(k: int, values, source: str) -> KmerDistribution:
    if not isinstance(values, list):
        raise _ApiError(400, f"'{source}' must be an array of numbers")
    expected = 4 ** k
    if len(values) != expected:
        raise _ApiError(422, f"'{source}' must have {expected} components for k={k}")
    try:
        theta = np.asarray(values, dtype=np.float64)
    except (TypeError, ValueError):
        raise _ApiError(422, f"'{source}' contains non-numeric values")
    if not np.isfinite(theta).all():
        raise _ApiError(422, f"'{source}' contains non-finite values")
    if float(theta.min()) < 0.0:
        raise _ApiError(422, f"'{source}' contains negative components")
    total = float(theta.sum())
    if abs(total - 1.0) > 1e-6:
        raise _ApiError(422, f"'{source}' sums to {total!r}, not within 1e-6 of 1")
    return KmerDistribution(k, theta / total)


def _theta_from_sliders(k: int, weights) -> KmerDistribution:
    if k != 2:
        raise _ApiError(400, "sliders are only available for k=2")
    if not isinstance(weights, list) or len(weights) != 16:
        raise _ApiError(400, "sliders must be an array of 16 weights")
    try:
        raw = np.asarray(weights, dtype=np.float64)
    except (TypeError, ValueError):
        raise _ApiError(400, "sliders contains non-numeric values")
    if not np.isfinite(raw).all() or float(raw.min()) < 0.0:
        raise _ApiError(400, "slider weights must be finite and nonnegative")
    total = float(raw.sum())
    if total <= 0.0:
        raise _ApiError(400, "slider weights must not all be zero")
    return KmerDistribution(2, raw / total)


def _theta_from_sample(k: int, spec) -> KmerDistribution:
    if not isinstance(spec, dict):
        raise _ApiError(400, "'sample' must be an object {iterations, seed}")
    iterations = _require_int(spec, "iterations", DEFAULT_SAMPLE_ITERATIONS)
    seed = _require_int(spec, "seed", DEFAULT_SAMPLE_SEED)
    if not 1 <= iterations <= MAX_SAMPLE_ITERATIONS:
        raise _ApiError(
            400, f"iterations must be in [1, {MAX_SAMPLE_ITERATIONS}], got {iterations}"
        )
    return hit_and_run_sample(k, iterations, seed)


def create_app() -> FastAPI:
    app = FastAPI(title="chaoskit", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(_ApiError)
    async def api_error_handler(request: Request, exc: _ApiError):
        return JSONResponse(status_code=exc.status, content={"error": exc.message})

    @app.exception_handler(RequestValidationError)
    async def body_error_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request body"})

    @app.get("/healthz")
    async def healthz():
        return PlainTextResponse("ok")

    @app.post("/api/sample")
    async def api_sample(payload: dict):
        k = _require_int(payload, "k")
        _validate_order(k)
        dist = _theta_from_sample(k, payload)
        return {"theta": dist.theta.tolist()}

    @app.post("/api/cgr")
    async def api_cgr(payload: dict):
        sequence = payload.get("sequence")
        if not isinstance(sequence, str) or not sequence:
            raise _ApiError(400, "missing or empty 'sequence'")
        if len(sequence) > MAX_SEQUENCE_LENGTH:
            raise _ApiError(413, f"sequence exceeds {MAX_SEQUENCE_LENGTH} letters")
        resolution = _require_int(payload, "resolution")
        if not 1 <= resolution <= MAX_CGR_RESOLUTION:
            raise _ApiError(400, f"resolution must be in [1, {MAX_CGR_RESOLUTION}]")
        try:
            seq = DnaSequence.from_string(sequence)
        except (SequenceAlphabetError, UnicodeEncodeError):
            raise _ApiError(400, "sequence contains letters outside ACGT")
        if len(seq) < resolution:
            raise _ApiError(400, "sequence shorter than the resolution order")
        image = render_cgr(seq, resolution)
        return {
            "image": base64.b64encode(pgm_bytes(image)).decode("ascii"),
            "fcgrSum": len(seq) - resolution + 1,
        }

    @app.post("/api/reconstruct")
    async def api_reconstruct(payload: dict):
        k = _require_int(payload, "k")
        _validate_order(k)
        n = _require_int(payload, "n")
        if n <= k:
            raise _ApiError(400, f"n must exceed k={k}")
        if n > MAX_SEQUENCE_LENGTH:
            raise _ApiError(413, f"n exceeds the {MAX_SEQUENCE_LENGTH} cap")
        resolution = _require_int(payload, "resolution", 8)
        if not 1 <= resolution <= MAX_CGR_RESOLUTION:
            raise _ApiError(400, f"resolution must be in [1, {MAX_CGR_RESOLUTION}]")

        sources = [name for name in ("theta", "sliders", "sample") if payload.get(name) is not None]
        if len(sources) != 1:
            raise _ApiError(
                400, "exactly one of 'theta', 'sliders', 'sample' must be provided"
            )
        source = sources[0]
        if source == "theta":
            dist = _theta_from_list(k, payload["theta"], "theta")
        elif source == "sliders":
            dist = _theta_from_sliders(k, payload["sliders"])
        else:
            dist = _theta_from_sample(k, payload["sample"])

        try:
            sequence, report = reconstruct(dist, n)
        except ValueError as exc:
            raise _ApiError(422, str(exc))
        if len(sequence) < resolution:
            raise _ApiError(400, "reconstructed sequence shorter than the resolution order")
        image = render_cgr(sequence, resolution)
        empirical = empirical_distribution(count_kmers(sequence, k))
        body = {
            "empiricalTheta": empirical.theta.tolist(),
            "achievedL1": report.achieved_l1,
            "boundL1": report.bound_l1,
            "nArtificial": report.n_artificial_balance + report.n_artificial_connect,
            "image": base64.b64encode(pgm_bytes(image)).decode("ascii"),
            "thetaUsed": dist.theta.tolist(),
        }
        if n <= MAX_RESPONSE_SEQUENCE:
            body["sequence"] = str(sequence)
        else:
            body["note"] = (
                f"sequence omitted: n exceeds {MAX_RESPONSE_SEQUENCE}"
                " (download not supported)"
            )
        return body

    return app
