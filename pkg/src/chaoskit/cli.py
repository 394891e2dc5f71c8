"""Command-line surface for batch and scripting use.

Exit codes: 0 success, 1 validation/usage error, 2 I/O error. The environment
variable CHAOSKIT_THREADS caps per-record parallelism of the counting
commands (default 1, i.e. sequential).
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np

from .seqcore import (
    DnaSequence,
    KmerFrequencyVector,
    LetterPermutation,
    S_PERMUTATIONS,
    apply_permutation,
    count_kmers,
    parse_fasta,
    write_counts_csv,
)
from .cgr import (
    FcgrMatrix,
    fcgr_count,
    fcgr_grid,
    fcgr_kronecker,
    write_fcgr_csv,
)
from .distribution import (
    empirical_distribution,
    hit_and_run_sample,
    marginal_residual,
    read_distribution_csv,
    write_distribution_csv,
    DEFAULT_SEED,
)
from .debruijn import reconstruct, reconstruction_fasta
from .imaging import GrayImage, render_cgr, render_fcgr, write_pgm, write_png


class _CliParser(argparse.ArgumentParser):
    """argparse that reports usage errors on stderr with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _thread_count() -> int:
    raw = os.environ.get("CHAOSKIT_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_records(fn, items: list) -> list:
    threads = min(_thread_count(), len(items))
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _read_fasta(path: str, policy: str = "split") -> List[Tuple[str, DnaSequence]]:
    with open(path, "rb") as fh:
        records = parse_fasta(fh, policy=policy)
    if not records:
        raise ValueError(f"{path}: no FASTA records found")
    return records


def _summed_counts(records, k: int) -> KmerFrequencyVector:
    """k-mer counts per record, summed; windows never span records."""
    vectors = _map_records(lambda rec: count_kmers(rec[1], k), records)
    total = np.zeros(4 ** k, dtype=np.int64)
    for vec in vectors:
        total += vec.counts
    return KmerFrequencyVector(k, total)


def _summed_fcgr(records, k: int, op) -> FcgrMatrix:
    matrices = _map_records(lambda rec: op(rec[1], k), records)
    total = np.zeros_like(matrices[0].entries)
    for m in matrices:
        total = total + m.entries
    return FcgrMatrix(k, total)


def _open_text_out(path: Optional[str]):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def _write_image(image: GrayImage, path: str) -> None:
    if path.lower().endswith(".png"):
        write_png(image, path)
    else:
        write_pgm(image, path)


def _cmd_cgr_render(args) -> int:
    records = _read_fasta(args.input)
    matrix = _summed_fcgr(records, args.resolution, fcgr_count)
    pixels = np.where(matrix.entries > 0, 0, 255).astype(np.uint8)
    side = 2 ** args.resolution
    _write_image(GrayImage(side, side, pixels.tobytes()), args.output)
    return 0


_FCGR_OPS = {"count": fcgr_count, "grid": fcgr_grid, "kronecker": fcgr_kronecker}


def _cmd_fcgr(args) -> int:
    records = _read_fasta(args.input)
    matrix = _summed_fcgr(records, args.k, _FCGR_OPS[args.mode])
    sink, close = _open_text_out(args.output)
    try:
        write_fcgr_csv(matrix, sink)
    finally:
        if close:
            sink.close()
    if args.image:
        _write_image(render_fcgr(matrix, mode=args.scale), args.image)
    return 0


def _cmd_kmers(args) -> int:
    records = _read_fasta(args.input)
    vector = _summed_counts(records, args.k)
    sink, close = _open_text_out(args.output)
    try:
        write_counts_csv(vector, sink)
    finally:
        if close:
            sink.close()
    return 0


def _cmd_dist(args) -> int:
    records = _read_fasta(args.input)
    dist = empirical_distribution(_summed_counts(records, args.k))
    sink, close = _open_text_out(args.output)
    try:
        write_distribution_csv(dist, sink)
    finally:
        if close:
            sink.close()
    if args.check_marginals:
        residual = float(np.abs(marginal_residual(dist)).max())
        print(f"max marginal residual: {residual!r}", file=sys.stderr)
    return 0


def _cmd_sample(args) -> int:
    dist = hit_and_run_sample(args.k, args.iterations, args.seed)
    sink, close = _open_text_out(args.output)
    try:
        write_distribution_csv(dist, sink)
    finally:
        if close:
            sink.close()
    return 0


def _cmd_reconstruct(args) -> int:
    with open(args.theta) as fh:
        dist, renormalized = read_distribution_csv(fh)
    if renormalized:
        print("warning: input theta renormalized to sum to 1", file=sys.stderr)
    sequence, report = reconstruct(dist, args.n)
    with open(args.output, "w") as fh:
        fh.write(reconstruction_fasta(sequence, report, dist.k))
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report.to_json() + "\n")
    if args.image:
        _write_image(render_cgr(sequence, args.resolution), args.image)
    return 0


def _cmd_symmetry(args) -> int:
    sigma = LetterPermutation.from_cycles(args.sigma)
    if sigma not in S_PERMUTATIONS:
        raise ValueError(
            f"permutation {sigma.cycles()} is not one of the 8 supported elements"
        )
    records = _read_fasta(args.input)
    sink, close = _open_text_out(args.output)
    try:
        for header, seq in records:
            sink.write(f">{header} sigma={sigma.cycles()}\n")
            text = str(apply_permutation(sigma, seq))
            for pos in range(0, len(text), 70):
                sink.write(text[pos : pos + 70] + "\n")
    finally:
        if close:
            sink.close()
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _CliParser(prog="chaoskit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_CliParser)

    cgr = sub.add_parser("cgr", help="chaos game representation tools")
    cgr_sub = cgr.add_subparsers(dest="cgr_command", required=True, parser_class=_CliParser)
    render = cgr_sub.add_parser("render", help="render binary CGR occupancy image")
    render.add_argument("-i", "--input", required=True, help="FASTA input path")
    render.add_argument("-r", "--resolution", type=int, default=8,
                        help="resolution order; image is 2^r x 2^r (default 8)")
    render.add_argument("-o", "--output", required=True, help="output image (.pgm or .png)")
    render.set_defaults(func=_cmd_cgr_render)

    fcgr = sub.add_parser("fcgr", help="FCGR matrix as CSV, optionally rendered")
    fcgr.add_argument("-i", "--input", required=True)
    fcgr.add_argument("-k", type=int, required=True, help="matrix order")
    fcgr.add_argument("--mode", choices=sorted(_FCGR_OPS), default="count")
    fcgr.add_argument("-o", "--output", default=None, help="CSV output (default stdout)")
    fcgr.add_argument("--image", default=None, help="also render the matrix to this image")
    fcgr.add_argument("--scale", choices=("linear", "log"), default="log")
    fcgr.set_defaults(func=_cmd_fcgr)

    kmers = sub.add_parser("kmers", help="k-mer counts as CSV")
    kmers.add_argument("-i", "--input", required=True)
    kmers.add_argument("-k", type=int, required=True)
    kmers.add_argument("-o", "--output", default=None)
    kmers.set_defaults(func=_cmd_kmers)

    dist = sub.add_parser("dist", help="empirical k-mer distribution as CSV")
    dist.add_argument("-i", "--input", required=True)
    dist.add_argument("-k", type=int, required=True)
    dist.add_argument("-o", "--output", default=None)
    dist.add_argument("--check-marginals", action="store_true",
                      help="report the largest marginal residual on stderr")
    dist.set_defaults(func=_cmd_dist)

    sample = sub.add_parser("sample", help="sample a marginal-consistent distribution")
    sample.add_argument("-k", type=int, required=True)
    sample.add_argument("--iterations", type=int, default=None,
                        help="chain length (default 1000x kernel dimension)")
    sample.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sample.add_argument("-o", "--output", default=None)
    sample.set_defaults(func=_cmd_sample)

    rec = sub.add_parser("reconstruct", help="synthesize DNA matching a target distribution")
    rec.add_argument("--theta", required=True, help="kmer,theta CSV of the target")
    rec.add_argument("-n", type=int, required=True, help="target sequence length")
    rec.add_argument("--seed", type=int, default=DEFAULT_SEED,
                     help="accepted for interface uniformity; reconstruction is deterministic")
    rec.add_argument("-o", "--output", required=True, help="output FASTA")
    rec.add_argument("--report", default=None, help="write the JSON report here")
    rec.add_argument("--image", default=None, help="render the result's CGR here")
    rec.add_argument("-r", "--resolution", type=int, default=8)
    rec.set_defaults(func=_cmd_reconstruct)

    sym = sub.add_parser("symmetry", help="apply an alphabet permutation to FASTA records")
    sym.add_argument("-i", "--input", required=True)
    sym.add_argument("--sigma", required=True, help='cycle notation, e.g. "(A G)(C T)"')
    sym.add_argument("-o", "--output", default=None)
    sym.set_defaults(func=_cmd_symmetry)

    serve = sub.add_parser("serve", help="run the HTTP JSON API")
    serve.add_argument("--port", type=int, default=8080)
    serve.add_argument("--host", default="127.0.0.1")
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except OSError as exc:
        print(f"chaoskit: i/o error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(f"chaoskit: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
