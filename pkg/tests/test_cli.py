import json
import os

import numpy as np
import pytest

from chaoskit.cli import main
from chaoskit.seqcore import count_kmers, parse_fasta
from chaoskit.distribution import (
    empirical_distribution,
    read_distribution_csv,
    total_variation_l1,
)
from chaoskit.debruijn import error_bound
from chaoskit.imaging import pgm_bytes, render_cgr
from conftest import fixture_path, golden_bytes


@pytest.fixture
def sample_fasta(tmp_path):
    path = tmp_path / "in.fasta"
    path.write_text(">x\nATCGTATCCA\n")
    return str(path)


class TestKmers:
    def test_csv_output(self, sample_fasta, tmp_path):
        out = tmp_path / "counts.csv"
        assert main(["kmers", "-i", sample_fasta, "-k", "3", "-o", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "kmer,count"
        assert "ATC,2" in lines

    def test_missing_file_is_io_error(self, tmp_path):
        assert main(["kmers", "-i", str(tmp_path / "none.fasta"), "-k", "3"]) == 2

    def test_bad_k_is_validation_error(self, sample_fasta, capsys):
        assert main(["kmers", "-i", sample_fasta, "-k", "0"]) == 1
        assert "chaoskit" in capsys.readouterr().err

    def test_multi_record_counts_sum(self, tmp_path):
        path = tmp_path / "two.fasta"
        path.write_text(">a\nAAAA\n>b\nAAA\n")
        out = tmp_path / "counts.csv"
        assert main(["kmers", "-i", str(path), "-k", "2", "-o", str(out)]) == 0
        assert "AA,5" in out.read_text().splitlines()  # 3 + 2, no cross-record windows


class TestUsageErrors:
    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_flag(self, sample_fasta, capsys):
        assert main(["kmers", "-i", sample_fasta, "-k", "3", "--wat"]) == 1
        assert "usage" in capsys.readouterr().err

    def test_missing_required_flag(self, capsys):
        assert main(["fcgr", "-k", "3"]) == 1
        capsys.readouterr()


class TestFcgr:
    def test_csv_header_and_shape(self, sample_fasta, tmp_path):
        out = tmp_path / "m.csv"
        assert main(["fcgr", "-i", sample_fasta, "-k", "2", "-o", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "k=2"
        assert len(lines) == 1 + 4
        total = sum(int(v) for line in lines[1:] for v in line.split(","))
        assert total == 9  # 10 - 2 + 1

    def test_modes_agree_for_count_and_grid(self, sample_fasta, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert main(["fcgr", "-i", sample_fasta, "-k", "3", "--mode", "count", "-o", str(a)]) == 0
        assert main(["fcgr", "-i", sample_fasta, "-k", "3", "--mode", "grid", "-o", str(b)]) == 0
        assert a.read_text() == b.read_text()

    def test_image_flag(self, sample_fasta, tmp_path):
        img = tmp_path / "m.pgm"
        assert main(
            ["fcgr", "-i", sample_fasta, "-k", "2", "-o", str(tmp_path / "m.csv"),
             "--image", str(img), "--scale", "linear"]
        ) == 0
        assert img.read_bytes().startswith(b"P5\n4 4\n255\n")


class TestCgrRender:
    def test_golden_acg(self, tmp_path):
        fasta = tmp_path / "acg.fasta"
        fasta.write_text(">acg\nACG\n")
        out = tmp_path / "acg.pgm"
        assert main(["cgr", "render", "-i", str(fasta), "-r", "1", "-o", str(out)]) == 0
        assert out.read_bytes() == golden_bytes("cgr_acg_r1.pgm")

    def test_fixture_r8(self, tmp_path):
        out = tmp_path / "f.pgm"
        assert main(
            ["cgr", "render", "-i", fixture_path("fragment-01.fasta"), "-r", "8", "-o", str(out)]
        ) == 0
        assert out.read_bytes() == golden_bytes("cgr_fragment01_r8.pgm")


class TestDistAndSample:
    def test_dist_csv(self, sample_fasta, tmp_path):
        out = tmp_path / "theta.csv"
        assert main(["dist", "-i", sample_fasta, "-k", "3", "-o", str(out)]) == 0
        dist, renormalized = read_distribution_csv(out.read_text())
        assert not renormalized
        assert dist.component("ATC") == pytest.approx(2 / 8)

    def test_check_marginals_reports(self, sample_fasta, tmp_path, capsys):
        out = tmp_path / "theta.csv"
        code = main(
            ["dist", "-i", sample_fasta, "-k", "3", "-o", str(out), "--check-marginals"]
        )
        assert code == 0
        assert "max marginal residual" in capsys.readouterr().err

    def test_sample_deterministic(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        args = ["sample", "-k", "2", "--iterations", "500", "--seed", "7"]
        assert main(args + ["-o", str(a)]) == 0
        assert main(args + ["-o", str(b)]) == 0
        assert a.read_text() == b.read_text()


class TestReconstruct:
    def test_exact_roundtrip_with_report_and_image(self, sample_fasta, tmp_path):
        theta = tmp_path / "theta.csv"
        assert main(["dist", "-i", sample_fasta, "-k", "3", "-o", str(theta)]) == 0
        out = tmp_path / "out.fasta"
        report_path = tmp_path / "report.json"
        image = tmp_path / "out.pgm"
        assert main(
            ["reconstruct", "--theta", str(theta), "-n", "10", "-o", str(out),
             "--report", str(report_path), "--image", str(image), "-r", "2"]
        ) == 0
        report = json.loads(report_path.read_text())
        assert report["achieved_l1"] == 0.0
        assert report["used_direct_eulerian_path"] is True
        [(header, seq)] = parse_fasta(out.read_bytes())
        assert header.startswith("reconstructed k=3 n=10 l1=0.0")
        assert np.array_equal(
            count_kmers(seq, 3).counts, count_kmers("ATCGTATCCA", 3).counts
        )
        assert image.read_bytes() == pgm_bytes(render_cgr(seq, 2))

    def test_pipeline_closure_on_fixture(self, tmp_path):
        # dist -> reconstruct -> dist stays within the error bound
        fasta = fixture_path("fragment-02.fasta")
        theta = tmp_path / "theta.csv"
        assert main(["dist", "-i", fasta, "-k", "4", "-o", str(theta)]) == 0
        out = tmp_path / "rec.fasta"
        report_path = tmp_path / "report.json"
        assert main(
            ["reconstruct", "--theta", str(theta), "-n", "100000", "-o", str(out),
             "--report", str(report_path)]
        ) == 0
        theta2 = tmp_path / "theta2.csv"
        assert main(["dist", "-i", str(out), "-k", "4", "-o", str(theta2)]) == 0
        original, _ = read_distribution_csv(theta.read_text())
        recovered, _ = read_distribution_csv(theta2.read_text())
        report = json.loads(report_path.read_text())
        n_art = report["n_artificial_balance"] + report["n_artificial_connect"]
        tolerance = error_bound(4, 100000, n_art) if n_art else 1e-12
        assert total_variation_l1(original, recovered) <= tolerance

    def test_bad_theta_csv(self, tmp_path, capsys):
        theta = tmp_path / "theta.csv"
        theta.write_text("kmer,theta\nAA,0.5\n")
        assert main(
            ["reconstruct", "--theta", str(theta), "-n", "10", "-o", str(tmp_path / "o.fasta")]
        ) == 1
        capsys.readouterr()


class TestSymmetry:
    def test_transforms_records(self, sample_fasta, tmp_path):
        out = tmp_path / "sym.fasta"
        assert main(
            ["symmetry", "-i", sample_fasta, "--sigma", "(A G)(C T)", "-o", str(out)]
        ) == 0
        [(header, seq)] = parse_fasta(out.read_bytes())
        assert "sigma=(A G)(C T)" in header
        assert str(seq) == "GCTACGCTTG"  # letterwise image of ATCGTATCCA

    def test_rejects_non_symmetry_permutation(self, sample_fasta, capsys):
        assert main(["symmetry", "-i", sample_fasta, "--sigma", "(A C)", "-o", "-"]) == 1
        assert "not one of the 8" in capsys.readouterr().err

    def test_render_after_symmetry_matches_remap(self, tmp_path):
        # sigma = (A C G T) corresponds to r3; check one representative pixel set
        fasta = tmp_path / "seq.fasta"
        fasta.write_text(">s\nACGTACGGTACC\n")
        direct = tmp_path / "direct.pgm"
        assert main(["cgr", "render", "-i", str(fasta), "-r", "2", "-o", str(direct)]) == 0
        transformed = tmp_path / "sym.fasta"
        assert main(["symmetry", "-i", str(fasta), "--sigma", "(A C G T)", "-o", str(transformed)]) == 0
        rendered = tmp_path / "sym.pgm"
        assert main(["cgr", "render", "-i", str(transformed), "-r", "2", "-o", str(rendered)]) == 0
        base = np.frombuffer(direct.read_bytes()[-16:], dtype=np.uint8).reshape(4, 4)
        image = np.frombuffer(rendered.read_bytes()[-16:], dtype=np.uint8).reshape(4, 4)
        # r3 rotates the square clockwise by 90 degrees; in matrix terms the
        # pixel grid rotates accordingly
        assert np.array_equal(image, np.rot90(base, k=-1))


class TestThreadsEnv:
    def test_parallel_matches_serial(self, tmp_path, monkeypatch):
        path = tmp_path / "many.fasta"
        rng = np.random.default_rng(63)
        with open(path, "w") as fh:
            for r in range(6):
                fh.write(f">r{r}\n")
                fh.write("".join("ACGT"[c] for c in rng.integers(0, 4, 500)) + "\n")
        serial = tmp_path / "serial.csv"
        parallel = tmp_path / "parallel.csv"
        monkeypatch.delenv("CHAOSKIT_THREADS", raising=False)
        assert main(["kmers", "-i", str(path), "-k", "4", "-o", str(serial)]) == 0
        monkeypatch.setenv("CHAOSKIT_THREADS", "4")
        assert main(["kmers", "-i", str(path), "-k", "4", "-o", str(parallel)]) == 0
        assert serial.read_text() == parallel.read_text()
