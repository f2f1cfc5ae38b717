import numpy as np
import pytest

from genstereo.cli import decode_disparity, encode_disparity, main
from genstereo.fitness import FitnessContext, fitness
from genstereo.imaging import GrayImage, read_pgm, write_pgm
from genstereo.synthetic import block_disparity, random_dot_stereogram


@pytest.fixture
def files(tmp_path):
    scene = random_dot_stereogram(block_disparity(24, 32, 10, 3), np.random.default_rng(0))
    paths = {name: tmp_path / f"{name}.pgm" for name in ("ref", "tgt", "gt")}
    write_pgm(paths["ref"], scene.pair.reference)
    write_pgm(paths["tgt"], scene.pair.target)
    write_pgm(paths["gt"], encode_disparity(scene.disparity, 4))
    paths["dir"] = tmp_path
    paths["scene"] = scene
    return paths


def _match(files, *extra, out="out.pgm", log="log.csv"):
    d = files["dir"]
    argv = ["match", "--ref", str(files["ref"]), "--tgt", str(files["tgt"]), "--dmax", "5",
            "--pop", "8", "--gens", "4", "--out", str(d / out), "--log", str(d / log), *extra]
    return main(argv)


def test_match_writes_outputs(files, capsys):
    assert _match(files) == 0
    out = read_pgm(files["dir"] / "out.pgm")
    assert out.shape == (24, 32)
    assert np.all(out.pixels % 4 == 0) and out.pixels.max() <= 20
    lines = (files["dir"] / "log.csv").read_text().splitlines()
    assert lines[0] == "# output_scale=4"
    assert lines[1] == "generation,best_fitness,mean_fitness,millis"
    assert len(lines) == 2 + 5
    printed = capsys.readouterr().out
    assert "best_fitness=" in printed and "elapsed=" in printed


def test_match_zero_generations(files):
    assert _match(files, "--gens", "0") == 0
    assert read_pgm(files["dir"] / "out.pgm").shape == (24, 32)


def test_match_deterministic_with_threads(files):
    assert _match(files, "--workers", "4", out="a.pgm", log="a.csv") == 0
    assert _match(files, "--workers", "4", out="b.pgm", log="b.csv") == 0
    d = files["dir"]
    assert (d / "a.pgm").read_bytes() == (d / "b.pgm").read_bytes()
    assert (d / "a.csv").read_bytes() == (d / "b.csv").read_bytes()


def test_match_missing_input(files, capsys):
    missing = files["dir"] / "nope.pgm"
    rc = main(["match", "--ref", str(missing), "--tgt", str(files["tgt"]), "--dmax", "5",
               "--out", str(files["dir"] / "o.pgm")])
    assert rc == 2
    assert str(missing) in capsys.readouterr().err


def test_match_bad_config_value(files):
    assert _match(files, "--elite-frac", "0") == 3


def test_match_config_file(files):
    cfg = files["dir"] / "run.cfg"
    cfg.write_text("# defaults\npop = 6\nmutation-rate=0.5\ndmax=5\n")
    d = files["dir"]
    argv = ["match", "--config", str(cfg), "--ref", str(files["ref"]), "--tgt", str(files["tgt"]),
            "--gens", "2", "--out", str(d / "c.pgm"), "--log", str(d / "c.csv")]
    assert main(argv) == 0
    assert len((d / "c.csv").read_text().splitlines()) == 2 + 3


def test_match_config_unknown_key(files):
    cfg = files["dir"] / "bad.cfg"
    cfg.write_text("colour=blue\n")
    assert _match(files, "--config", str(cfg)) == 1


def test_usage_error_raises_system_exit_1():
    with pytest.raises(SystemExit) as exc:
        main(["match", "--ref", "x"])
    assert exc.value.code == 1


def test_eval_identity(files, capsys):
    gt = str(files["gt"])
    assert main(["eval", "--est", gt, "--gt", gt, "--scale", "1"]) == 0
    assert capsys.readouterr().out.strip().split(",")[0] == "0.0"


def test_eval_default_threshold(files, capsys):
    gt = str(files["gt"])
    main(["eval", "--est", gt, "--gt", gt])
    assert capsys.readouterr().out.strip().endswith(",1.0")


def test_eval_size_mismatch(files):
    small = files["dir"] / "small.pgm"
    write_pgm(small, GrayImage(np.zeros((5, 5))))
    assert main(["eval", "--est", str(small), "--gt", str(files["gt"])]) == 3


def test_baseline_identical_images(files):
    d = files["dir"]
    out = d / "b.pgm"
    assert main(["baseline", "--ref", str(files["ref"]), "--tgt", str(files["ref"]), "--dmax", "5",
                 "--out", str(out)]) == 0
    assert not read_pgm(out).pixels.any()


def test_baseline_shifted_pair(tmp_path):
    scene = random_dot_stereogram(np.full((20, 30), 3), np.random.default_rng(5))
    write_pgm(tmp_path / "r.pgm", scene.pair.reference)
    write_pgm(tmp_path / "t.pgm", scene.pair.target)
    out = tmp_path / "b.pgm"
    assert main(["baseline", "--ref", str(tmp_path / "r.pgm"), "--tgt", str(tmp_path / "t.pgm"),
                 "--dmax", "5", "--window", "2", "--out", str(out), "--scale", "1"]) == 0
    disp = read_pgm(out).pixels
    assert np.all(disp[scene.interior_mask(2)] == 3)


def test_baseline_invalid_d_max(files):
    assert main(["baseline", "--ref", str(files["ref"]), "--tgt", str(files["tgt"]), "--dmax", "32",
                 "--out", str(files["dir"] / "b.pgm")]) == 3


def test_fitness_matches_library(files, capsys):
    args = ["fitness", "--chrom", str(files["gt"]), "--ref", str(files["ref"]), "--tgt", str(files["tgt"]),
            "--dmax", "5"]
    assert main(args) == 0
    first = capsys.readouterr().out.strip()
    main(args)
    assert capsys.readouterr().out.strip() == first
    scene = files["scene"]
    want = fitness(scene.disparity.astype(np.int32), FitnessContext.from_pair(scene.pair, 5, 1))
    assert float(first) == want


def test_fitness_uniform_pair(tmp_path, capsys):
    flat = tmp_path / "flat.pgm"
    write_pgm(flat, GrayImage(np.full((6, 6), 80)))
    chrom = tmp_path / "c.pgm"
    write_pgm(chrom, encode_disparity(np.ones((6, 6), dtype=int), 4))
    assert main(["fitness", "--chrom", str(chrom), "--ref", str(flat), "--tgt", str(flat), "--dmax", "2"]) == 0
    assert float(capsys.readouterr().out) == 0.0


def test_fitness_range_violation(files):
    assert main(["fitness", "--chrom", str(files["gt"]), "--ref", str(files["ref"]), "--tgt", str(files["tgt"]),
                 "--dmax", "2"]) == 3


def test_disparity_codec():
    disp = np.array([[0, 1, 63, 70]])
    assert encode_disparity(disp, 4).pixels.tolist() == [[0, 4, 252, 255]]
    assert decode_disparity(GrayImage(np.array([[0, 8]])), 4).tolist() == [[0, 2]]
