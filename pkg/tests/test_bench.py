import numpy as np
import pytest

from normsketch import Lp, MaxMix, Orlicz, SumMix, TopK, io
from normsketch.bench import ExperimentConfig, parse_norm, read_config_file, run_benchmark, run_one
from normsketch.errors import InputError
from normsketch.synth import gaussian_instance, heavy_instance, make_instance


def test_parse_norms():
    assert parse_norm("l2") == Lp(2.0)
    assert parse_norm("lp:1.5") == Lp(1.5)
    assert parse_norm("topk:0.2n", 100) == TopK(20)
    assert parse_norm("topk:7") == TopK(7)
    assert parse_norm("summix:1.0") == SumMix(1.0)
    assert parse_norm("maxmix:0.5") == MaxMix(0.5)
    assert isinstance(parse_norm("huber:0.1"), Orlicz)
    assert parse_norm("l1l2").G.name == "l1l2"


@pytest.mark.parametrize("spec", ["huber", "topk:2.5", "nope", "lp:abc", "topk:xn"])
def test_parse_norm_errors(spec):
    with pytest.raises(InputError):
        parse_norm(spec, 10)


def test_config_validation():
    with pytest.raises(InputError):
        ExperimentConfig(reps=0)
    with pytest.raises(InputError):
        ExperimentConfig(sizes=(5, -1))
    with pytest.raises(InputError):
        ExperimentConfig(eps=0.5)
    with pytest.raises(InputError):
        ExperimentConfig(method=("magic",))


def test_config_file(tmp_path):
    p = tmp_path / "cfg.txt"
    p.write_text("# grid\nnorm = l1l2\nsizes = 5, 10\nreps=3\ndeterministic = yes\n")
    cfg = ExperimentConfig.from_mapping(read_config_file(p))
    assert (cfg.norm, cfg.sizes, cfg.reps, cfg.deterministic) == ("l1l2", (5, 10), 3, True)
    p.write_text("colour = blue\n")
    with pytest.raises(InputError):
        ExperimentConfig.from_mapping(read_config_file(p))
    p.write_text("justakey\n")
    with pytest.raises(InputError, match="1"):
        read_config_file(p)


def test_exact_matches_least_squares():
    A, b = gaussian_instance(300, 3, 0)
    recs = run_benchmark(ExperimentConfig(norm="square", method="exact", sizes=(5,), reps=1), A, b)
    x = np.linalg.lstsq(A.toarray(), b, rcond=None)[0]
    assert recs[0].loss == pytest.approx(np.linalg.norm(A @ x - b), rel=1e-9)


def test_cardinality():
    A, b = gaussian_instance(200, 2, 1)
    cfg = ExperimentConfig(norm="l2", method=("exact", "symsketch"), sizes=(5, 10), reps=25)
    recs = run_benchmark(cfg, A, b)
    for m in ("exact", "symsketch"):
        assert sum(r.method == m for r in recs) == 50


def test_records_are_full_data_losses():
    A, b = gaussian_instance(400, 3, 2)
    norm = parse_norm("topk:0.2n", 400)
    cfg = ExperimentConfig(norm="topk:0.2n", method="symsketch", sizes=(5,), reps=3)
    for r in run_benchmark(cfg, A, b):
        loss, _, x = run_one("symsketch", A, b, norm, 5, r.seed, cfg)
        assert r.loss == loss == norm(A @ x - b)
        assert r.loss >= 0 and r.wall_time > 0


def test_incompatible_method():
    A, b = gaussian_instance(100, 2, 0)
    with pytest.raises(InputError):
        run_benchmark(ExperimentConfig(norm="topk:5", method="orlicz_sampling", sizes=(5,), reps=1), A, b)


def test_seeds_independent_of_other_methods():
    A, b = gaussian_instance(300, 2, 0)
    a = run_benchmark(ExperimentConfig(norm="l1l2", method="uniform_sampling", sizes=(5,), reps=2), A, b)
    both = run_benchmark(ExperimentConfig(norm="l1l2", method=("symsketch", "uniform_sampling"),
                                          sizes=(5,), reps=2), A, b)
    assert [(r.seed, r.loss) for r in a] == [(r.seed, r.loss) for r in both if r.method == "uniform_sampling"]


def test_uniform_sampling_support():
    A, b = gaussian_instance(2000, 4, 3)
    recs = run_benchmark(ExperimentConfig(norm="huber:0.1", method="uniform_sampling", sizes=(10,),
                                          reps=40), A, b)
    sizes = np.array([r.rows for r in recs])
    p = 40 / 2000
    assert abs(sizes.mean() - 40) <= 3 * np.sqrt(2000 * p * (1 - p) / 40)


@pytest.mark.slow
def test_leverage_beats_uniform_on_heavy_rows():
    A, b = heavy_instance(3000, 4, 0)
    cfg = ExperimentConfig(norm="huber:0.1", method=("orlicz_sampling", "uniform_sampling"), reps=10)
    summary = {(m, s): mean for m, _, s, _, mean, _ in io.summarize(run_benchmark(cfg, A, b))}
    for size in cfg.sizes:
        assert summary[("orlicz_sampling", size)] <= summary[("uniform_sampling", size)]


def test_synth_instances():
    A, b = make_instance("heavy", 1000, 3, 0)
    norms = np.linalg.norm(A.toarray(), axis=1)
    assert np.sum(norms > 20) == 10
    A2, b2 = make_instance("heavy", 1000, 3, 0)
    assert np.array_equal(b, b2)
    with pytest.raises(InputError):
        make_instance("heavy", 3, 3, 0)
    with pytest.raises(InputError):
        make_instance("weird", 10, 3, 0)
