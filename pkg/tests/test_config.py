import math

import pytest

from lpconc.config import ConfigError, ExperimentConfig, load_config, parse_config


def test_parse_lists_comments_and_inf():
    cfg = parse_config("""
    # comment line
    p = [1, 2]     # trailing comment
    q = 4, inf
    n = 256
    t_min = 2
    t_max = 3.5
    t_points = 4
    t_spacing = log
    seed = 3
    chunks = 8
    fit = true
    output = "out.csv"
    """)
    assert cfg.p == [1.0, 2.0] and cfg.q == [4.0, math.inf] and cfg.n == [256]
    assert cfg.fit and cfg.output == "out.csv"
    ts = cfg.t_values()
    assert len(ts) == 4 and ts[0] == pytest.approx(2) and ts[-1] == pytest.approx(3.5)
    assert ts[1] / ts[0] == pytest.approx(ts[2] / ts[1])


def test_round_trip_is_lossless():
    cfg = ExperimentConfig(p=[1.0, 0.1 + 0.2], q=[math.inf, 4.0], n=[64, 1024], t=[2.0, 2.1000000000000001],
                           trials=12345, seed=7, chunks=3, workers=2, fit=True, output="x.csv",
                           format="jsonl", body="nu-ball")
    back = parse_config(cfg.dumps())
    assert back == cfg
    assert parse_config(back.dumps()).dumps() == cfg.dumps()


def test_large_integers_are_exact():
    cfg = parse_config("seed = 9007199254740993\ntrials = 1e6\n")
    assert cfg.seed == 2**53 + 1
    assert cfg.trials == 1_000_000


@pytest.mark.parametrize("text,field,line", [
    ("p = [1]\nbogus = 3\n", "bogus", 2),
    ("trials = ten\n", "trials", 1),
    ("trials = 1.5\n", "trials", 1),
    ("p = [1\n", "p", 1),
    ("p = 1\np = 2\n", "p", 2),
    ("fit = maybe\n", "fit", 1),
])
def test_parse_errors_carry_location(text, field, line):
    with pytest.raises(ConfigError) as exc:
        parse_config(text, source="cfg.txt")
    assert exc.value.field == field and exc.value.line == line
    assert f"cfg.txt:{line}" in str(exc.value)


def test_missing_equals():
    with pytest.raises(ConfigError) as exc:
        parse_config("just words\n")
    assert exc.value.line == 1


def test_validation():
    with pytest.raises(ConfigError, match="seed"):
        ExperimentConfig(chunks=1).validate()
    with pytest.raises(ConfigError, match="chunks"):
        ExperimentConfig(seed=1).validate()
    ExperimentConfig().validate(require_seed=False)
    for bad in (dict(p=[]), dict(n=[0]), dict(t=[]), dict(t_spacing="cubic"), dict(format="xml"),
                dict(trials=0), dict(t_min=3, t_max=2), dict(order=1), dict(body="cube")):
        with pytest.raises(ConfigError):
            ExperimentConfig(seed=1, chunks=1, **bad).validate()


def test_updated_ignores_none():
    cfg = ExperimentConfig(seed=4, chunks=2).updated(seed=None, trials=99)
    assert cfg.seed == 4 and cfg.trials == 99


def test_load_config(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("seed = 1\nchunks = 2\n")
    assert load_config(str(path)).chunks == 2
