import json
import sys
from pathlib import Path

import pytest

from citefronts.cli import main, parse_periods, run_pipeline, PipelineConfig, load_config
from citefronts.errors import DataError, StageError


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    rc = main([
        "synth", "--fronts", "120:1985-1992,100:1993-2000,80:2001-2008",
        "--refs", "10", "--seed", "42", "--out", str(out),
    ])
    assert rc == 0
    return out


def test_synth_writes_records_and_truth(synth_dir):
    lines = (synth_dir / "records.jsonl").read_text().splitlines()
    assert len(lines) == 300
    first = json.loads(lines[0])
    assert set(first) == {"uid", "title", "abstract", "year", "authors", "source",
                          "doi", "cited_refs"}
    truth = (synth_dir / "ground_truth.csv").read_text().splitlines()
    assert truth[0] == "uid,front,year"
    assert len(truth) == 301


def test_ingest_stats_fit_core(tmp_path, synth_dir):
    records = str(synth_dir / "records.jsonl")
    out = tmp_path / "ingest"
    assert main(["ingest", "--input", records, "--format", "lines", "--out", str(out)]) == 0
    assert (out / "corpus.jsonl").exists()
    assert (out / "links.csv").read_text().startswith("citing,cited\n")
    assert "nodes: 300" in (out / "stats.txt").read_text()

    hist_csv = tmp_path / "hist.csv"
    assert main(["stats", "--input", records, "--format", "lines", "--out", str(hist_csv)]) == 0
    assert hist_csv.read_text().startswith("degree,count\n")

    fit_json = tmp_path / "fit.json"
    assert main(["fit", "--input", records, "--format", "lines",
                 "--out-json", str(fit_json)]) == 0
    fit = json.loads(fit_json.read_text())
    assert fit["b"] < 0 and fit["a"] > 0

    core_json = tmp_path / "core.json"
    assert main(["core", "--input", records, "--format", "lines",
                 "--k-min", "2", "--out", str(core_json)]) == 0
    core = json.loads(core_json.read_text())
    assert len(core["nodes"]) > 0


def test_cluster_quotient_dynamics_terms_layout(tmp_path, synth_dir):
    records = str(synth_dir / "records.jsonl")
    core_json = tmp_path / "core.json"
    main(["core", "--input", records, "--format", "lines", "--k-min", "1",
          "--out", str(core_json)])

    part_csv = tmp_path / "partition.csv"
    part_json = tmp_path / "partition.json"
    assert main(["cluster", "--graph", str(core_json), "--min-internal-edges", "10",
                 "--out-csv", str(part_csv), "--out-json", str(part_json)]) == 0
    assert part_csv.read_text().startswith("uid,front_id\n")
    meta = json.loads(part_json.read_text())
    assert meta["fronts"] and -0.5 <= meta["q"] < 1

    sub_csv = tmp_path / "sub.csv"
    assert main(["subcluster", "--graph", str(core_json), "--partition", str(part_csv),
                 "--front", "1", "--out-csv", str(sub_csv)]) == 0
    rows = sub_csv.read_text().splitlines()[1:]
    assert all(row.split(",")[1].startswith("1") for row in rows)

    quot = tmp_path / "quotient.json"
    assert main(["quotient", "--graph", str(core_json), "--partition", str(part_csv),
                 "--min-weight", "5", "--out", str(quot)]) == 0
    q = json.loads(quot.read_text())
    assert set(q) == {"fronts", "edges", "intra_weights", "excluded_noise_nodes"}

    dyn_csv = tmp_path / "dynamics.csv"
    peaks = tmp_path / "peaks.json"
    assert main(["dynamics", "--input", records, "--format", "lines",
                 "--partition", str(part_csv), "--periods", "1985-1992,1993-2000,2001-2008",
                 "--out-csv", str(dyn_csv), "--out-peaks", str(peaks)]) == 0
    assert dyn_csv.read_text().startswith("year,")
    assert json.loads(peaks.read_text())["fronts"]

    terms_csv = tmp_path / "terms.csv"
    cited_csv = tmp_path / "top_cited.csv"
    assert main(["terms", "--input", records, "--format", "lines",
                 "--partition", str(part_csv), "--k", "5",
                 "--out", str(terms_csv), "--top-cited-out", str(cited_csv)]) == 0
    assert terms_csv.read_text().startswith("front,rank,term,score,k_front,k_rest\n")
    assert cited_csv.read_text().startswith("front,rank,uid,indegree,year,title\n")

    gml = tmp_path / "layout.graphml"
    assert main(["layout", "--graph", str(core_json), "--partition", str(part_csv),
                 "--seed", "3", "--iterations", "10", "--out", str(gml)]) == 0
    assert "<graphml" in gml.read_text()


def test_parse_periods():
    assert parse_periods("1990-1991,1996-1998") == [(1990, 1991), (1996, 1998)]
    assert parse_periods("") == []
    with pytest.raises(DataError):
        parse_periods("1990:1991")


def test_config_file_and_overrides(tmp_path, synth_dir):
    cfg_file = tmp_path / "pipeline.cfg"
    cfg_file.write_text(
        "input = {}\n".format(synth_dir / "records.jsonl")
        + "format = lines\n"
        + "k_min = 1  # threshold is corpus-specific\n"
        + "min_internal_edges = 10\n"
        + "quotient_min_weight = 5\n"
        + "periods = 1985-1992,1993-2000,2001-2008\n"
        + "layout_iterations = 5\n"
        + f"out_dir = {tmp_path / 'out'}\n"
    )
    rc = main(["run", "--config", str(cfg_file)])
    assert rc == 0
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert len(manifest["artifacts"]) == 13
    kinds = {a["kind"] for a in manifest["artifacts"]}
    assert kinds == {"corpus_stats", "degree_histogram", "powerlaw_fit", "core_graph",
                     "partition", "quotient", "dynamics", "terms", "top_cited", "layout"}
    # flag overrides the file value: a huge k_min empties the core
    rc = main(["run", "--config", str(cfg_file), "--k-min", "100000",
               "--out-dir", str(tmp_path / "out2")])
    assert rc == 4


def test_unknown_config_key(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("inptu = x\n")
    with pytest.raises(DataError, match="unknown config key"):
        load_config(str(bad))


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["cluster"])  # missing required flags
    assert exc.value.code == 2


def test_data_error_exit_code(tmp_path):
    missing = tmp_path / "nope.jsonl"
    rc = main(["stats", "--input", str(missing), "--format", "lines"])
    assert rc == 3
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json}\n")
    rc = main(["stats", "--input", str(bad), "--format", "lines"])
    assert rc == 3


def test_missing_k_min_is_data_error(tmp_path, synth_dir):
    cfg = PipelineConfig(input=str(synth_dir / "records.jsonl"), format="lines",
                         out_dir=str(tmp_path / "out"))
    with pytest.raises(DataError, match="k_min"):
        run_pipeline(cfg)


def test_empty_core_aborts_and_cleans_up(tmp_path, synth_dir):
    out = tmp_path / "out"
    cfg = PipelineConfig(input=str(synth_dir / "records.jsonl"), format="lines",
                         out_dir=str(out), k_min=10_000, layout_iterations=2)
    with pytest.raises(StageError, match="empty core") as exc:
        run_pipeline(cfg)
    assert exc.value.stage == "cluster"
    leftovers = [p.name for p in out.iterdir()] if out.exists() else []
    assert leftovers == []  # partial artifacts removed


def test_cli_empty_core_exit_code(tmp_path, synth_dir):
    rc = main(["run", "--input", str(synth_dir / "records.jsonl"), "--format", "lines",
               "--k-min", "100000", "--out-dir", str(tmp_path / "out")])
    assert rc == 4


def test_help_lists_every_pipeline_flag(capsys):
    import citefronts.cli as cli
    from dataclasses import fields
    with pytest.raises(SystemExit) as exc:
        main(["run", "--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    for f in fields(PipelineConfig):
        assert "--" + f.name.replace("_", "-") in text


def test_pipeline_deterministic_manifest(tmp_path, synth_dir):
    base = dict(input=str(synth_dir / "records.jsonl"), format="lines", k_min=1,
                min_internal_edges=10, quotient_min_weight=5,
                periods="1985-1992,1993-2000,2001-2008", layout_iterations=5)
    m1 = run_pipeline(PipelineConfig(out_dir=str(tmp_path / "a"), **base))
    m2 = run_pipeline(PipelineConfig(out_dir=str(tmp_path / "b"), **base))
    assert (tmp_path / "a" / "manifest.json").read_bytes() == \
           (tmp_path / "b" / "manifest.json").read_bytes()
    assert m1 == m2
