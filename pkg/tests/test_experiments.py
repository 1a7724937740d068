import json

import pytest

from telesim.errors import ConfigError
from telesim.experiments import (
    EXPERIMENT_CHAINS,
    EXPERIMENTS,
    OUTPUT_DIR_ENV,
    SCHEMA_VERSION,
    ExperimentConfig,
    artifact_name,
    render_csv,
    render_json,
    resolve_output_path,
    run,
    run_experiment,
    validate_config,
)
from telesim.ledger import LedgerRecord
from telesim.precision import GridMode


class TestValidateConfig:
    def test_full_valid_config(self):
        cfg = validate_config(
            {"experiment": "verify_bound", "m": 16, "trials": 100000, "seed": 1}
        )
        assert cfg.experiment == "verify_bound"
        assert cfg.m == 16
        assert cfg.n == 0
        assert cfg.trials == 100000
        assert cfg.seed == 1
        assert cfg.mode is GridMode.REAL_ROTATION
        assert cfg.output_format == "json"
        assert cfg.output_path is None

    def test_defaults(self):
        cfg = validate_config({"experiment": "teleport_identity"})
        assert (cfg.m, cfg.n, cfg.trials, cfg.seed) == (16, 0, 1000, 0)

    def test_aliases(self):
        cfg = validate_config(
            {"experiment": "ledger_report", "format": "csv", "out": "x.csv"}
        )
        assert cfg.output_format == "csv"
        assert cfg.output_path == "x.csv"

    def test_mode_parse_case_insensitive(self):
        cfg = validate_config(
            {"experiment": "teleport_identity", "m": 8, "mode": "General"}
        )
        assert cfg.mode is GridMode.GENERAL

    def test_collects_every_violation(self):
        with pytest.raises(ConfigError) as err:
            validate_config(
                {"experiment": "teleport_identity", "m": 3, "n": 5, "mode": "general"}
            )
        text = str(err.value)
        assert "m=3 is odd" in text
        assert "n=5 must be smaller than precision m=3" in text
        assert len(err.value.problems) == 2

    def test_unknown_experiment(self):
        with pytest.raises(ConfigError) as err:
            validate_config({"experiment": "bell_test"})
        assert "experiment must be one of" in str(err.value)

    def test_unknown_option(self):
        with pytest.raises(ConfigError) as err:
            validate_config({"experiment": "verify_bound", "level": 3})
        assert "unknown option 'level'" in str(err.value)

    def test_negative_trials(self):
        with pytest.raises(ConfigError) as err:
            validate_config({"experiment": "verify_bound", "trials": -1})
        assert "trials must be >= 0" in str(err.value)

    def test_bool_is_not_an_integer(self):
        with pytest.raises(ConfigError) as err:
            validate_config({"experiment": "verify_bound", "m": True})
        assert "m must be an integer" in str(err.value)

    def test_small_m_rejected(self):
        with pytest.raises(ConfigError):
            validate_config({"experiment": "verify_bound", "m": 1})

    def test_bad_format(self):
        with pytest.raises(ConfigError) as err:
            validate_config({"experiment": "verify_bound", "format": "yaml"})
        assert "json or csv" in str(err.value)

    def test_bad_mode_reported_once(self):
        with pytest.raises(ConfigError) as err:
            validate_config({"experiment": "verify_bound", "mode": "spherical"})
        assert len(err.value.problems) == 1


class TestExperimentCatalog:
    def test_nine_experiments(self):
        assert len(EXPERIMENTS) == 9
        assert set(EXPERIMENTS) == {
            "teleport_identity",
            "outcome_uniformity",
            "no_signaling",
            "verify_bound",
            "truncation_sweep",
            "rsp_equatorial",
            "frequency_check",
            "ledger_report",
            "resolution_table",
        }

    def test_every_experiment_has_a_chain_summary(self):
        for name in EXPERIMENTS:
            assert EXPERIMENT_CHAINS[name].strip()


@pytest.fixture(scope="module")
def result():
    cfg = validate_config(
        {"experiment": "outcome_uniformity", "m": 4, "trials": 500, "seed": 2}
    )
    return run_experiment(cfg)


class TestDocumentSchema:
    def test_top_level_keys(self, result):
        doc = result.document()
        assert set(doc) == {"schema_version", "config", "records", "ledger", "reports"}
        assert doc["schema_version"] == SCHEMA_VERSION

    def test_config_block_omits_output_path(self, result):
        doc = result.document()
        assert "output_path" not in doc["config"]
        assert doc["config"]["rng_algorithm"]
        assert doc["config"]["schema_version"] == SCHEMA_VERSION

    def test_document_is_json_serializable(self, result):
        text = json.dumps(result.document(), sort_keys=True)
        assert json.loads(text) == result.document()

    def test_csv_has_header_and_rows(self, result):
        assert result.csv_header
        payload = render_csv(result).decode()
        lines = payload.splitlines()
        assert lines[0] == ",".join(result.csv_header)
        assert len(lines) == 1 + len(result.csv_rows)


class TestLedgerAggregation:
    def test_totals(self):
        cfg = validate_config(
            {"experiment": "teleport_identity", "m": 8, "trials": 10, "seed": 0}
        )
        doc = run_experiment(cfg).document()
        ledger = doc["ledger"]
        assert ledger["totals"]["runs"] == 10
        assert ledger["totals"]["classical_bits"] == 20
        assert ledger["totals"]["epr_pairs"] == 10
        assert ledger["totals"]["hidden_bits"] == 60
        assert len(ledger["entries"]) == 1
        assert ledger["entries"][0]["runs"] == 10
        assert ledger["entries"][0]["hidden_cost"] == 6

    def test_empty_ledger(self):
        cfg = validate_config({"experiment": "resolution_table", "m": 4, "trials": 0})
        doc = run_experiment(cfg).document()
        assert doc["ledger"]["entries"] == []
        assert doc["ledger"]["totals"]["runs"] == 0


class TestFilePlumbing:
    def test_artifact_name(self):
        cfg = ExperimentConfig("verify_bound", m=8, n=2, trials=100, seed=3)
        assert artifact_name(cfg) == "verify_bound_m8_n2_t100_s3.json"
        csv_cfg = ExperimentConfig("verify_bound", output_format="csv")
        assert artifact_name(csv_cfg) == "verify_bound_m16_n0_t1000_s0.csv"

    def test_explicit_output_path_wins(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "envdir"))
        cfg = ExperimentConfig("verify_bound", output_path=str(tmp_path / "here.json"))
        assert resolve_output_path(cfg) == tmp_path / "here.json"

    def test_env_dir_used_when_no_path(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
        cfg = ExperimentConfig("verify_bound", m=8, trials=10, seed=1)
        assert resolve_output_path(cfg) == tmp_path / "verify_bound_m8_n0_t10_s1.json"

    def test_default_is_working_directory(self, monkeypatch):
        monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)
        cfg = ExperimentConfig("verify_bound")
        assert resolve_output_path(cfg).parent == resolve_output_path(cfg).parent

    def test_run_writes_artifact_and_reports_pass(self, tmp_path):
        cfg = validate_config(
            {
                "experiment": "outcome_uniformity",
                "m": 4,
                "trials": 1000,
                "seed": 0,
                "out": str(tmp_path / "sub" / "artifact.json"),
            }
        )
        status, path = run(cfg)
        assert status == 0
        assert path == tmp_path / "sub" / "artifact.json"
        doc = json.loads(path.read_text())
        assert doc["schema_version"] == SCHEMA_VERSION

    def test_run_csv(self, tmp_path):
        cfg = validate_config(
            {
                "experiment": "resolution_table",
                "m": 8,
                "format": "csv",
                "out": str(tmp_path / "table.csv"),
            }
        )
        status, path = run(cfg)
        assert status == 0
        assert path.read_text().startswith("m,")


class TestDeterminism:
    @pytest.mark.parametrize(
        "experiment", ["outcome_uniformity", "verify_bound", "rsp_equatorial"]
    )
    def test_render_bytes_stable_across_runs(self, experiment):
        cfg = validate_config({"experiment": experiment, "m": 8, "trials": 400, "seed": 6})
        a = render_json(run_experiment(cfg))
        b = render_json(run_experiment(cfg))
        assert a == b

    def test_seed_changes_samples(self):
        base = {"experiment": "outcome_uniformity", "m": 8, "trials": 400}
        a = run_experiment(validate_config(dict(base, seed=1)))
        b = run_experiment(validate_config(dict(base, seed=2)))
        assert render_json(a) != render_json(b)

    def test_output_path_does_not_leak_into_bytes(self, tmp_path):
        base = {"experiment": "outcome_uniformity", "m": 8, "trials": 100, "seed": 4}
        a = render_json(run_experiment(validate_config(base)))
        b = render_json(
            run_experiment(validate_config(dict(base, out=str(tmp_path / "z.json"))))
        )
        assert a == b


class TestAllRunnersExecute:
    @pytest.mark.parametrize("experiment", EXPERIMENTS)
    def test_small_run_passes(self, experiment):
        cfg = validate_config(
            {"experiment": experiment, "m": 8, "n": 2, "trials": 600, "seed": 0}
        )
        result = run_experiment(cfg)
        assert result.passed, result.reports
        json.dumps(result.document())
