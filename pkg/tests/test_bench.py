import numpy as np
import pytest
from pydantic import ValidationError

from src.core import config
from src.core.errors import ConfigError, ProfileMismatchError
from src.models import (BasisKind, BoundaryKind, InitialKind, ModelFamily, ModelId, Profile, ProfileNorm, RunManifest,
                        Scattering)
from src.output import CsvSink, MemorySink
from src.services import (builtin_configs, compare_profiles, load_config, read_profile, run_benchmark, run_model,
                          save_config)


def test_plane_source_builtin() -> None:
    cfg = load_config("plane_source")
    assert cfg.domain == (-1.2, 1.2)
    assert cfg.t_final == 1.0
    assert cfg.n_cells == 1000
    assert cfg.cfl == 0.9
    assert cfg.ic.kind is InitialKind.PLANE_SOURCE_DELTA
    assert cfg.ic.psi_vac == 0.5e-8
    assert cfg.bc_left.kind is cfg.bc_right.kind is BoundaryKind.VACUUM_ISO
    assert cfg.scattering is Scattering.LAPLACE_BELTRAMI
    x = np.array([-1.2, -0.3, 0.0, 1.1])
    np.testing.assert_array_equal(cfg.coefficient("sigma_s", x), 1.0)
    np.testing.assert_array_equal(cfg.coefficient("sigma_a", x), 0.0)
    np.testing.assert_array_equal(cfg.coefficient("q", x), 0.0)


def test_source_beam_builtin() -> None:
    cfg = load_config("source_beam")
    assert cfg.domain == (0.0, 3.0)
    assert cfg.t_final == 2.5
    assert cfg.bc_left.kind is BoundaryKind.BEAM
    assert cfg.bc_left.center == 1.0
    assert cfg.bc_left.width == 1e5
    assert cfg.bc_right.kind is BoundaryKind.VACUUM_ISO
    x = np.array([0.5, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0])
    np.testing.assert_array_equal(cfg.coefficient("sigma_s", x), [0, 0, 2, 2, 2, 2, 10, 10])
    np.testing.assert_array_equal(cfg.coefficient("sigma_a", x), [1, 1, 1, 1, 1, 1, 0, 0])
    np.testing.assert_array_equal(cfg.coefficient("q", x), [0, 0.5, 0.5, 0.5, 0, 0, 0, 0])


def test_builtins_are_fresh_objects() -> None:
    assert builtin_configs()["plane_source"] == builtin_configs()["plane_source"]
    assert builtin_configs()["plane_source"] is not builtin_configs()["plane_source"]


@pytest.mark.parametrize("name", ["plane_source", "source_beam"])
def test_save_and_load_round_trip(tmp_path, name: str) -> None:
    cfg = load_config(name)
    path = save_config(cfg, tmp_path / f"{name}.json")
    assert '"from"' in path.read_text(encoding="utf-8")
    assert load_config(path) == cfg


def test_malformed_json_reports_position(tmp_path) -> None:
    path = tmp_path / "broken.json"
    path.write_text('{\n  "domain": [0, 1],\n  "t_final": \n}', encoding="utf-8")
    with pytest.raises(ConfigError) as excinfo:
        load_config(path)
    assert "строка 4" in excinfo.value.detail
    assert excinfo.value.exit_code == 2


def test_json_must_be_an_object(tmp_path) -> None:
    path = tmp_path / "list.json"
    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(path)


def test_overlapping_segments_are_rejected(tmp_path) -> None:
    path = tmp_path / "overlap.json"
    path.write_text(
        '{"domain": [0, 2], "t_final": 1, "sigma_s": '
        '[{"from": 0, "to": 1, "value": 1}, {"from": 0.5, "to": 2, "value": 3}]}',
        encoding="utf-8",
    )
    with pytest.raises(ConfigError) as excinfo:
        load_config(path)
    assert "ключ sigma_s" in excinfo.value.detail


def test_invalid_values_name_the_key(tmp_path) -> None:
    path = tmp_path / "negative.json"
    path.write_text('{"domain": [0, 1], "t_final": -1}', encoding="utf-8")
    with pytest.raises(ConfigError) as excinfo:
        load_config(path)
    assert "ключ t_final" in excinfo.value.detail


def test_missing_config() -> None:
    with pytest.raises(ConfigError) as excinfo:
        load_config("no_such_problem")
    assert "plane_source" in excinfo.value.detail


def test_compare_profiles() -> None:
    x = 0.05 + 0.1 * np.arange(10)
    b = Profile(x=x, u0=np.ones(10))
    a = Profile(x=x, u0=np.ones(10) + 0.1)
    assert compare_profiles(b, b) == 0.0
    assert compare_profiles(a, b) == pytest.approx(0.1)
    assert compare_profiles(a, b, ProfileNorm.LINF) == pytest.approx(0.1)
    assert compare_profiles(a, b, ProfileNorm.L1, relative=True) == pytest.approx(0.1)
    assert compare_profiles(a, b, "linf", relative=True) == pytest.approx(0.1)


def test_compare_profiles_needs_same_mesh() -> None:
    with pytest.raises(ProfileMismatchError):
        compare_profiles(Profile(x=np.arange(3.0), u0=np.ones(3)), Profile(x=np.arange(4.0), u0=np.ones(4)))
    with pytest.raises(ProfileMismatchError):
        compare_profiles(Profile(x=np.arange(3.0), u0=np.ones(3)), Profile(x=np.arange(3.0) + 0.5, u0=np.ones(3)))


def test_read_profile(tmp_path) -> None:
    path = CsvSink(tmp_path).write_table("profile_M1", ("x", "u0", "u1"), [(0.25, 1.5, 0.1), (0.75, 2.5, -0.1)],
                                         comments=["model=M1", "manifest=0123"])
    profile = read_profile(path)
    assert profile.model == "M1"
    np.testing.assert_array_equal(profile.x, [0.25, 0.75])
    np.testing.assert_array_equal(profile.u0, [1.5, 2.5])
    assert path.read_text(encoding="utf-8").splitlines()[:3] == ["#model=M1", "#manifest=0123", "x,u0,u1"]


def test_read_profile_errors(tmp_path) -> None:
    with pytest.raises(ConfigError):
        read_profile(tmp_path / "missing.csv")
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        read_profile(path)


@pytest.mark.parametrize("text, family, order", [
    ("DMM2", ModelFamily.DMM, 2),
    ("mm1", ModelFamily.MM, 1),
    ("M3", ModelFamily.M, 3),
    ("PN99", ModelFamily.PN, 99),
])
def test_model_ids(text: str, family: ModelFamily, order: int) -> None:
    model = ModelId.parse(text)
    assert (model.family, model.order) == (family, order)
    assert str(model) == text.upper()
    assert model.is_linear is (family is ModelFamily.PN)


def test_model_bases() -> None:
    assert ModelId.parse("DMM2").basis.kind is BasisKind.DIFF_MIXED
    assert ModelId.parse("MM2").basis.n == 5
    assert ModelId.parse("PN7").basis.kind is BasisKind.LEGENDRE


@pytest.mark.parametrize("text", ["DMM3", "PN200", "PN0", "M4", "KN2", ""])
def test_unknown_models(text: str) -> None:
    with pytest.raises(ConfigError):
        ModelId.parse(text)


def test_manifest_validation(tmp_path) -> None:
    with pytest.raises(ValidationError):
        RunManifest(config="plane_source", models=[])
    with pytest.raises(ValidationError):
        RunManifest(config="plane_source", models=["DMM2", "Q1"])
    manifest = RunManifest(config="plane_source", models=["DMM2"], out_dir=tmp_path)
    assert manifest.quad_points == config.QUAD_POINTS
    assert len(manifest.digest()) == 16
    assert manifest.digest() == RunManifest(config="plane_source", models=["DMM2"], out_dir=tmp_path).digest()
    assert manifest.digest() != RunManifest(config="plane_source", models=["MM2"], out_dir=tmp_path).digest()


def test_run_model_dispatches_linear_models() -> None:
    cfg = load_config("plane_source").copy(update={"n_cells": 10, "t_final": 0.1})
    assert run_model(cfg, ModelId.parse("PN5")).model == "PN5"
    assert run_model(cfg, ModelId.parse("M1")).model == "M1"


def test_small_benchmark(tmp_path) -> None:
    manifest = RunManifest(config="plane_source", models=["DMM2", "PN3"], out_dir=tmp_path, n_cells=20)
    sink = MemorySink()
    results = run_benchmark(manifest, sink)
    assert set(results) == {"DMM2", "PN3"}
    assert set(sink.tables) == {"profile_DMM2", "diagnostics_DMM2", "profile_PN3", "diagnostics_PN3", "comparison"}
    header, rows, comments = sink.tables["comparison"]
    assert header == ("model_a", "model_b", "l1_rel", "linf_rel")
    assert [row[:2] for row in rows] == [("DMM2", "PN3")]
    assert rows[0][2] > 0
    assert comments == ("config=plane_source", f"manifest={manifest.digest()}", "seed=0")
    assert all(result.ledger.discrepancy(result.state.total_mass()) <= 1e-10 for result in results.values())


def test_benchmark_output_is_deterministic(tmp_path) -> None:
    manifest = RunManifest(config="plane_source", models=["M1", "PN2"], out_dir=tmp_path, n_cells=16, cfl=0.5)
    outputs = []
    for _ in range(2):
        run_benchmark(manifest)
        outputs.append({path.name: path.read_bytes() for path in tmp_path.iterdir()})
    assert set(outputs[0]) == {"profile_M1.csv", "diagnostics_M1.csv", "profile_PN2.csv", "diagnostics_PN2.csv",
                               "comparison.csv"}
    assert outputs[0] == outputs[1]


def test_seed_is_recorded_with_the_comparison(tmp_path) -> None:
    manifest = RunManifest(config="plane_source", models=["M1", "PN1"], out_dir=tmp_path, n_cells=8, seed=7)
    assert manifest.digest() != manifest.copy(update={"seed": 8}).digest()
    run_benchmark(manifest)
    lines = (tmp_path / "comparison.csv").read_text(encoding="utf-8").splitlines()
    assert lines[:3] == ["#config=plane_source", f"#manifest={manifest.digest()}", "#seed=7"]


def _distances(name: str, models, n_cells: int = 1000):
    manifest = RunManifest(config=name, models=list(models), n_cells=n_cells)
    sink = MemorySink()
    results = run_benchmark(manifest, sink)
    _, rows, _ = sink.tables["comparison"]
    return results, {(a, b): l1 for a, b, l1, _ in rows}


@pytest.mark.slow
def test_plane_source_acceptance() -> None:
    results, distance = _distances("plane_source", ["DMM2", "MM1", "MM2", "M1", "M2", "M3", "PN99"])
    for result in results.values():
        density = result.state.moments[:, 0]
        np.testing.assert_allclose(density, density[::-1], atol=1e-10 * density.max())
        assert result.ledger.discrepancy(result.state.total_mass()) <= 1e-10
    assert results["DMM2"].safeguard_total == 0
    assert distance[("DMM2", "MM2")] < distance[("DMM2", "MM1")]
    assert distance[("DMM2", "M2")] < distance[("DMM2", "M3")]


@pytest.mark.slow
def test_source_beam_acceptance() -> None:
    results, distance = _distances("source_beam", ["DMM2", "MM1", "M2", "M3"])
    for result in results.values():
        assert result.ledger.discrepancy(result.state.total_mass()) <= 1e-10
    assert distance[("MM1", "M2")] < distance[("MM1", "M3")]
    assert distance[("DMM2", "M3")] < distance[("DMM2", "M2")]
