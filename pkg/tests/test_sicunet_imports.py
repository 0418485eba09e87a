from importlib import reload
from pathlib import Path

import sicunet
from sicunet import ScenarioConfig


def test_subpackages_reexported():
    reload(sicunet)

    for name in ("cli", "dsp", "evaluation", "models", "nn", "pipeline", "scenario", "sic"):
        assert hasattr(sicunet, name), f"{name} submodule should be accessible via sicunet"

    missing = [name for name in sicunet.__all__ if not hasattr(sicunet, name)]
    assert not missing, f"__all__ names without a binding: {missing}"


def test_subpackage_exports_resolve():
    from sicunet import cli, dsp, evaluation, models, nn, pipeline, scenario, sic

    for module in (cli, dsp, evaluation, models, nn, pipeline, scenario, sic):
        for name in module.__all__:
            assert hasattr(module, name), f"{module.__name__}.{name} is exported but missing"


def test_generate_scenario_wrapper(tmp_path: Path):
    config = ScenarioConfig(frame_len=256, interferer_sps_set=(16,), sir_bins_db=(0,), examples_per_bin=2, seed=3)

    dataset = sicunet.generate_scenario(config, tmp_path / "tiny.sicu")

    assert len(dataset) == 2
    restored = sicunet.read_dataset(tmp_path / "tiny.sicu")
    assert all(a.same_as(b) for a, b in zip(dataset, restored))


def test_report_study_wrapper(tmp_path: Path):
    matrices = {
        "sps": sicunet.confusion([0, 1], [0, 1], 2, class_labels=(16, 4)),
        "sir": sicunet.confusion([0, 0], [0, 0], 1),
        "method": sicunet.confusion([1, 0], [1, 1], 2, class_labels=("SIC", "SICU-Net")),
    }
    report = sicunet.EvalReport(confusion=matrices, example_count=2)
    path = sicunet.write_report(report, tmp_path / "report.json")

    written = sicunet.report_study(path, tmp_path / "out")

    assert (tmp_path / "out" / "accuracy.csv") in written
    assert sicunet.read_report(path).stage_accuracy("method").correct == 1
