"""Structural tests for the SVG boxplot reports."""

import pytest

from sobolnoise.correction import NoiseSpec
from sobolnoise.harness import ExperimentConfig, run_experiment, run_preset
from sobolnoise.models import benchmark
from sobolnoise.plotting import emit_boxplot_svg


@pytest.fixture(scope="module")
def linear_table():
    return run_preset("linear2000", replicates=20)


class TestBoxplotSvg:
    def test_contains_box_groups_and_truth_markers(self, linear_table, tmp_path):
        """A linear run renders one box group per variable in each series
        and one truth marker per variable per panel (d = 4)."""
        path = tmp_path / "plot.svg"
        emit_boxplot_svg(linear_table, str(path))
        svg = path.read_text()
        for variable in ("x1", "x2", "x3", "x4"):
            assert f'id="box-main-raw-{variable}"' in svg
            assert f'id="box-main-corrected-{variable}"' in svg
            assert f'id="box-total-raw-{variable}"' in svg
            assert f'id="box-total-corrected-{variable}"' in svg
        assert svg.count('id="truth-main-') == 4
        assert svg.count('id="truth-total-') == 4
        # The virtual noise variable appears in the total panel only.
        assert 'id="box-total-raw-t"' in svg
        assert 'id="box-main-raw-t"' not in svg

    def test_single_replicate_rejected(self, tmp_path):
        table = run_preset("linear2000", replicates=1)
        with pytest.raises(ValueError, match="replicates"):
            emit_boxplot_svg(table, str(tmp_path / "plot.svg"))

    def test_deterministic_output(self, linear_table, tmp_path):
        p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
        emit_boxplot_svg(linear_table, str(p1))
        emit_boxplot_svg(linear_table, str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_noise_free_table_renders_single_series(self, tmp_path):
        table = run_experiment(
            ExperimentConfig(
                model=benchmark("linear"), budget=2000, noise=None, replicates=5
            )
        )
        path = tmp_path / "plain.svg"
        emit_boxplot_svg(table, str(path))
        svg = path.read_text()
        assert 'id="box-main-raw-x1"' in svg
        assert "box-main-corrected" not in svg

    def test_unwritable_path_raises(self, linear_table, tmp_path):
        with pytest.raises(OSError):
            emit_boxplot_svg(linear_table, str(tmp_path / "no" / "dir" / "plot.svg"))
