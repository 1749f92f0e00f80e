from dagbias.analysis import analyze
from dagbias.model import load_sample
from dagbias.report import analysis_records, draw_diagram, layered_layout, render_report


class TestLayout:
    def test_columns_follow_depth(self, diabetes):
        pos = layered_layout(diabetes.graph)
        for u, v in diabetes.graph.directed_edges:
            assert pos[u][0] < pos[v][0]

    def test_deterministic(self, diabetes):
        assert layered_layout(diabetes.graph) == layered_layout(diabetes.graph)

    def test_every_vertex_placed(self, coffee):
        pos = layered_layout(coffee.graph)
        assert set(pos) == set(coffee.graph.vertices)


class TestRecords:
    def test_records_cover_everything(self, diabetes):
        result = analyze(diabetes, adjusted_override=frozenset({"MD"}))
        rows = analysis_records(result)
        keys = [k for k, _ in rows]
        for expected in (
            "exposure",
            "outcome",
            "adjusted",
            "adjustment-criterion",
            "witness",
            "biasing-edge",
            "adjustment-set",
            "truncated",
            "no-adjustment-exists",
        ):
            assert expected in keys
        assert rows[keys.index("adjusted")][1] == "MD"

    def test_values_never_contain_tabs(self, coffee):
        result = analyze(coffee)
        for key, value in analysis_records(result):
            assert "\t" not in key and "\t" not in value


class TestRendering:
    def test_files_written(self, tmp_path, diabetes):
        result = analyze(diabetes)
        written = render_report(result, tmp_path, "study")
        assert [p.name for p in written] == ["study.txt", "study.png"]
        assert all(p.stat().st_size > 0 for p in written)

    def test_draw_runs_on_axes(self, admission):
        import matplotlib.pyplot as plt

        result = analyze(admission, adjusted_override=frozenset({"H"}))
        fig, ax = plt.subplots()
        draw_diagram(result, ax)
        plt.close(fig)
