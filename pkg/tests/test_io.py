import json

import numpy as np
import pytest

from curvecover.geometry import ParameterError
from curvecover.io_formats import (
    TrajectoryCSVFormat,
    equirectangular,
    export_result,
    load_ground_truth_csv,
    load_pose_csv,
    load_result,
    load_trajectories_csv,
    result_to_dict,
)
from curvecover.pipeline import ClusteringConfig, cluster

from conftest import DATA_DIR, smooth_walk


class TestLoadTrajectories:
    def test_bundled_tracks(self):
        curves = load_trajectories_csv(DATA_DIR / "tracks.csv")
        assert len(curves) == 5
        assert [c.curve_id for c in curves] == [f"d{i:04d}" for i in range(5)]
        assert all(c.dim == 2 for c in curves)

    def test_custom_columns(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("name,ee,nn\nA,0,0\nA,1,0\nB,5,5\nB,6,5\n")
        fmt = TrajectoryCSVFormat(id_col="name", coord_cols=("ee", "nn"))
        curves = load_trajectories_csv(p, fmt)
        assert [c.curve_id for c in curves] == ["A", "B"]

    def test_missing_column(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("id,x\nA,0\n")
        with pytest.raises(ParameterError, match="missing columns"):
            load_trajectories_csv(p)

    def test_non_numeric_cell_names_location(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("id,x,y\nA,0,0\nA,oops,1\n")
        with pytest.raises(ParameterError, match="row 3.*'x'"):
            load_trajectories_csv(p)

    def test_degenerate_curve_skipped_with_warning(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("id,x,y\nA,1,1\nA,1,1\nB,0,0\nB,1,1\n")
        with pytest.warns(UserWarning, match="skipping curve 'A'"):
            curves = load_trajectories_csv(p)
        assert [c.curve_id for c in curves] == ["B"]

    def test_empty_file(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("")
        with pytest.raises(ParameterError, match="empty"):
            load_trajectories_csv(p)

    def test_lonlat_projection(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("id,x,y\nA,13.40,52.52\nA,13.41,52.52\n")
        curves = load_trajectories_csv(p, TrajectoryCSVFormat(lonlat=True))
        # ~0.01 degree of longitude at 52.5N is about 677 m
        assert curves[0].length == pytest.approx(677, rel=0.01)


def test_equirectangular_origin_and_scale():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    xy = equirectangular(pts, origin=np.array([0.0, 0.0]))
    np.testing.assert_allclose(xy[0], [0.0, 0.0])
    assert xy[1, 0] == pytest.approx(111194.9, rel=1e-4)  # one degree
    assert xy[2, 1] == pytest.approx(111194.9, rel=1e-4)


class TestLoadPose:
    def test_bundled_poses(self):
        pose = load_pose_csv(DATA_DIR / "poses.csv")
        assert pose.curve_id == "pose"
        assert pose.dim == 6
        assert pose.vertices.shape[0] == 160

    def test_headerless(self, tmp_path):
        p = tmp_path / "p.csv"
        p.write_text("0,0,0\n1,0,0\n2,0,0\n")
        pose = load_pose_csv(p)
        assert pose.dim == 3

    def test_ragged_rejected(self, tmp_path):
        p = tmp_path / "p.csv"
        p.write_text("0,0,0\n1,0\n")
        with pytest.raises(ParameterError, match="ragged"):
            load_pose_csv(p)

    def test_bad_width_rejected(self, tmp_path):
        p = tmp_path / "p.csv"
        p.write_text("0,0\n1,0\n")
        with pytest.raises(ParameterError, match="divisible by 3"):
            load_pose_csv(p)


def test_load_ground_truth_sorted(tmp_path):
    p = tmp_path / "g.csv"
    p.write_text("frame_index,label\n1,b\n0,a\n2,c\n")
    assert load_ground_truth_csv(p) == ["a", "b", "c"]


class TestExport:
    @pytest.fixture
    def result(self, rng):
        curves = [smooth_walk(rng, 15, curve_id=f"c{i}") for i in range(2)]
        return cluster(curves, ClusteringConfig.theory(0.5))

    def test_json_round_trip(self, result, tmp_path):
        out = tmp_path / "r.json"
        export_result(result, out)
        data = load_result(out)
        assert set(data) == {"meta", "result"}
        r = data["result"]
        assert r["curves"] == ["c0", "c1"]
        assert r["stop_reason"] == "full-coverage"
        assert len(r["centers"]) == len(result.clusters)
        assert r["covered_fraction"] == pytest.approx(1.0)
        # centers carry their geometry and coverage
        c0 = r["centers"][0]
        assert c0["rank"] == 0
        assert len(c0["vertices"]) >= 2
        assert c0["coverage"]

    def test_json_meta_excluded_from_determinism(self, result, tmp_path):
        a = result_to_dict(result)
        b = result_to_dict(result)
        assert a["result"] == b["result"]
        assert "generated_at" in a["meta"]

    def test_geojson(self, result, tmp_path):
        out = tmp_path / "r.geojson"
        export_result(result, out, format="geojson")
        with open(out) as f:
            gj = json.load(f)
        assert gj["type"] == "FeatureCollection"
        roles = {f["properties"]["role"] for f in gj["features"]}
        assert roles == {"center", "coverage"}

    def test_geojson_rejects_high_dim(self, rng, tmp_path):
        pose = load_pose_csv(DATA_DIR / "poses.csv")
        res = cluster([pose], ClusteringConfig.theory(0.5))
        with pytest.raises(ParameterError, match="planar"):
            export_result(res, tmp_path / "x.geojson", format="geojson")

    def test_unknown_format(self, result, tmp_path):
        with pytest.raises(ValueError):
            export_result(result, tmp_path / "x", format="xml")
