import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncshock.harness import (ExactRiemann, RunConfig, RunError, SchemeName, Snapshot, TrigData,
                             builtin_test, count_sign_changes, histogram_study, l1_error, locate_jump,
                             resample_to_fixed_grid, run, shock_positions, transition_cells, write_run)
from ncshock.harness import config as cfgmod
from ncshock.harness.analysis import fixed_edges, relative_drift, spike_diagnostics
from ncshock.harness.cli import main
from ncshock.harness.runner import read_run
from ncshock.harness.study import histogram_config, parse_scheme_spec, realization
from ncshock.model import ModelParams, State
from ncshock.scheme import Boundary, MeshSignPolicy

P1 = ModelParams(1.0, 2.0 / 3.0)


def small(test_id="1", **kw):
    return builtin_test(test_id).with_overrides(**kw)


class TestConfig:
    @pytest.mark.parametrize("tid", cfgmod.TEST_IDS)
    def test_yaml_round_trip(self, tid):
        for scheme in SchemeName:
            cfg = builtin_test(tid, scheme.value)
            assert RunConfig.loads(cfg.dumps()) == cfg

    @settings(max_examples=40)
    @given(st.floats(0.05, 0.5), st.integers(4, 5000), st.floats(1e-3, 10.0),
           st.sampled_from(list(MeshSignPolicy)), st.floats(0.01, 0.5),
           st.lists(st.floats(-5, 5, allow_subnormal=False), min_size=2, max_size=2))
    def test_round_trip_property(self, cfl, n, t_final, policy, margin, state):
        cfg = small(cfl=cfl, n_cells=n, t_final=t_final, mesh_sign_policy=policy,
                    mesh_speed_margin=margin, snapshot_times=(t_final / 3.0,),
                    initial=cfgmod.riemann_initial(State(*state), State(1.0, 2.0)))
        assert RunConfig.loads(cfg.dumps()) == cfg

    def test_save_load(self, tmp_path):
        cfg = builtin_test("4", "Glimm")
        cfg.save(tmp_path / "c.yaml")
        assert RunConfig.load(tmp_path / "c.yaml") == cfg

    def test_unknown_key(self):
        d = builtin_test("1").to_dict()
        d["cfll"] = 0.4
        with pytest.raises(ValueError, match="cfll"):
            RunConfig.from_dict(d)

    def test_bad_initial_kind(self):
        d = builtin_test("1").to_dict()
        d["initial_kind"] = "spline"
        with pytest.raises(ValueError):
            RunConfig.from_dict(d)

    def test_validation(self):
        with pytest.raises(ValueError):
            small(n_cells=3)
        with pytest.raises(ValueError):
            small(t_final=0.0)
        with pytest.raises(ValueError):
            small(snapshot_times=(1.0,))
        with pytest.raises(ValueError):
            small(scheme="Glimm", cfl=0.6)

    def test_classical_detection_follows_scheme(self):
        assert small(scheme="RecNC+C").scheme_config.detect_classical
        assert not small(scheme="RecNC").scheme_config.detect_classical

    def test_scheme_names(self):
        assert SchemeName.parse("recnc+c") is SchemeName.REC_NCC
        assert SchemeName.parse("glimm") is SchemeName.GLIMM
        with pytest.raises(ValueError):
            SchemeName.parse("weno")

    def test_overrides(self):
        cfg = small(cfl=0.3, seed=4, mesh_sign_policy=MeshSignPolicy.FIXED_NEGATIVE)
        assert cfg.scheme_config.cfl == 0.3 and cfg.seed == 4
        assert cfg.scheme_config.mesh_sign_policy is MeshSignPolicy.FIXED_NEGATIVE

    def test_output_times(self):
        assert builtin_test("4").output_times == (0.015, 0.06, 0.1, 1.0)
        assert builtin_test("1").output_times == (0.038,)

    def test_builtin_values(self):
        t1 = builtin_test("1")
        assert t1.model == ModelParams(1.0, 2.0 / 3.0) and t1.n_cells == 200 and t1.t_final == 0.038
        assert t1.initial.values == ((-10.0, -6.0), (110.0, 9.0))
        t3 = builtin_test("3b")
        assert t3.model.m == 2.0 and t3.initial.values[0] == (1.0, 1.05)
        # 600 cells per unit length
        assert t3.n_cells / (t3.x_hi - t3.x_lo) == 600
        t5 = builtin_test("5")
        assert t5.model == ModelParams(0.05, 1.0) and t5.boundary is Boundary.PERIODIC

    def test_unknown_test(self):
        with pytest.raises(ValueError):
            builtin_test("6")

    def test_test5_means(self):
        # exact rational means of the three plateaus over one period
        widths = [Fraction(3, 10), Fraction(2, 3), Fraction(1, 30)]
        values = [(Fraction(3, 10), Fraction(2, 5)), (Fraction(3, 20), Fraction(-1, 5)),
                  (Fraction(1, 10), Fraction(2, 5))]
        v_mean = sum(wd * v for wd, (v, _) in zip(widths, values))
        w_mean = sum(wd * w for wd, (_, w) in zip(widths, values))
        assert w_mean == 0 and v_mean == Fraction(29, 150)
        from ncshock.harness.runner import initial_grid
        mv, mw = initial_grid(builtin_test("5")).mass()
        assert mv == pytest.approx(float(v_mean), abs=1e-14)
        assert abs(mw) <= 1e-14

    def test_trig(self):
        d = TrigData(0.0, 3.0, 1.0, 1.0, 3.0, 4.0)
        v, w = d(np.array([0.0, 0.25]))
        np.testing.assert_allclose(v, [0.0, 3.0], atol=1e-15)
        np.testing.assert_allclose(w, [4.0, 4.0], atol=1e-14)


def _snap(values, left=0.0, dx=0.25, period=None):
    values = np.asarray(values, dtype=float)
    return Snapshot(0.0, left, dx, values.copy(), values.copy(), 0.0, period)


class TestResample:
    def test_identity(self):
        s = _snap([1.0, 2.0, 3.0, 4.0])
        v, w = resample_to_fixed_grid(s, fixed_edges(0.0, 1.0, 4))
        assert np.array_equal(v, s.v) and np.array_equal(w, s.w)

    def test_half_offset(self):
        s = _snap([1.0, 2.0, 3.0, 4.0], left=0.125)
        v, _ = resample_to_fixed_grid(s, fixed_edges(0.125 + 0.125, 0.875 + 0.125, 3))
        np.testing.assert_allclose(v, [1.5, 2.5, 3.5], rtol=1e-15)

    def test_periodic_wrap(self):
        s = _snap([1.0, 2.0, 3.0, 4.0], left=0.625, period=1.0)
        # wrapped onto [0, 1) the cells start at -0.125 and read 2, 3, 4, 1
        v, _ = resample_to_fixed_grid(s, fixed_edges(0.0, 1.0, 4))
        np.testing.assert_allclose(v, [2.5, 3.5, 2.5, 1.5], rtol=1e-15)

    @settings(max_examples=50)
    @given(st.integers(0, 10_000), st.floats(0.0, 1.0))
    def test_conserves_on_periodic_grid(self, seed, shift):
        rng = np.random.default_rng(seed)
        vals = rng.normal(size=50)
        s = _snap(vals, left=shift, dx=0.02, period=1.0)
        v, _ = resample_to_fixed_grid(s, fixed_edges(0.0, 1.0, 37))
        assert np.sum(v) / 37 == pytest.approx(np.sum(vals) / 50, abs=1e-13)


class TestMetrics:
    def test_l1_of_exact_projection(self):
        ex = ExactRiemann(P1, State(6.0, 1.0), State(-10.0, 2.0), 0.15)
        edges = fixed_edges(-1.0, 1.0, 200)
        v, w = ex.project(edges)
        s = Snapshot(0.15, -1.0, 0.01, v, w)
        assert max(l1_error(s, ex)) <= 1e-10

    def test_l1_constant(self):
        ex = ExactRiemann(P1, State(1.0, 1.0), State(1.0, 1.0), 0.1)
        s = Snapshot(0.1, 0.0, 0.1, np.ones(10), np.ones(10))
        assert l1_error(s, ex) == (0.0, 0.0)

    def test_l1_known_offset(self):
        ex = ExactRiemann(P1, State(1.0, 1.0), State(1.0, 1.0), 0.1)
        s = Snapshot(0.1, 0.0, 0.1, np.full(10, 1.5), np.ones(10))
        assert l1_error(s, ex)[0] == pytest.approx(0.5)

    def test_rarefaction_mean_matches_quadrature(self):
        # a fan containing a rarefaction; compare with brute-force midpoint sums
        ex = ExactRiemann(ModelParams(1.0, 0.75), State(0.0, 1.0), State(-1.0, 0.5), 0.2)
        fine = np.linspace(-0.6, 0.6, 240_001)
        mid = 0.5 * (fine[1:] + fine[:-1])
        pv, pw = ex(mid)
        for lo, hi in [(-0.6, -0.1), (-0.5, 0.4), (0.1, 0.6)]:
            sel = (mid > lo) & (mid < hi)
            assert ex.mean(lo, hi)[0] == pytest.approx(np.mean(pv[sel]), abs=1e-6)
            assert ex.mean(lo, hi)[1] == pytest.approx(np.mean(pw[sel]), abs=1e-6)

    def test_shock_positions_test1(self):
        res = run(builtin_test("1"))
        pos = shock_positions(res.final)
        assert len(pos) == 1
        assert pos[0] == pytest.approx(-8.0 * 0.038, abs=res.final.dx)

    def test_no_sign_change(self):
        s = _snap([0.1, 0.2, 0.3, 0.4])
        assert shock_positions(s) == [] and count_sign_changes(s) == 0

    def test_sign_change_counts(self):
        s = _snap([0.1, -0.2, -0.3, 0.4, 0.5, -0.1, -0.2, 0.1], dx=0.125, period=1.0)
        assert count_sign_changes(s) == 4
        assert count_sign_changes(s, circular=True) == 4
        s2 = _snap([0.1, -0.2, -0.3, 0.4, 0.5, -0.1, -0.2, -0.1], dx=0.125, period=1.0)
        assert count_sign_changes(s2) == 3
        assert count_sign_changes(s2, circular=True) == 4

    def test_locate_jump(self):
        s = _snap([1.0, 1.0, 0.4, 0.0, 0.0], dx=0.1)
        assert locate_jump(s, 0.0, 0.5, 1.0, 0.0) == pytest.approx(0.24)

    def test_transition_cells(self):
        s = _snap([1.0, 1.0, 0.4, 0.3, 0.0, 0.0], dx=0.1)
        assert transition_cells(s, 0.0, 0.6, 1.0, 0.0) == 2

    def test_spike(self):
        s = _snap([0.0, 0.0, 2.0, 1.0, 1.0], dx=0.1)
        sp = spike_diagnostics(s, 0.0, 0.5, 0.0, 1.0)
        assert sp.height == pytest.approx(1.0) and sp.width == 1

    def test_relative_drift(self):
        assert relative_drift((1.0, 2.0), (1.0, 2.0), (1.0, 1.0)) == (0.0, 0.0)


class TestRun:
    def test_snapshots_hit_requested_times(self):
        cfg = small("2", snapshot_times=(0.05, 0.1))
        res = run(cfg)
        assert [s.time for s in res.snapshots] == [0.05, 0.1, 0.15]
        assert res.metadata["n_steps"] > 0 and res.metadata["scheme"] == "RecNC"

    def test_schemes_all_run(self):
        for scheme in SchemeName:
            res = run(small("2", scheme=scheme.value, n_cells=40))
            assert res.final.time == 0.15
            assert np.all(np.isfinite(res.final.w))

    def test_deterministic_output(self, tmp_path):
        cfg = small("2", scheme="Glimm", n_cells=40, seed=3)
        write_run(run(cfg), tmp_path / "a")
        write_run(run(cfg), tmp_path / "b")
        for name in ("run.json", "snap00_t0.15.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_read_back(self, tmp_path):
        res = run(small("1"))
        write_run(res, tmp_path)
        meta, snaps = read_run(tmp_path)
        assert np.array_equal(snaps[0].w, res.final.w) and snaps[0].left_edge == res.final.left_edge
        assert meta["config"]["name"] == "test1"

    def test_failure_wrapped(self, monkeypatch):
        from ncshock.harness import runner
        from ncshock.scheme import SchemeError

        def broken(config):
            def step(grid, dt_max):
                raise SchemeError("solver failed")
            return step

        monkeypatch.setattr(runner, "make_stepper", broken)
        with pytest.raises(RunError, match="step 0"):
            run(small("1"))


class TestStudy:
    def test_scheme_spec(self):
        assert parse_scheme_spec("Glimm:8") == (SchemeName.GLIMM, 8)
        assert parse_scheme_spec("RecNC") == (SchemeName.REC_NC, 1)

    def test_single_realization(self, tmp_path):
        cfg = histogram_config(n_cells=64, t_final=0.5)
        res = histogram_study(cfg, 1, seed_base=7)
        assert len(res.rows) == 1 and res.rows[0].seed == 7
        res.write_csv(tmp_path / "h.csv")
        lines = (tmp_path / "h.csv").read_text().splitlines()
        assert len(lines) == 3 and lines[-1].startswith("# occurrences")

    def test_reproducible_csv(self, tmp_path):
        cfg = histogram_config(n_cells=64, t_final=0.5)
        histogram_study(cfg, 3, seeds=[1, 2, 3]).write_csv(tmp_path / "a.csv")
        histogram_study(cfg, 3, seeds=[1, 2, 3]).write_csv(tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_realization_reads_sign_changes(self):
        r = realization(histogram_config(n_cells=64, t_final=0.5), 0)
        assert r.n_sign_changes % 2 == 0 and 0.0 <= r.first_shock < 1.0

    def test_seed_count_mismatch(self):
        with pytest.raises(ValueError):
            histogram_study(histogram_config(64, 0.5), 2, seeds=[1])


class TestCli:
    def test_riemann(self, capsys):
        assert main(["riemann", "--left=-10,-6", "--right=110,9", "--m", "1",
                     "--beta", "0.6666666666666666", "--sample", "-8.5"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert len(out["waves"]) == 1 and out["waves"][0]["kind"] == "NonclassicalShock"
        assert out["sample"]["state"] == [-10.0, -6.0]

    def test_run(self, tmp_path, capsys):
        assert main(["run", "--test", "1", "--out", str(tmp_path)]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["snapshots"] == [0.038]
        assert RunConfig.load(tmp_path / "config.yaml").n_cells == 200

    def test_config_then_run_from_file(self, tmp_path, capsys):
        assert main(["config", "--test", "2"]) == 0
        (tmp_path / "c.yaml").write_text(capsys.readouterr().out)
        assert main(["run", "--config", str(tmp_path / "c.yaml"), "--cells", "40",
                     "--out", str(tmp_path / "o")]) == 0

    def test_compare(self, tmp_path, capsys):
        assert main(["compare", "--test", "2", "--schemes", "RecNC,Godunov", "--cells", "40",
                     "--out", str(tmp_path)]) == 0
        assert (tmp_path / "compare_t0.15.csv").exists()

    def test_histogram(self, tmp_path, capsys):
        assert main(["histogram", "--n", "2", "--cells", "64", "--t-final", "0.5",
                     "--out", str(tmp_path)]) == 0
        assert json.loads(capsys.readouterr().out)["realizations"] == 2

    @pytest.mark.parametrize("argv", [
        ["run"],
        ["run", "--test", "1", "--scheme", "weno"],
        ["run", "--test", "1", "--cells", "2"],
        ["riemann", "--left", "1", "--right", "1,1", "--m", "1", "--beta", "1"],
        ["riemann", "--left", "0,1", "--right", "1,1", "--m", "-1", "--beta", "1"],
        ["histogram", "--test", "4"],
    ])
    def test_bad_arguments(self, argv, capsys):
        try:
            code = main(argv)
        except SystemExit as exc:
            # argparse rejects malformed options itself
            code = exc.code
        assert code != 0
        assert capsys.readouterr().err
