"""Tests for error metrics, sweeps and decay fits."""

import json

import numba
import numpy as np
import pytest
from pydantic import ValidationError

from lattice_approx.core.config import Config, IndexSetConfig
from lattice_approx.core.exceptions import (
    DegenerateReferenceError,
    InsufficientDataError,
    PreconditionError,
    SpecParseError,
)
from lattice_approx.core.experiments import (
    CSV_COLUMNS,
    FINE_ETA_GRID,
    UNDEFINED,
    ExperimentRecord,
    RecordWriter,
    SweepConfig,
    best_eta,
    compare_to_reference,
    decay_table,
    default_window,
    expand_methods,
    fit_decay_rate,
    points_digest,
    read_records,
    relative_error,
    run_sweep,
    uniform_points,
)
from lattice_approx.core.reference import load_reference


def synthetic(method, Ns, rate, scale=1.0, d=1, eta=None):
    return [ExperimentRecord(method=method, d=d, N=N, eta=eta, eps2=scale * N**rate) for N in Ns]


class NanAtOrigin:
    """All-ones function that is NaN at the origin, a node of every lattice."""

    def __call__(self, y):
        values = np.ones(y.shape[0])
        values[np.all(y == 0.0, axis=1)] = np.nan
        return values

    def __repr__(self):
        return "NanAtOrigin()"


class TestRelativeError:
    """Test the relative error metrics."""

    def test_two_norm(self):
        h = np.array([3.0, 4.0])
        assert relative_error(h, np.array([3.0, 3.0])) == pytest.approx(0.2)

    def test_max_norm(self):
        h = np.array([1.0, -2.0, 4.0])
        s = np.array([1.5, -2.0, 3.0])
        assert relative_error(h, s, np.inf) == pytest.approx(0.25)
        assert relative_error(h, s, "inf") == pytest.approx(0.25)

    def test_complex_approximant(self):
        assert relative_error(np.array([1.0]), np.array([1.0 + 1e-3j])) == pytest.approx(1e-3)

    def test_weights(self):
        h = np.array([1.0, 1.0])
        s = np.array([1.0, 2.0])
        assert relative_error(h, s, np.inf, weights=[1.0, 0.5]) == pytest.approx(0.5)

    def test_zero_reference(self):
        with pytest.raises(DegenerateReferenceError):
            relative_error(np.zeros(3), np.ones(3))

    def test_bad_input(self):
        with pytest.raises(PreconditionError):
            relative_error(np.ones(3), np.ones(2))
        with pytest.raises(PreconditionError):
            relative_error(np.ones(3), np.ones(3), p=1)


class TestUniformPoints:
    """Test seeded evaluation points."""

    def test_deterministic(self):
        a = uniform_points(500, 3, seed=7)
        b = uniform_points(500, 3, seed=7)
        np.testing.assert_array_equal(a, b)
        assert points_digest(a) == points_digest(b)
        assert points_digest(a) != points_digest(uniform_points(500, 3, seed=8))

    def test_shape_and_range(self):
        pts = uniform_points(1000, 2, seed=1)
        assert pts.shape == (1000, 2)
        assert np.all((pts >= 0.0) & (pts < 1.0))

    def test_margin(self):
        pts = uniform_points(2000, 2, seed=1, margin=0.05)
        assert np.all((pts >= 0.05) & (pts <= 0.95))

    def test_invalid(self):
        with pytest.raises(PreconditionError):
            uniform_points(0, 2, seed=1)
        with pytest.raises(PreconditionError):
            uniform_points(10, 0, seed=1)


class TestSweepConfig:
    """Test sweep parameter validation and method expansion."""

    def test_defaults(self):
        cfg = SweepConfig(d=1, N_values=[1, 2, 3])
        assert cfg.methods == ["cos", "cheb", "log", "erf"]
        assert cfg.eta_values() == [2.0, 2.5, 4.0]
        assert cfg.R == 100_000

    def test_fine_eta_grid(self):
        cfg = SweepConfig(d=1, N_values=[4], eta_grid="fine")
        assert cfg.eta_values() == list(FINE_ETA_GRID)
        assert FINE_ETA_GRID[0] == 2.0 and FINE_ETA_GRID[-1] == 4.0
        assert 2.5 in FINE_ETA_GRID and len(FINE_ETA_GRID) == 21

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(d=0, N_values=[1]),
            dict(d=1, N_values=[]),
            dict(d=1, N_values=[0, 1]),
            dict(d=1, N_values=[1], etas=[-1.0]),
            dict(d=1, N_values=[1], methods=[]),
            dict(d=1, N_values=[1], format="xml"),
            dict(d=1, N_values=[1], strategy="lucky"),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            SweepConfig(**kwargs)

    def test_expand_methods(self):
        methods = expand_methods(["cos", "log", "log:eta=2", "erf:eta=3"], 2, [2.0, 4.0])
        assert [m.label() for m in methods] == ["cos", "log:eta=2", "log:eta=4", "erf:eta=3"]
        assert all(m.dim == 2 for m in methods)

    def test_expand_without_etas(self):
        with pytest.raises(SpecParseError):
            expand_methods(["erf"], 1, [])


class TestRecords:
    """Test record serialization."""

    def make(self, **overrides):
        fields = dict(
            method="cheb",
            d=1,
            N=17,
            card_I=18,
            M=37,
            z=(1,),
            R=1000,
            seed=1,
            eps2=2.5e-4,
            epsinf=1.25e-3,
        )
        fields.update(overrides)
        return ExperimentRecord(**fields)

    def test_csv_row(self):
        row = self.make().to_csv_row()
        assert len(row) == len(CSV_COLUMNS) == 13
        assert row[:9] == ["cheb", "1", "17", "18", "37", "1", "", "1000", "1"]
        assert float(row[9]) == 2.5e-4
        assert row[11] == "" and row[12] == ""

    def test_undefined_max_error(self):
        record = self.make(method="erf:eta=2.5", eta=2.5, epsinf=None, epsinf_undefined=True)
        row = record.to_csv_row()
        assert row[6] == "2.5"
        assert row[10] == UNDEFINED
        assert record.to_dict()["epsinf"] == UNDEFINED

    def test_weighted_max_error_fills_epsinf_column(self):
        record = self.make(method="erf:eta=2.5", eta=2.5, epsinf=None, epsinf_weighted=3e-3)
        assert float(record.to_csv_row()[10]) == 3e-3

    def test_failed_record(self):
        record = self.make(eps2=None, epsinf=None, error="no lattice")
        assert not record.ok
        assert record.to_csv_row()[12] == "no lattice"

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_write_and_read(self, tmp_path, fmt):
        records = [
            self.make(),
            self.make(method="erf:eta=2.5", eta=2.5, z=(1, 7), d=2, epsinf=None, epsinf_undefined=True),
            self.make(eps2=None, epsinf=None, error="failed, badly"),
        ]
        path = tmp_path / f"records.{fmt}"
        with RecordWriter(path, fmt) as writer:
            for r in records:
                writer.write(r)

        loaded = read_records(path)
        assert [r.method for r in loaded] == [r.method for r in records]
        assert loaded[1].z == (1, 7)
        assert loaded[1].eta == 2.5
        assert loaded[1].epsinf_undefined
        assert loaded[0].eps2 == pytest.approx(2.5e-4, rel=1e-9)
        assert loaded[2].error == "failed, badly"

    def test_csv_header(self, tmp_path):
        path = tmp_path / "records.csv"
        with RecordWriter(path) as writer:
            writer.write(self.make())
        assert path.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)

    def test_json_lines_keep_extra_fields(self, tmp_path):
        path = tmp_path / "records.jsonl"
        with RecordWriter(path, "json") as writer:
            writer.write(self.make(points_sha256="abc"))
        data = json.loads(path.read_text().splitlines()[0])
        assert data["points_sha256"] == "abc"
        assert set(CSV_COLUMNS) <= set(data)

    def test_read_empty_and_foreign(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        assert read_records(empty) == []
        foreign = tmp_path / "foreign.csv"
        foreign.write_text("a,b\n1,2\n")
        with pytest.raises(PreconditionError):
            read_records(foreign)


class TestDecayFit:
    """Test decay-rate fitting."""

    def test_exact_power_law(self):
        records = synthetic("cos", range(10, 41), -1.5, scale=3.0)
        assert fit_decay_rate(records) == pytest.approx(-1.5)
        assert fit_decay_rate(records, (10, 20)) == pytest.approx(-1.5)

    def test_default_window(self):
        assert default_window([1, 140]) == (71, 140)
        assert default_window(range(1, 10)) == (5, 9)

    def test_window_restricts_fit(self):
        records = synthetic("cos", range(1, 10), -1.0) + synthetic("cos", range(10, 20), -3.0, scale=10**2)
        assert fit_decay_rate(records, (10, 19)) == pytest.approx(-3.0)

    def test_needs_three_distinct_n(self):
        records = synthetic("cheb", [4, 8], -2.0) + synthetic("cheb", [8], -2.0)
        with pytest.raises(InsufficientDataError) as exc_info:
            fit_decay_rate(records, (1, 10))
        assert exc_info.value.got == 2

    def test_failed_and_zero_records_are_skipped(self):
        records = synthetic("cheb", [4, 8, 16], -2.0)
        records.append(ExperimentRecord(method="cheb", d=1, N=32, error="boom"))
        records.append(ExperimentRecord(method="cheb", d=1, N=64, eps2=0.0))
        assert fit_decay_rate(records, (1, 64)) == pytest.approx(-2.0)

    def test_decay_table(self):
        records = (
            synthetic("cos", [10, 20, 40], -1.5)
            + synthetic("cheb", [10, 20, 40], -2.5)
            + synthetic("log:eta=2", [10, 40], -1.0)
        )
        fits = {f.method: f for f in decay_table(records, (1, 100))}
        assert fits["cos"].rate == pytest.approx(-1.5)
        assert fits["cheb"].rate == pytest.approx(-2.5)
        assert fits["cheb"].points == 3
        assert fits["log:eta=2"].rate is None
        assert fits["log:eta=2"].error

    def test_decay_table_without_data(self):
        with pytest.raises(InsufficientDataError):
            decay_table([ExperimentRecord(method="cos", d=1, N=3, error="x")])


class TestBestEta:
    """Test the eta comparison."""

    def test_picks_smallest_error_at_largest_common_n(self):
        records = (
            synthetic("erf:eta=2", [5, 10, 20], -1.9, eta=2.0)
            + synthetic("erf:eta=2.5", [5, 10, 20], -2.5, eta=2.5)
            + synthetic("erf:eta=4", [5, 10], -2.5, scale=0.1, eta=4.0)
            + synthetic("log:eta=2", [5, 10], -1.0, eta=2.0)
            + synthetic("log:eta=4", [5, 10], -2.25, eta=4.0)
        )
        results = {r.family: r for r in best_eta(records)}
        assert results["erf"].N == 10
        assert results["erf"].eta == 4.0
        assert set(results["erf"].candidates) == {2.0, 2.5, 4.0}
        assert results["log"].eta == 4.0

    def test_ignores_other_methods(self):
        assert best_eta(synthetic("cheb", [5, 10], -2.0)) == []


class TestReference:
    """Test the bundled reference values."""

    def test_values(self):
        ref = load_reference()
        assert ref.dims() == [1, 2, 4, 7]
        assert ref.value(1, "cheb", 49) == pytest.approx(1.6940e-05)
        assert ref.value(7, "erf:eta=2.5", 40) == pytest.approx(3.3234e-04)
        assert ref.value(1, "cheb", 50) is None
        assert ref.rate("cos") == -1.5
        assert ref.rate("cheb") == -2.45

    def test_compare(self):
        records = [
            ExperimentRecord(method="cheb", d=1, N=49, eps2=2 * 1.6940e-05),
            ExperimentRecord(method="cheb", d=1, N=48, eps2=1e-5),
        ]
        (match,) = compare_to_reference(records)
        assert match.N == 49
        assert match.ratio == pytest.approx(2.0)


class TestRunSweep:
    """Test sweeps end to end on small problems."""

    def config(self, tmp_path, **overrides):
        fields = dict(
            methods=["cos", "cheb", "erf:eta=2.5", "log"],
            d=1,
            N_values=[2, 4, 8],
            etas=[4.0],
            R=300,
            seed=5,
            output=str(tmp_path / "sweep.csv"),
        )
        fields.update(overrides)
        return SweepConfig(**fields)

    def test_records(self, tmp_path):
        records = run_sweep(self.config(tmp_path))
        assert len(records) == 12
        assert [(r.N, r.method) for r in records[:4]] == [
            (2, "cos"),
            (2, "cheb"),
            (2, "erf:eta=2.5"),
            (2, "log:eta=4"),
        ]
        assert all(r.ok for r in records)
        assert all(r.wall_ms is None for r in records)

        cos = [r for r in records if r.method == "cos"]
        assert [r.card_I for r in cos] == [3, 5, 9]
        assert cos[-1].eps2 < cos[0].eps2
        assert cos[0].epsinf is not None

        erf = [r for r in records if r.method == "erf:eta=2.5"]
        assert all(r.epsinf_undefined for r in erf)
        assert [r.card_I for r in erf] == [5, 9, 17]
        assert all(r.eta == 2.5 for r in erf)

        # one lattice per N, shared by all methods
        for N in (2, 4, 8):
            assert len({(r.M, r.z) for r in records if r.N == N}) == 1

    def test_output_is_reproducible(self, tmp_path):
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        run_sweep(self.config(tmp_path, output=str(first)))
        run_sweep(self.config(tmp_path, output=str(second)))
        assert first.read_bytes() == second.read_bytes()
        assert len(first.read_text().splitlines()) == 13

    def test_json_output(self, tmp_path):
        path = tmp_path / "sweep.jsonl"
        records = run_sweep(self.config(tmp_path, output=str(path), format="json"))
        lines = path.read_text().splitlines()
        assert len(lines) == len(records)
        assert json.loads(lines[0])["method"] == "cos"

    def test_timing(self, tmp_path):
        records = run_sweep(self.config(tmp_path, timing=True, N_values=[2]))
        assert all(r.wall_ms is not None and r.wall_ms >= 0 for r in records)

    def test_weighted_max_error(self, tmp_path):
        records = run_sweep(self.config(tmp_path, weighted_inf=True, methods=["erf:eta=2.5"]))
        assert all(r.epsinf_weighted is not None and not r.epsinf_undefined for r in records)

    def test_on_record_callback(self, tmp_path):
        seen = []
        run_sweep(self.config(tmp_path, N_values=[3]), on_record=seen.append)
        assert [r.method for r in seen] == ["cos", "cheb", "erf:eta=2.5", "log:eta=4"]

    def test_failures_are_recorded(self, tmp_path):
        records = run_sweep(self.config(tmp_path, N_values=[4]), h=NanAtOrigin())
        assert len(records) == 4
        assert all(not r.ok and "non-finite" in r.error for r in records)
        assert read_records(tmp_path / "sweep.csv")[0].error == records[0].error

    def test_lattice_failure_is_recorded(self, tmp_path):
        config = Config(index_sets=IndexSetConfig(max_cardinality=10))
        records = run_sweep(self.config(tmp_path, N_values=[2, 64]), config=config)
        assert all(r.ok for r in records if r.N == 2)
        failed = [r for r in records if r.N == 64]
        assert len(failed) == 4
        assert all(r.error and r.M is None for r in failed)

    def test_dimension_two(self, tmp_path):
        records = run_sweep(self.config(tmp_path, d=2, N_values=[4, 8], methods=["cheb", "four"]))
        assert all(r.ok for r in records)
        assert records[0].card_I == 17

    def test_thread_cap_is_applied(self, tmp_path):
        try:
            capped = run_sweep(self.config(tmp_path, threads=1, output=None))
            assert numba.get_num_threads() == 1
        finally:
            numba.set_num_threads(numba.config.NUMBA_NUM_THREADS)
        full = run_sweep(self.config(tmp_path, output=None))
        assert [r.to_csv_row() for r in capped] == [r.to_csv_row() for r in full]

    @pytest.mark.slow
    def test_one_dimensional_reproduction(self, tmp_path):
        Ns = [5, 49, 137]
        records = run_sweep(
            self.config(
                tmp_path,
                methods=list(("cos", "cheb", "log", "erf")),
                etas=[2.0, 2.5, 4.0],
                N_values=Ns,
                R=100_000,
                seed=1,
            )
        )
        comparisons = compare_to_reference(records)
        assert len(comparisons) == 7 * len(Ns)
        for c in comparisons:
            assert 1 / 3 <= c.ratio <= 3, f"{c.method} N={c.N}: {c.eps2:.3e} vs {c.reference:.3e}"

    @pytest.mark.slow
    def test_one_dimensional_decay_rates(self, tmp_path):
        records = run_sweep(
            self.config(
                tmp_path,
                methods=["cos", "cheb", "log", "erf"],
                etas=[2.0, 2.5, 4.0],
                N_values=list(range(70, 141, 5)),
                R=20_000,
                seed=1,
            )
        )
        reference = load_reference()
        fits = decay_table(records)
        assert len(fits) == 7
        for fit in fits:
            assert fit.rate == pytest.approx(reference.rate(fit.method), abs=0.3), fit.method

    @pytest.mark.slow
    @pytest.mark.parametrize("d,N", [(2, 81), (4, 50), (7, 40)])
    def test_method_ranking_in_higher_dimensions(self, tmp_path, d, N):
        records = run_sweep(
            self.config(
                tmp_path,
                methods=["cos", "cheb", "log", "erf"],
                etas=[2.0, 2.5, 4.0],
                d=d,
                N_values=[N],
                R=10_000,
                seed=1,
            )
        )
        eps2 = {r.method: r.eps2 for r in records}
        ranking = sorted(eps2, key=eps2.get)
        assert set(ranking[:2]) == {"cheb", "erf:eta=2.5"}
        if d == 2:
            assert ranking[-1] == "log:eta=2"
        else:
            assert eps2["erf:eta=4"] > eps2["erf:eta=2"]
        # at d=4 log:eta=4 is still the better logarithmic variant
        if d == 7:
            assert eps2["log:eta=4"] > eps2["log:eta=2"]
