from __future__ import annotations

import numpy as np
import pytest

from infoflow import (
    DtMismatch,
    GridField,
    GridFormatError,
    LengthMismatch,
    TimeSeries,
    align,
    covariances,
    fisher_ci,
    fit_mle,
    load_grid,
    map_flows,
    write_grid,
)

DT = 0.05
N_TIME = 3000
N_LAT, N_LON = 3, 4
GAMMA = 0.8


def coupled_fixture(seed=0):
    """Index OU plus a grid whose first half of cells listens to the index.

    Cells evolve as dY = (-Y + gamma * X) dt + 0.5 dW with independent noise;
    uncoupled cells drop the gamma term. One cell is masked.
    """
    rng = np.random.default_rng(seed)
    n_cells = N_LAT * N_LON
    zi = rng.standard_normal(N_TIME) * np.sqrt(DT)
    x = np.empty(N_TIME + 1)
    x[0] = 0.0
    for n in range(N_TIME):
        x[n + 1] = x[n] - x[n] * DT + 0.5 * zi[n]
    zc = rng.standard_normal((N_TIME, n_cells)) * np.sqrt(DT)
    y = np.zeros((N_TIME + 1, n_cells))
    coupled = np.zeros(n_cells, dtype=bool)
    coupled[: n_cells // 2] = True
    for n in range(N_TIME):
        drift = -y[n] * DT
        drift[coupled] += GAMMA * x[n] * DT
        y[n + 1] = y[n] + drift + 0.5 * zc[n]
    index = TimeSeries(x[1:], DT, label="index")
    values = y[1:].reshape(N_TIME, N_LAT, N_LON)
    mask = np.ones((N_LAT, N_LON), dtype=bool)
    mask[-1, -1] = False
    field = GridField(values=values, dt=DT, mask=mask)
    return index, field, coupled.reshape(N_LAT, N_LON)


def noise_fixture(seed=1000):
    rng = np.random.default_rng(seed)
    index = TimeSeries(rng.standard_normal(N_TIME), DT, label="index")
    values = rng.standard_normal((N_TIME, N_LAT, N_LON))
    field = GridField(values=values, dt=DT, mask=np.ones((N_LAT, N_LON), dtype=bool))
    return index, field


class TestMapFlows:
    def test_one_way_coupling_pattern(self):
        index, field, coupled = coupled_fixture(seed=0)
        fm = map_flows(index, field, alpha=0.05)
        unmasked = field.mask
        # every coupled cell: positive, significant flow index -> cell
        assert np.all(fm.t_index_to_field[coupled & unmasked] > 0)
        assert np.all(fm.significant_index_to_field[coupled & unmasked])
        # no feedback: flow cell -> index not significant in >= 90% of cells
        n_cells = int(unmasked.sum())
        n_quiet = int((~fm.significant_field_to_index[unmasked]).sum())
        assert n_quiet >= 0.9 * n_cells

    def test_noise_grid_is_quiet_both_ways(self):
        index, field = noise_fixture(seed=1000)
        fm = map_flows(index, field, alpha=0.05)
        n_cells = field.mask.sum()
        assert (~fm.significant_index_to_field).sum() >= 0.9 * n_cells
        assert (~fm.significant_field_to_index).sum() >= 0.9 * n_cells

    def test_single_cell_grid_equals_pair_pipeline(self):
        index, field, _ = coupled_fixture(seed=2)
        cell = field.values[:, 0:1, 0:1]
        single = GridField(values=cell, dt=DT, mask=np.ones((1, 1), dtype=bool))
        fm = map_flows(index, single, alpha=0.05)
        pair = align(index, TimeSeries(cell[:, 0, 0], DT))
        cov = covariances(pair)
        est = fisher_ci(pair, fit_mle(pair, cov), cov, alpha=0.05)
        assert fm.t_index_to_field[0, 0] == est.t12
        assert fm.t_field_to_index[0, 0] == est.t21
        assert fm.significant_index_to_field[0, 0] == est.significant12()
        assert fm.significant_field_to_index[0, 0] == est.significant21()

    def test_cell_permutation_permutes_output(self):
        index, field, _ = coupled_fixture(seed=3)
        perm = np.random.default_rng(1).permutation(N_LAT)
        permuted = GridField(values=field.values[:, perm, :], dt=DT, mask=field.mask[perm, :])
        fm = map_flows(index, field)
        fm_perm = map_flows(index, permuted)
        assert np.array_equal(
            fm_perm.t_index_to_field, fm.t_index_to_field[perm, :], equal_nan=True
        )
        assert np.array_equal(
            fm_perm.significant_field_to_index, fm.significant_field_to_index[perm, :]
        )

    def test_masked_cells_are_missing_and_isolated(self):
        index, field, _ = coupled_fixture(seed=4)
        fm = map_flows(index, field)
        assert np.isnan(fm.t_index_to_field[~field.mask]).all()
        assert not fm.significant_index_to_field[~field.mask].any()
        # unmasking a cell must not change any other cell
        all_open = GridField(
            values=field.values, dt=DT, mask=np.ones((N_LAT, N_LON), dtype=bool)
        )
        fm_open = map_flows(index, all_open)
        assert np.array_equal(
            fm_open.t_field_to_index[field.mask], fm.t_field_to_index[field.mask]
        )

    def test_degenerate_cell_becomes_missing(self):
        index, field = noise_fixture(seed=5)
        values = field.values.copy()
        values[:, 1, 1] = index.values  # collinear with the index
        bad = GridField(values=values, dt=DT, mask=field.mask)
        fm = map_flows(index, bad)
        assert np.isnan(fm.t_index_to_field[1, 1])
        assert not fm.significant_index_to_field[1, 1]
        assert np.isfinite(fm.t_index_to_field[0, 0])

    def test_shape_and_dt_validation(self):
        index, field = noise_fixture(seed=6)
        short = TimeSeries(index.values[:-1], DT)
        with pytest.raises(LengthMismatch):
            map_flows(short, field)
        wrong_dt = TimeSeries(index.values, DT * 2)
        with pytest.raises(DtMismatch):
            map_flows(wrong_dt, field)


class TestGridIO:
    def test_roundtrip(self, tmp_path):
        _, field, _ = coupled_fixture(seed=7)
        manifest = write_grid(field, tmp_path, "fixture")
        loaded = load_grid(manifest)
        assert np.array_equal(loaded.values, field.values)
        assert np.array_equal(loaded.mask, field.mask)
        assert loaded.dt == field.dt

    def test_missing_manifest_keys(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("n_lat,2\nn_lon,2\n")
        with pytest.raises(GridFormatError):
            load_grid(str(path))

    def test_missing_mask_file(self, tmp_path):
        _, field, _ = coupled_fixture(seed=8)
        manifest = write_grid(field, tmp_path, "fixture")
        (tmp_path / "fixture_mask.csv").unlink()
        with pytest.raises(GridFormatError):
            load_grid(manifest)

    def test_bad_cell_count(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("n_lat,2\nn_lon,2\nn_time,3\ndt,1.0\nvalues_file,v.csv\n")
        (tmp_path / "v.csv").write_text("1,2,3\n4,5,6\n7,8,9\n")
        with pytest.raises(GridFormatError):
            load_grid(str(path))

    def test_grid_invariants(self):
        with pytest.raises(ValueError):
            GridField(values=np.zeros((2, 2, 2)), dt=1.0, mask=np.ones((2, 2), bool))
        values = np.zeros((5, 2, 2))
        values[0, 0, 0] = np.nan
        with pytest.raises(ValueError):
            GridField(values=values, dt=1.0, mask=np.ones((2, 2), bool))
        # a masked non-finite cell is acceptable
        mask = np.ones((2, 2), bool)
        mask[0, 0] = False
        GridField(values=values, dt=1.0, mask=mask)
