"""Acceptance gate: one test per criterion, each printed as a pass/fail line."""

from __future__ import annotations

import time
import warnings

import numpy as np
import pytest

from conftau.calculus import Stencil, Times, fd_gradient
from conftau.dirichlet import boundary_samples, solve_dirichlet
from conftau.errors import TruncationWarning
from conftau.field import free_energy, free_energy_oracle
from conftau.geometry import DomainShape, compute_moments
from conftau.verify import Base, SuiteOptions, default_bases, run_identity, run_suite

acceptance = pytest.mark.acceptance


def disk_F(t0):
    return 0.5 * t0**2 * np.log(t0) - 0.75 * t0**2


@pytest.fixture(scope="module")
def bases(one, sq, disk, ellipse):
    return {
        ("disk", "one"): Base("disk/sigma=1", disk, one),
        ("disk", "sq"): Base("disk/sigma=|z|^2", disk, sq),
        ("ellipse", "one"): Base("ellipse/sigma=1", ellipse, one),
        ("ellipse", "sq"): Base("ellipse/sigma=|z|^2", ellipse, sq),
    }


def residuals(ids, base_list, pool):
    return {(i, b.name): run_identity(i, b, pool=pool) for i in ids for b in base_list}


def worst(res):
    key = max(res, key=res.get)
    return f"worst {key[0]} on {key[1]} = {res[key]:.2e}"


@acceptance(1, "disk closed form for F")
def test_disk_closed_form(one, record_property):
    start = time.perf_counter()
    t0s = (0.5, 1.0, 2.0)
    contour = max(abs(free_energy(DomainShape.circle(np.sqrt(t)), one) - disk_F(t)) for t in t0s)
    oracle = max(abs(free_energy_oracle(DomainShape.circle(np.sqrt(t)), one) - disk_F(t)) for t in t0s)
    elapsed = time.perf_counter() - start
    record_property("detail", f"contour {contour:.1e}, oracle {oracle:.1e}, {elapsed:.2f} s")
    assert contour < 1e-8 and oracle < 1e-4 and elapsed < 5


@acceptance(2, "ellipse moments from residue calculus")
def test_ellipse_moments(ellipse, one, record_property):
    m = compute_moments(ellipse, one, 8)
    err = max(abs(m.t0 - 0.99), abs(m.t[1] - 0.05), abs(m.v[1] - 0.099))
    rest = float(np.max(np.abs(np.delete(m.t, 1))))
    record_property("detail", f"(t0, t2, v2) error {err:.1e}, other t_k {rest:.1e}")
    assert err < 1e-10 and rest < 1e-12


@acceptance(3, "gradient identity dF = v dt")
def test_gradient_identity(bases, record_property):
    start = time.perf_counter()
    worst_rel = 0.0
    for base in bases.values():
        st = Stencil(Times.from_shape(base.shape, base.pot, 8), base.pot)
        d0, dk = fd_gradient(st)
        mom = st.moments(st.base)
        exact = np.concatenate([[mom.v0], mom.v])
        fd = np.concatenate([[d0], dk])
        rel = np.abs(fd - exact) / np.maximum(1.0, np.abs(exact))
        worst_rel = max(worst_rel, float(rel.max()))
    elapsed = time.perf_counter() - start
    record_property("detail", f"max relative error {worst_rel:.1e}, {elapsed:.1f} s")
    assert worst_rel < 1e-5 and elapsed < 30


@acceptance(4, "conformal map from second derivatives")
def test_conformal_map(bases, pool, record_property):
    res = residuals(["CONF_MAP"], [bases["ellipse", "one"], bases["ellipse", "sq"]], pool)
    record_property("detail", worst(res))
    assert max(res.values()) < 1e-4


@acceptance(5, "Green function from second derivatives")
def test_green(bases, pool, record_property):
    res = residuals(["GREEN"], [bases["ellipse", "one"], bases["ellipse", "sq"]], pool)
    record_property("detail", worst(res))
    assert max(res.values()) < 1e-4


@acceptance(6, "dispersionless Hirota equations")
def test_hirota(bases, pool, record_property):
    ell = [bases["ellipse", "one"], bases["ellipse", "sq"]]
    two = residuals(["HIR_D", "HIR_TODA", "KP3"], ell, pool)
    one_level = residuals(["DTODA", "NEXT"], ell, pool)
    record_property("detail", f"{worst(two)}; {worst(one_level)}")
    assert max(two.values()) < 1e-4 and max(one_level.values()) < 1e-5


@acceptance(7, "symmetry of dual-moment derivatives")
def test_symmetry(bases, pool, record_property):
    res = residuals(["SYMM"], list(bases.values()), pool)
    record_property("detail", worst(res))
    assert max(res.values()) < 1e-6


@acceptance(8, "homogeneity and quasihomogeneity")
def test_homogeneity(bases, pool, one, record_property):
    hom = residuals(["HOMOG"], list(bases.values()), pool)
    quasi = residuals(["QUASI_M"], list(bases.values()), pool)
    t0 = np.array([0.5, 1.0, 2.0, 3.0])
    F = np.array([free_energy(DomainShape.circle(np.sqrt(t)), one) for t in t0])
    disk = float(np.max(np.abs(4 * F - (2 * t0**2 * np.log(t0) - 3 * t0**2))))
    record_property("detail", f"{worst(hom)}; {worst(quasi)}; disk {disk:.1e}")
    assert max(hom.values()) < 1e-8 and max(quasi.values()) < 1e-5 and disk < 1e-10


@acceptance(9, "covariance of second derivatives across densities")
def test_covariance(bases, pool, record_property):
    ell = bases["ellipse", "one"]
    covar = run_identity("COVAR", ell, pool=pool)
    neg = run_identity("COVAR_NEG", ell, pool=pool)
    record_property("detail", f"second-derivative gap {covar:.1e}, first-derivative gap {neg:.1e}")
    assert covar < 1e-4 and neg > 1e-3


@acceptance(10, "canonicity, Lax-Sato flows and string equation")
def test_hierarchy(bases, pool, record_property):
    res = residuals(["CANON", "LAX", "STRING"], list(bases.values()), pool)
    closed = residuals(["CANON", "STRING"], [bases["disk", "one"]], pool)
    record_property("detail", f"{worst(res)}; circle closed forms {max(closed.values()):.1e}")
    assert max(res.values()) < 1e-5 and max(closed.values()) < 1e-8


@acceptance(11, "bump law is second order in the area")
def test_bump(bases, pool, record_property):
    res = residuals(["BUMP"], list(bases.values()), pool)
    record_property("detail", f"|ratio/4 - 1|, {worst(res)}")
    assert max(res.values()) <= 0.2


@acceptance(12, "exterior Dirichlet solver")
def test_dirichlet(disk, ellipse, record_property):
    err = 0.0
    w = (1 + np.array([1e-4, 1e-2, 0.1, 1.0, 4.0]))[:, None] * np.exp(1j * np.linspace(0, 2 * np.pi, 17)[:-1])[None, :]
    for shape in (disk, ellipse):
        z = shape.z(w).ravel()
        for p in (1, 2):
            psi = boundary_samples(shape, lambda s: s ** (-p))
            err = max(err, float(np.max(np.abs(solve_dirichlet(shape, psi, z) - np.real(z ** (-p))))))
    theta = 2 * np.pi * np.arange(512) / 512
    psi = np.abs(np.sin(theta)) + np.cos(2 * theta)
    f = solve_dirichlet(ellipse, psi, ellipse.z(w).ravel())
    excess = float(max(f.max() - psi.max(), psi.min() - f.min(), 0.0))
    record_property("detail", f"reconstruction {err:.1e}, maximum-principle excess {excess:.1e}")
    assert err < 1e-6 and excess <= 1e-8


@acceptance(13, "default suite under five minutes")
def test_full_suite(record_property):
    start = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        rep = run_suite(default_bases(), opts=SuiteOptions(K=8, M=512, workers=1))
    elapsed = time.perf_counter() - start
    record_property("detail", f"{len(rep.entries)} entries, {len(rep.ids())} identities, {len(rep.failures())} failures, {elapsed:.1f} s")
    assert rep.passed and elapsed < 300
