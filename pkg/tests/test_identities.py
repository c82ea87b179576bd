import math

import mpmath
import numpy as np
import pytest

from indexkernel import identities as ids
from indexkernel import kernels as kn
from indexkernel.errors import DomainError
from indexkernel.series import MOD5_EVEN, MOD5_ODD, CharacterSpec


def test_list_cases():
    cases = ids.list_cases()
    assert [c[0] for c in cases] == list(ids.CASE_IDS)
    assert len(cases) == 20
    domains = {cid: dom for cid, dom, _ in cases}
    assert "mu < 1/2" in domains["COR6"]
    assert "mu < 1/2" in domains["COR9"]
    assert "mu > nu/2" in domains["COR5"]
    for cid, _, params in cases:
        ids.check_domain(ids.make_case(cid, **params.as_dict()))


def test_registry_sides_are_disjoint():
    for spec in ids.REGISTRY.values():
        assert not (spec.lhs_kernels & spec.rhs_kernels), spec.id
        assert set(spec.lhs_kernels) <= set(ids.KERNELS)
        assert set(spec.rhs_kernels) <= set(ids.KERNELS)


def test_kernel_access_is_restricted():
    acc = ids.KernelAccess({"macdonald_imag"})
    assert acc.macdonald_imag(0.0, 1.0) == pytest.approx(0.42102443824070834, rel=1e-13)
    with pytest.raises(PermissionError):
        acc.macdonald_real
    with pytest.raises(ValueError):
        ids.KernelAccess({"no_such_kernel"})


def test_sides_touch_only_declared_kernels(monkeypatch):
    seen = []
    original = ids.KernelAccess.__getattr__

    def spy(self, name):
        value = original(self, name)
        seen.append((self._allowed, name))
        return value

    monkeypatch.setattr(ids.KernelAccess, "__getattr__", spy)
    for cid, _, params in ids.list_cases():
        seen.clear()
        ids.verify(ids.make_case(cid, **params.as_dict()))
        for allowed, name in seen:
            assert name in allowed


def test_domain_errors_name_the_constraint():
    with pytest.raises(DomainError, match="mu < 1/2"):
        ids.verify(ids.make_case("COR6", mu=0.8))
    with pytest.raises(DomainError, match="mu > nu/2"):
        ids.verify(ids.make_case("COR5", mu=0.4, nu=1.0))
    with pytest.raises(DomainError):
        ids.make_case("COR3A", phi=2.0)
    with pytest.raises(DomainError):
        ids.make_case("COR1", x=-1.0)
    with pytest.raises(DomainError):
        ids.make_case("NOPE")


def test_cor1_example():
    rep = ids.verify(ids.make_case("COR1", x=1.0, alpha=1.0), 1e-8)
    assert rep.passed
    assert rep.rhs == pytest.approx(math.pi / math.e, rel=1e-15)
    assert rep.lhs_tail_bound <= 1e-10 and rep.rhs_tail_bound <= 1e-10


def test_thm1_mu_zero_reduces_to_cor1():
    rep = ids.verify(ids.make_case("THM1", mu=0.0, x=1.0, alpha=1.0))
    assert rep.passed and "COR1" in rep.note
    deg = ids.mu_degeneracy(1.0, 1.0)
    assert deg["lhs_rel_diff"] <= 1e-10 and deg["rhs_rel_diff"] <= 1e-10


def test_cor3a_against_direct_sums():
    a, phi = 1.0, math.pi / 4
    rep = ids.verify(ids.make_case("COR3A", alpha=a, phi=phi))
    with mpmath.workdps(40):
        lhs = 2 * phi / mpmath.pi + 2 * mpmath.fsum(
            mpmath.sinh(a * phi * n) / mpmath.sinh(mpmath.pi * a * n / 2) for n in range(1, 201)
        )
        rhs = 2 * mpmath.tan(phi) / a + 2 * mpmath.sin(2 * phi) / a * mpmath.fsum(
            1 / (mpmath.sinh(2 * mpmath.pi * n / a) ** 2 + mpmath.cos(phi) ** 2) for n in range(1, 201)
        )
    assert rep.passed
    assert abs(rep.lhs - float(lhs)) <= rep.lhs_tail_bound + rep.lhs_quad_error + 1e-14
    assert abs(rep.rhs - float(rhs)) <= rep.rhs_tail_bound + rep.rhs_quad_error + 1e-14


@pytest.mark.parametrize("s", (0.5, 1.0, 3.0))
@pytest.mark.parametrize("alpha", (0.5, 1.0, 2.0))
def test_gamma_lattice_positive(s, alpha):
    rep = ids.verify(ids.make_case("GAMMA_LATTICE", s=s, alpha=alpha))
    assert rep.passed and rep.lhs > 0 and rep.rhs > 0


def test_character_cases():
    even = ids.verify(ids.make_case("CHAR_EVEN", mu=0.0, alpha=1.0, x=1.0, char=MOD5_EVEN))
    odd = ids.verify(ids.make_case("CHAR_ODD", mu=0.0, x=1.0, char=MOD5_ODD))
    assert even.passed and odd.passed
    assert odd.rel_err <= 1e-8
    principal = CharacterSpec(5, (0, 1, 1, 1, 1), "even")
    with pytest.raises(DomainError):
        ids.verify(ids.make_case("CHAR_EVEN", char=principal))
    with pytest.raises(DomainError):
        ids.verify(ids.make_case("CHAR_ODD", char=MOD5_EVEN))


def test_cor4_and_cor5_family_defaults():
    for cid in ("COR4", "COR5", "COR5_2MU", "COR5_2MU1", "COR6", "COR7", "COR8", "COR9"):
        rep = ids.verify(ids.make_case(cid))
        assert rep.passed, cid
        assert rep.lhs_tail_bound <= 1e-10 and rep.rhs_tail_bound <= 1e-10


def test_fourier_l1_closed_form():
    # at mu = 0, W_{0, i tau}(x) = sqrt(x/pi) K_{i tau}(x/2), whose cosine transform
    # 2 int_0^inf K_{i tau}(y) cos(xi tau) d tau is pi exp(-y cosh xi)
    x = 2.0
    for xi in (0.0, 0.5):
        rep = ids.verify(ids.make_case("FOURIER_PAIR_L1", mu=0.0, x=x, xi=xi))
        expected = math.sqrt(x / math.pi) * math.pi * math.exp(-0.5 * x * math.cosh(xi))
        assert rep.rhs == pytest.approx(expected, rel=1e-13)
        assert rep.passed


def test_fourier_c8_at_zero():
    x = 1.0
    rep = ids.verify(ids.make_case("FOURIER_PAIR_C8", x=x, xi=0.0))
    expected = x / math.sqrt(2) * math.exp(-x / 2) * kn.macdonald_real(0.0, x / 2)
    assert rep.rhs == pytest.approx(expected, rel=1e-12)
    assert rep.passed


@pytest.mark.parametrize("which", ("L1", "C8", "C9"))
def test_fourier_pairs(which):
    reports = ids.verify_fourier_pair(which, kn.EvalPoint(0.25, 2.0, 1.0), [0.0, 1.0], tol=1e-7)
    assert len(reports) == 3
    assert all(r.passed for r in reports)


def test_report_serialization():
    rep = ids.verify(ids.make_case("COR1"))
    d = rep.to_dict(False)
    assert list(d) == [
        "case", "params", "lhs", "rhs", "abs_err", "rel_err", "lhs_tail_bound", "rhs_tail_bound", "pass", "wall_ms",
    ]
    assert d["wall_ms"] is None and d["pass"] is True
    assert rep.to_dict(True)["wall_ms"] > 0


def test_default_grid_shape():
    grid = ids.default_grid()
    assert {c.id for c in grid} == set(ids.CASE_IDS)
    assert 140 <= len(grid) <= 200
    for c in grid:
        ids.check_domain(c)


def test_rel_err_floor_when_both_sides_vanish():
    rep = ids.verify(ids.make_case("COR3A", alpha=1.0, phi=math.pi / 4))
    assert rep.rel_err == rep.abs_err / max(abs(rep.lhs), abs(rep.rhs), 1e-300)
    assert np.isfinite(rep.rel_err)
