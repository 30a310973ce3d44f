"""Dynamics layer: closed-form flows against exact rational partial sums,
solver cross-validation, conservation laws, constraints, Lagrange residuals.
"""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padicmech.core import DomainViolation, PadicInt, PadicNumber
from padicmech.mechanics import (
    HamiltonianSpec,
    HierarchyViolation,
    PhaseState,
    TrajectorySeries,
    VanishingMass,
    closed_flow,
    closed_flow_series,
    constraint_check,
    energy_series,
    free_hamiltonian,
    generalized_forces,
    hamilton_rhs,
    hooke_hamiltonian,
    lagrange_residual,
    potential_build,
    restriction_check,
    sphere_digit_test,
    system_reduce,
    taylor_integrate,
    total_motivation_series,
    velocity_force,
    work_energy_audit,
)
from padicmech.multi import MultiPoly
from padicmech.series import PowerSeries, evaluate


def rational_to_residue(q: Fraction, p: int, k: int) -> int:
    assert q.denominator % p != 0
    return q.numerator * pow(q.denominator, -1, p**k) % p**k


# --- states and specs --------------------------------------------------------

def test_phase_state_normalizes_shared_precision():
    z = PhaseState(5, [1, PadicInt(5, 2, 6)], [0, 3])
    assert z.precision == 6
    assert all(x.precision == 6 for x in (*z.q, *z.p, z.t))
    assert z.n == 2


def test_phase_state_validation():
    with pytest.raises(ValueError):
        PhaseState(5, [1, 2], [3])
    with pytest.raises(DomainViolation):
        PhaseState(5, [Fraction(1, 5)], [0])


def test_hamilton_rhs_examples():
    p = 5
    free = free_hamiltonian(p, [1])
    qdot, pdot = hamilton_rhs(free, PhaseState(p, [4], [7]))
    assert qdot[0] == PadicNumber(p, 14)
    assert pdot[0].is_zero and pdot[0].is_exact_zero
    # force +m b^2 q comes from the exp-kind potential -m b^2 q^2 / 2
    hk = hooke_hamiltonian(p, "hooke_exp", m=3, beta=5)
    _, pdot = hamilton_rhs(hk, PhaseState(p, [2], [0]))
    assert pdot[0] == PadicNumber(p, 3 * 25 * 2)
    qdot, _ = hamilton_rhs(free, PhaseState(p, [4], [0]))
    assert qdot[0].is_zero


# --- closed flows ------------------------------------------------------------

def test_free_flow_example():
    z = closed_flow("free", PhaseState(5, [0], [1]), 3, alpha=1)
    assert z.q[0] == PadicInt(5, 6, 12)
    assert z.p[0] == PadicInt(5, 1, 12)


def test_trig_flow_is_sine_cosine():
    p, m, beta = 5, 3, 5
    z0 = PhaseState(p, [0], [m * beta])
    traj = closed_flow_series("hooke_trig", z0, m=m, beta=beta, degree=12)
    for k in range(13):
        if k % 2:
            want = Fraction((-1) ** (k // 2) * beta**k, math.factorial(k))
            assert traj.q[0].coeffs[k] == PadicNumber(p, want)
            assert traj.p[0].coeffs[k].is_zero
        else:
            want = Fraction((-1) ** (k // 2) * m * beta ** (k + 1), math.factorial(k))
            assert traj.p[0].coeffs[k] == PadicNumber(p, want)
            assert traj.q[0].coeffs[k].is_zero


def test_flow_window_enforced():
    p = 5
    z0 = PhaseState(p, [1], [1])
    with pytest.raises(DomainViolation) as err:
        closed_flow("hooke_trig", z0, 1, m=1, beta=1)
    assert err.value.reason == "flow-window"
    out = closed_flow("hooke_trig", z0, p, m=1, beta=1, degree=24)
    assert out.q[0].precision >= 10


def test_energy_constant_along_closed_flows():
    p = 5
    z0 = PhaseState(p, [2], [3])
    for kind in ("hooke_exp", "hooke_trig"):
        H = hooke_hamiltonian(p, kind, m=1, beta=p)
        traj = closed_flow_series(kind, z0, m=1, beta=p, degree=14)
        h = energy_series(H, traj)
        assert all(c.is_zero for c in h.coeffs[1:])
        assert h.coeffs[0] == H.energy(z0)


# --- taylor solver -----------------------------------------------------------

def test_taylor_free_terminates_at_degree_one():
    p = 5
    H = free_hamiltonian(p, [1])
    traj = taylor_integrate(H, PhaseState(p, [0], [1]), 6)
    closed = closed_flow_series("free", PhaseState(p, [0], [1]), alpha=1)
    assert traj.q[0].coeffs[0] == closed.q[0].coeffs[0]
    assert traj.q[0].coeffs[1] == closed.q[0].coeffs[1]
    assert all(c.is_zero for c in traj.q[0].coeffs[2:])
    assert all(c.is_zero for c in traj.p[0].coeffs[1:])


def test_taylor_matches_closed_hooke_series():
    p = 5
    z0 = PhaseState(p, [2], [3])
    for kind in ("hooke_exp", "hooke_trig"):
        H = hooke_hamiltonian(p, kind, m=1, beta=p)
        traj = taylor_integrate(H, z0, 12)
        closed = closed_flow_series(kind, z0, m=1, beta=p, degree=12)
        for k in range(13):
            assert traj.q[0].coeffs[k] == closed.q[0].coeffs[k]
            assert traj.p[0].coeffs[k] == closed.p[0].coeffs[k]


def test_taylor_matches_closed_at_unit_time_mod_p4():
    # exact-rational oracle for the exp-kind flow: q0 cosh(5t) + p0 sinh(5t)/5
    # partial sums, reduced mod 5^4 at t=1
    p, q0, p0 = 5, 2, 3
    oracle_q = sum(Fraction(q0 * p**k, math.factorial(k)) for k in range(0, 9, 2))
    oracle_q += sum(Fraction(p0 * p ** (k - 1), math.factorial(k)) for k in range(1, 9, 2))
    want = rational_to_residue(oracle_q, p, 4)
    z0 = PhaseState(p, [q0], [p0])
    H = hooke_hamiltonian(p, "hooke_exp", m=1, beta=p)
    traj = taylor_integrate(H, z0, 8, validity=Fraction(1))
    assert traj.at(1).q[0].residue % p**4 == want
    flowed = closed_flow("hooke_exp", z0, 1, m=1, beta=p, degree=8)
    assert flowed.q[0].residue % p**4 == want


def test_taylor_rejects_wild_data_without_window():
    p = 5
    H = free_hamiltonian(p, [Fraction(1, 5)])
    with pytest.raises(ValueError):
        taylor_integrate(H, PhaseState(p, [0], [1]), 4)
    traj = taylor_integrate(H, PhaseState(p, [0], [1]), 4, validity=Fraction(1, 25))
    assert traj.validity == Fraction(1, 25)


def test_taylor_energy_and_interaction_momentum():
    p = 5
    phi = PowerSeries.polynomial(p, [0, 0, 1])  # s^2
    V = potential_build("democratic", phi, 2).potential
    H = HamiltonianSpec.from_masses(p, [1, 1], V)
    z0 = PhaseState(p, [0, 2], [1, 1])
    traj = taylor_integrate(H, z0, 8)
    total = total_motivation_series(traj)
    assert all(c.is_zero for c in total.coeffs[1:])
    assert total.coeffs[0] == PadicNumber(p, 2)
    h = energy_series(H, traj)
    assert all(c.is_zero for c in h.coeffs[1:])


# --- restriction -------------------------------------------------------------

def test_restriction_examples():
    p = 5
    r = restriction_check(PadicInt(p, 1, 12), PadicInt(p, 1, 12), 1, 1, prime=p)
    assert not r.satisfied and r.margin == 5
    r = restriction_check(PadicInt(p, 5, 12), PadicInt(p, 1, 12), 1, 1, prime=p)
    assert r.satisfied and r.margin == 1
    r = restriction_check(PadicInt(p, 1, 12), PadicInt(p, 0, 12), 1, 1, prime=p)
    assert r.satisfied and r.margin == 0


@given(t=st.integers(1, 200))
@settings(max_examples=60)
def test_restriction_holds_along_trig_flow(t):
    p, m, beta = 5, 1, 1
    z0 = PhaseState(p, [0], [m * beta])
    state = closed_flow("hooke_trig", z0, t * p, m=m, beta=beta, degree=20)
    rep = restriction_check(state.q[0], state.p[0], m, beta, prime=p)
    assert rep.satisfied


# --- work and energy ---------------------------------------------------------

def test_work_energy_hooke_audit():
    for p in (3, 5, 7):
        z0 = PhaseState(p, [2], [3])
        H = hooke_hamiltonian(p, "hooke_trig", m=1, beta=p)
        traj = closed_flow_series("hooke_trig", z0, m=1, beta=p, degree=40)
        audit = work_energy_audit(H, traj, 0, 1)
        bound = Fraction(1, p ** (12 - audit.loss))
        assert audit.energy_gap <= bound
        assert audit.potential_gap <= bound
        assert (audit.work - audit.delta_kinetic).is_zero


def test_work_closed_loop_is_exact_zero():
    p = 5
    z0 = PhaseState(p, [2], [3])
    H = hooke_hamiltonian(p, "hooke_trig", m=1, beta=p)
    traj = closed_flow_series("hooke_trig", z0, m=1, beta=p, degree=20)
    audit = work_energy_audit(H, traj, 1, 1)
    assert audit.work.is_exact_zero


def test_work_free_flow_is_zero():
    p = 5
    H = free_hamiltonian(p, [1])
    traj = closed_flow_series("free", PhaseState(p, [0], [1]), alpha=1)
    audit = work_energy_audit(H, traj, 0, 1)
    assert audit.work.is_exact_zero
    assert audit.delta_kinetic.is_zero


# --- systems of transformers -------------------------------------------------

def test_system_reduce_examples():
    p = 5
    one = system_reduce([3], PhaseState(p, [7], [2]))
    assert one.center == PadicNumber(p, 7)
    two = system_reduce([1, 1], PhaseState(p, [0, 2], [1, 4]))
    assert two.center == PadicNumber(p, 1)
    assert two.total_motivation == PadicNumber(p, 5)
    with pytest.raises(VanishingMass):
        system_reduce([1, -1], PhaseState(p, [0, 2], [1, 4]))


def test_democratic_potential_double_counts():
    p = 5
    phi = PowerSeries.polynomial(p, [0, 0, 1])
    built = potential_build("democratic", phi, 2)
    want = MultiPoly(p, 2, {(2, 0): 2, (1, 1): -4, (0, 2): 2})
    assert built.potential == want
    assert built.layer_norms is None


def test_hierarchy_chain():
    p = 5
    phi = PowerSeries.polynomial(p, [0, 0, 1])
    ok = potential_build("hierarchical", phi, 3, weights=[1, p, p**2])
    assert ok.layer_norms == (Fraction(1), Fraction(1, 5), Fraction(1, 25))
    with pytest.raises(HierarchyViolation):
        potential_build("hierarchical", phi, 3, weights=[1, 1, p])
    silent = potential_build("hierarchical", phi, 3, weights=[0, 0, 0])
    assert silent.potential.is_zero()


def test_constraint_residuals():
    p = 5
    a = PadicInt(p, 3, 8)
    sat = constraint_check("C1_sphere", [a + PadicInt(p, 5, 8)], center=a,
                           radius=Fraction(1, 5))
    assert sat[0].residual == 0
    off = constraint_check("C1_sphere", [a + PadicInt(p, 1, 8)], center=a,
                           radius=Fraction(1, 5))
    assert off[0].residual == Fraction(4, 5)
    rigid = constraint_check("C3_rigid", [PadicInt(p, 0, 8), PadicInt(p, 1, 8)],
                             pairs={(0, 1): Fraction(1)})
    assert rigid[0].residual == 0


@given(q=st.integers(0, 5**6 - 1), a=st.integers(0, 5**6 - 1))
def test_digit_reading_matches_norm(q, a):
    p, k = 5, 2
    qi, ai = PadicInt(p, q, 6), PadicInt(p, a, 6)
    assert sphere_digit_test(qi, ai, k) == ((qi - ai).norm() == Fraction(1, p**k))


def test_generalized_forces_examples():
    p = 5
    xi = MultiPoly.variable(p, 1, 0)
    chart = [xi, xi * xi]
    ident_forces = [MultiPoly.constant(p, 2, 1), MultiPoly.constant(p, 2, 1)]
    q = generalized_forces(ident_forces, chart)
    assert q[0] == MultiPoly(p, 1, {(0,): 1, (1,): 2})
    zero = generalized_forces([MultiPoly(p, 2, {}), MultiPoly(p, 2, {})], chart)
    assert zero[0].is_zero()
    # identity chart passes forces through
    idchart = [MultiPoly.variable(p, 2, 0), MultiPoly.variable(p, 2, 1)]
    f = [MultiPoly.variable(p, 2, 1), MultiPoly.constant(p, 2, 3)]
    assert generalized_forces(f, idchart) == (f[0], f[1])


# --- lagrangian --------------------------------------------------------------

def test_lagrange_free_solution_and_counterexample():
    p, m = 5, 3
    half_m = PadicNumber(p, Fraction(m, 2))
    L = MultiPoly(p, 2, {(0, 2): half_m})  # m xidot^2 / 2
    line = PowerSeries.polynomial(p, [4, 7])
    (res,) = lagrange_residual(L, [line])
    assert all(c.is_zero for c in res.coeffs)
    curve = PowerSeries.polynomial(p, [0, 0, 1])  # t^2 is not a free solution
    (res,) = lagrange_residual(L, [curve])
    assert res.coeffs[0] == PadicNumber(p, 2 * m)


def test_lagrange_hooke_residual_vanishes():
    p, m, beta = 5, 1, 5
    z0 = PhaseState(p, [2], [3])
    traj = closed_flow_series("hooke_trig", z0, m=m, beta=beta, degree=14)
    # L = m xidot^2/2 - m beta^2 xi^2/2
    L = MultiPoly(p, 2, {(0, 2): Fraction(m, 2), (2, 0): Fraction(-m * beta**2, 2)})
    (res,) = lagrange_residual(L, [traj.q[0]])
    assert all(c.is_zero for c in res.coeffs)


def test_velocity_dependent_force():
    p = 5
    # V = xi * xidot: the two contributions cancel along any trajectory
    V = MultiPoly(p, 2, {(1, 1): 1})
    traj = PowerSeries.polynomial(p, [1, 2, 3])
    (qf,) = velocity_force(V, [traj])
    assert all(c.is_zero for c in qf.coeffs)
