import numpy as np
import pytest

from subspace_bandits.domain import (
    DomainSpec,
    HullElement,
    ProjectionMatrix,
    check_hull_membership,
    projector_from_basis,
    top_k_projector,
    validate_instance,
)
from subspace_bandits.errors import (
    DimMismatch,
    InfNormViolation,
    NormViolation,
    NotInHull,
    NotOrthonormal,
)

from util import random_orthonormal, random_projector


def rng_for(seed):
    return np.random.Generator(np.random.Philox(key=seed))


class TestDomainSpec:
    def test_valid(self):
        spec = DomainSpec(d=10, k=2, r=4, G=1.0)
        assert spec.d == 10

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(d=1, k=1, r=1, G=1.0),
            dict(d=4, k=4, r=2, G=1.0),
            dict(d=4, k=0, r=2, G=1.0),
            dict(d=4, k=1, r=0, G=1.0),
            dict(d=4, k=1, r=5, G=1.0),
            dict(d=4, k=1, r=2, G=0.0),
            dict(d=4, k=1, r=2, G=5.0),
        ],
    )
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(ValueError):
            DomainSpec(**kwargs)

    def test_warns_when_k_exceeds_sqrt_d(self):
        with pytest.warns(UserWarning, match="sqrt"):
            DomainSpec(d=4, k=3, r=2, G=1.0)


class TestValidateInstance:
    def test_basis_vector_ok(self):
        spec = DomainSpec(d=3, k=1, r=2, G=1.0)
        inst = validate_instance([1.0, 0.0, 0.0], spec)
        assert np.array_equal(inst.x, np.array([1.0, 0.0, 0.0]))

    def test_norm_violation_carries_value(self):
        spec = DomainSpec(d=2, k=1, r=2, G=1.0)
        with pytest.raises(NormViolation) as err:
            validate_instance([1.0, 1.0], spec)
        assert err.value.sq_norm == pytest.approx(2.0)

    def test_inf_norm_violation(self):
        # G=4 admits the squared norm, but the coordinate cap still rejects 2*e1
        with pytest.raises(InfNormViolation):
            validate_instance([2.0, 0.0, 0.0, 0.0], DomainSpec(d=4, k=1, r=2, G=4.0))

    def test_wrong_length(self):
        spec = DomainSpec(d=3, k=1, r=2, G=1.0)
        with pytest.raises(DimMismatch):
            validate_instance([1.0, 0.0], spec)


class TestProjectorFromBasis:
    def test_single_coordinate(self):
        pi = projector_from_basis(np.array([1.0, 0.0, 0.0]))
        expected = np.zeros((3, 3))
        expected[0, 0] = 1.0
        assert np.array_equal(pi.matrix, expected)
        assert pi.rank == 1

    def test_two_coordinates(self):
        v = np.zeros((3, 2))
        v[0, 0] = 1.0
        v[1, 1] = 1.0
        pi = projector_from_basis(v)
        assert np.array_equal(pi.matrix, np.diag([1.0, 1.0, 0.0]))

    def test_random_basis_invariants(self):
        rng = rng_for(21)
        v = random_orthonormal(rng, 5, 2)
        pi = projector_from_basis(v)
        assert abs(np.trace(pi.matrix) - 2) <= 1e-9
        assert np.max(np.abs(pi.matrix @ pi.matrix - pi.matrix)) <= 1e-9

    def test_invariant_to_basis_rotation(self):
        rng = rng_for(22)
        v = random_orthonormal(rng, 5, 2)
        for _ in range(2):
            q = random_orthonormal(rng, 2, 2)
            assert np.max(np.abs(projector_from_basis(v @ q).matrix - projector_from_basis(v).matrix)) <= 1e-9

    def test_rejects_non_orthonormal(self):
        with pytest.raises(NotOrthonormal):
            projector_from_basis(np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]))


class TestHullMembership:
    def test_initializer_passes(self):
        report = check_hull_membership((2 / 4) * np.eye(4), k=2)
        assert report.passed

    def test_eigenvalue_above_one_fails(self):
        report = check_hull_membership(np.diag([1.5, 0.5]), k=2)
        assert not report.passed
        assert report.max_eigenvalue > 1

    def test_any_projector_passes(self):
        rng = rng_for(23)
        for k in (1, 2):
            pi = random_projector(rng, 5, k)
            assert check_hull_membership(pi.matrix, k=k).passed

    def test_projector_is_hull_element(self):
        rng = rng_for(24)
        pi = random_projector(rng, 6, 2)
        HullElement(matrix=pi.matrix, k=2)  # extreme point: must not raise

    def test_hull_element_rejects_outside(self):
        with pytest.raises(NotInHull):
            HullElement(matrix=np.diag([1.5, 0.5]), k=2)


class TestProjectionMatrixType:
    def test_rejects_non_idempotent(self):
        with pytest.raises(ValueError):
            ProjectionMatrix(matrix=np.diag([0.5, 0.5]), rank=1)

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValueError):
            ProjectionMatrix(matrix=np.diag([1.0, 1.0]), rank=1)

    def test_orthonormal_basis_recovery(self):
        rng = rng_for(25)
        v = random_orthonormal(rng, 5, 2)
        pi = ProjectionMatrix(matrix=v @ v.T, rank=2, basis=None)
        b = pi.orthonormal_basis()
        assert np.max(np.abs(b @ b.T - pi.matrix)) <= 1e-8


class TestTopKProjector:
    def test_deterministic_under_ties(self):
        pi = top_k_projector(np.zeros((3, 3)), 1)
        assert np.array_equal(pi.matrix, np.diag([1.0, 0.0, 0.0]))

    def test_selects_leading_space(self):
        pi = top_k_projector(np.diag([1.0, 3.0, 2.0]), 2)
        assert np.array_equal(pi.matrix, np.diag([0.0, 1.0, 1.0]))
