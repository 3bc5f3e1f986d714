"""Tests for CSA discovery, root decomposition and regularity."""
import numpy as np
import pytest

from comm_tool.core.algebra import Element, ad_matrix, bracket, norm
from comm_tool.core.exceptions import DegenerateReference, NotACsa, NotInCsa
from comm_tool.core.numerics import Subspace, orthonormalize
from comm_tool.services.cartan_service import (
    TWO_PI,
    build_frame,
    centralizer,
    coroot_direction,
    csa_residual,
    find_csa,
    is_abelian,
    is_regular,
    project,
    regularity_margin,
    root_decomposition,
    root_kernel,
)

from .conftest import algebra_of, frame_of


@pytest.mark.parametrize("label, rank, positive_roots", [
    ("su:2", 1, 1),
    ("su:3", 2, 3),
    ("so:3", 1, 1),
    ("so:4", 2, 2),
    ("so:5", 2, 4),
    ("so:6", 3, 6),
    ("su:4", 3, 6),
    ("so:7", 3, 9),
    ("sum:su:2+so:3", 2, 2),
    ("sum:su:2+so:5", 3, 5),
])
def test_root_counts(label, rank, positive_roots):
    frame = frame_of(label)
    assert frame.rank == rank
    assert len(frame.roots) == positive_roots
    assert frame.dimension_identity()


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_find_csa_has_rank_dimension(seed):
    g = algebra_of("so:5")
    h = find_csa(g, seed)
    assert h.dim == g.rank
    assert is_abelian(h)
    assert h.gram_residual() < 1e-10


def test_find_csa_is_deterministic():
    g = algebra_of("su:3")
    np.testing.assert_array_equal(find_csa(g, 5).basis, find_csa(g, 5).basis)


def test_root_planes_carry_the_root_action(label):
    frame = frame_of(label)
    for root in frame.roots:
        for j, h in enumerate(frame.h.vectors()):
            a = TWO_PI * root.alpha[j]
            assert norm(bracket(h, root.e) - root.f * a) < 1e-8
            assert norm(bracket(h, root.f) + root.e * a) < 1e-8


def test_roots_are_positive_on_the_reference(label):
    frame = frame_of(label)
    assert np.all(frame.root_values(frame.H_ref) > 0)


def test_frame_is_orthonormal_decomposition(label):
    frame = frame_of(label)
    g = frame.algebra
    E, F = frame.plane_rows
    rows = np.vstack([frame.h.basis, E, F])
    gram = rows @ g.metric @ rows.T
    np.testing.assert_allclose(gram, np.eye(g.dim), atol=1e-9)


def test_project_reassembles(su3_frame, rng):
    X = su3_frame.algebra.random_element(rng)
    parts = project(su3_frame, X)
    assert norm(parts.reassemble() - X) < 1e-10
    total = norm(parts.h_part) ** 2 + np.sum(parts.root_parts ** 2)
    assert total == pytest.approx(norm(X) ** 2, rel=1e-10)


def test_root_parts_are_root_elements(su3_frame, rng):
    X = su3_frame.algebra.random_element(rng)
    parts = project(su3_frame, X)
    for index, root in enumerate(su3_frame.roots):
        piece = parts.root_element(index)
        t_e, t_f = parts.root_parts[index]
        assert norm(piece) == pytest.approx(np.hypot(t_e, t_f), rel=1e-10)


def test_coroot_direction_and_kernel(su3_frame):
    for root in su3_frame.roots:
        u = coroot_direction(su3_frame, root)
        assert norm(u) == pytest.approx(1.0, abs=1e-12)
        assert root(su3_frame.csa_coefficients(u)) > 0
        kernel = root_kernel(su3_frame, root)
        assert kernel.dim == su3_frame.rank - 1
        for w in kernel.vectors():
            assert abs(root(su3_frame.csa_coefficients(w))) < 1e-10


def test_regularity(su3_frame):
    g = su3_frame.algebra
    assert is_regular(su3_frame, su3_frame.H_ref)
    assert not is_regular(su3_frame, g.zero())
    u = coroot_direction(su3_frame, su3_frame.roots[0])
    kernel = root_kernel(su3_frame, su3_frame.roots[0]).vectors()[0]
    assert not is_regular(su3_frame, kernel)
    assert regularity_margin(su3_frame, kernel) < 1e-9
    assert regularity_margin(su3_frame, u) >= 0


def test_is_regular_rejects_elements_outside_the_csa(su3_frame):
    E = su3_frame.roots[0].e
    assert csa_residual(su3_frame, E) == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(NotInCsa):
        is_regular(su3_frame, E)


def test_root_decomposition_rejects_non_abelian_subspace():
    g = algebra_of("so:3")
    with pytest.raises(NotACsa):
        root_decomposition(g, Subspace.full(g))


def test_root_decomposition_rejects_small_abelian_subspace():
    g = algebra_of("su:3")
    line = orthonormalize([g.basis_element(0)])
    with pytest.raises(NotACsa):
        root_decomposition(g, line, rng=0, max_tries=3)


def test_root_decomposition_gives_up_on_degenerate_references():
    g = algebra_of("su:3")
    h = find_csa(g, 0)
    with pytest.raises(DegenerateReference):
        root_decomposition(g, h, rng=0, max_tries=2, genericity=0.99)


def test_centralizer_of_regular_element_is_the_csa(su3_frame):
    cen = centralizer(su3_frame.algebra, su3_frame.H_ref)
    assert cen.dim == su3_frame.rank
    residual = cen.basis - cen.basis @ su3_frame.algebra.metric @ su3_frame.h.basis.T @ su3_frame.h.basis
    assert np.max(np.abs(residual)) < 1e-8


def test_frame_record_fields():
    record = frame_of("so:6").to_record(0)
    assert record.dim == 15
    assert record.rank == 3
    assert record.positive_roots == 6
    assert record.dimension_check
    assert len(record.roots) == 6
    assert len(record.roots[0].alpha) == 3


def test_build_frame_is_seed_deterministic():
    g = algebra_of("so:5")
    first = build_frame(g, np.random.default_rng(3)).to_record(3)
    second = build_frame(g, np.random.default_rng(3)).to_record(3)
    assert first == second


def test_centralizer_small_cases():
    su2 = algebra_of("su:2")
    assert centralizer(su2, su2.zero()).dim == 3
    A = su2.from_matrix(np.diag([0.5j, -0.5j]))
    line = centralizer(su2, A)
    assert line.dim == 1
    assert norm(line.project(A) - A) < 1e-10


def test_project_of_frame_vectors():
    frame = frame_of("su:3")
    h1 = frame.h.vectors()[0]
    parts = project(frame, h1)
    assert norm(parts.h_part - h1) < 1e-12
    assert np.max(np.abs(parts.root_parts)) < 1e-12
    e = frame.roots[1].e
    parts = project(frame, e)
    assert norm(parts.h_part) < 1e-12
    np.testing.assert_allclose(parts.root_parts[1], [1.0, 0.0], atol=1e-12)


def test_centralizer_is_orthogonal_to_image(label):
    g = algebra_of(label)
    rng = np.random.default_rng(21)
    for _ in range(20):
        A = g.random_element(rng)
        cen = centralizer(g, A)
        image = ad_matrix(A).matrix
        overlap = np.abs(cen.basis @ g.metric @ image).max()
        assert overlap <= 1e-8 * max(1.0, norm(A))
        assert cen.dim + np.linalg.matrix_rank(image) == g.dim


@pytest.mark.parametrize("label", ["su:3", "so:5"])
def test_centralizer_dimension_counts_vanishing_roots(label):
    frame = frame_of(label)
    g = frame.algebra
    rng = np.random.default_rng(4)
    for root in frame.roots:
        kernel = root_kernel(frame, root)
        H = Element(g, rng.standard_normal(kernel.dim) @ kernel.basis)
        values = np.abs(frame.root_values(H))
        vanishing = int(np.sum(values <= 1e-9 * values.max()))
        assert vanishing >= 1
        assert centralizer(g, H).dim == g.rank + 2 * vanishing
    # no root vanishes on the reference element
    assert centralizer(g, frame.H_ref).dim == g.rank
