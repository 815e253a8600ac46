import math

import numpy as np
import pytest

import fraclap


@pytest.fixture(scope="module")
def square():
    mesh = fraclap.unit_square_mesh(10)
    A = fraclap.assemble(mesh, 0.5)
    return mesh, A, np.linalg.inv(A)


def test_meshes():
    m = fraclap.unit_square_mesh(4)
    assert (m.dim, m.num_elements, m.num_dofs) == (2, 32, 9)
    assert m.vertices.shape == (m.num_vertices, 2)
    assert m.elements.shape == (32, 3)
    assert fraclap.refine(m).num_elements == 128
    assert fraclap.domain_mesh("lshape", 2).num_elements == 24
    back = fraclap.mesh_from_json(m.to_json())
    assert np.array_equal(back.vertices, m.vertices)
    assert back.dof_vertices == m.dof_vertices


def test_normalization_constant():
    d, s = 2, 0.5
    expected = 2 ** (2 * s) * s * math.gamma((d + 2 * s) / 2) / (math.pi ** (d / 2) * math.gamma(1 - s))
    assert fraclap.normalization_constant(d, s) == pytest.approx(expected, rel=1e-14)


def test_stiffness_structure(square):
    mesh, A, _ = square
    assert A.shape == (mesh.num_dofs, mesh.num_dofs)
    assert np.array_equal(A, A.T)
    assert np.linalg.eigvalsh(A).min() > 0


def test_entry_oracle_1d():
    mesh = fraclap.interval_mesh(8)
    A = fraclap.assemble(mesh, 0.25)
    for i, j in [(0, 0), (2, 3), (1, 5)]:
        assert A[i, j] == pytest.approx(fraclap.entry_oracle(mesh, 0.25, i, j), rel=1e-6)


def test_dense_linear_algebra():
    rng = np.random.default_rng(7)
    M = rng.uniform(-1, 1, (12, 9))
    U, sigma, V = fraclap.svd(M)
    assert np.allclose(sigma, np.linalg.svd(M, compute_uv=False), rtol=0, atol=1e-12)
    assert np.allclose(U * sigma @ V.T, M, atol=1e-12)
    X, Y = fraclap.truncated_svd(M, 3)
    ref = np.linalg.svd(M, compute_uv=False)
    assert np.linalg.norm(M - X @ Y.T, 2) == pytest.approx(ref[3], rel=1e-10)
    S = M.T @ M + np.eye(9)
    assert np.allclose(fraclap.lu_invert(S) @ S, np.eye(9), atol=1e-12)
    est = fraclap.norm2(M, tol=1e-12, max_iter=5000)
    assert est.converged
    assert est.value == pytest.approx(ref[0], rel=1e-8)


def test_errors():
    with pytest.raises(fraclap.InputError):
        fraclap.domain_mesh("disk", 4)
    with pytest.raises(ValueError):
        fraclap.mesh_from_json("{}")
    with pytest.raises(fraclap.NumericalError):
        fraclap.lu_invert(np.zeros((3, 3)))


def test_compression(square):
    mesh, A, Ainv = square
    inv = fraclap.lu_invert(A)
    assert np.allclose(inv, Ainv, rtol=0, atol=1e-10 * np.abs(Ainv).max())
    tree = fraclap.cluster_tree(mesh, n_leaf=8)
    assert sorted(tree.perm) == list(range(mesh.num_dofs))
    part = fraclap.block_partition(tree, eta=2.0)
    assert part.num_far > 0
    full = fraclap.compress(inv, tree, part, rank=mesh.num_dofs)
    v = np.random.default_rng(1).standard_normal(mesh.num_dofs)
    assert np.allclose(full.matvec(v), inv @ v, atol=1e-12)
    assert np.allclose(full.rmatvec(v), inv.T @ v, atol=1e-12)
    errors = []
    for r in (1, 2, 4):
        H = fraclap.compress(inv, tree, part, rank=r)
        dense = np.column_stack([H.matvec(e) for e in np.eye(mesh.num_dofs)])
        ref = np.linalg.norm(inv - dense, 2)
        est = H.error(inv, tol=1e-10, max_iter=5000)
        assert est.value == pytest.approx(ref, rel=1e-6)
        errors.append(ref)
    assert errors[0] >= errors[1] >= errors[2]


def test_study_and_fit(tmp_path):
    seen = []
    records = fraclap.run_study("square", 9, s_values=[0.5], n_leaf=8, ranks=[1, 2, 3, 4], progress=seen.append)
    assert [r.r for r in records] == [1, 2, 3, 4]
    assert seen == records
    assert fraclap.run_study("square", 9, s_values=[0.5], n_leaf=8, ranks=[1, 2, 3, 4], threads=4) == records
    path = str(tmp_path / "study.csv")
    fraclap.save_study_csv(path, records)
    assert fraclap.load_study_csv(path) == records
    fits = fraclap.fit_by_s(records, floor=0.0)
    assert set(fits) == {0.5}
    x = np.cbrt([r.r for r in records])
    y = np.log([r.error_2norm for r in records])
    slope = np.polyfit(x, y, 1)[0]
    assert fits[0.5].b == pytest.approx(-slope, rel=1e-10)
