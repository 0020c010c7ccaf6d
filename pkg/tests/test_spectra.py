"""Operator-sum matrix and exact eigenvector extraction.

REFERENCE_* fixtures pin the n=4 case in a published basis order: the
14x14 integer matrix, its positive eigenvector at eigenvalue 8, and
the basis permutation connecting that order to the canonical one.
"""
from __future__ import annotations

import pytest

from loopmodel import fpl, patterns, spectra
from loopmodel.errors import CapacityError, ConjectureViolation

# n=4 reference data in a fixed external basis order
REFERENCE_ORDER_N4 = [
    "2 1 4 3 6 5 8 7",
    "8 3 2 5 4 7 6 1",
    "2 1 4 3 8 7 6 5",
    "6 3 2 5 4 1 8 7",
    "8 7 4 3 6 5 2 1",
    "2 1 8 5 4 7 6 3",
    "4 3 2 1 6 5 8 7",
    "8 5 4 3 2 7 6 1",
    "2 1 6 5 4 3 8 7",
    "8 3 2 7 6 5 4 1",
    "2 1 8 7 6 5 4 3",
    "4 3 2 1 8 7 6 5",
    "6 5 4 3 2 1 8 7",
    "8 7 6 5 4 3 2 1",
]

REFERENCE_H_N4 = [
    [4, 0, 2, 0, 2, 0, 2, 0, 2, 0, 2, 0, 2, 0],
    [0, 4, 0, 2, 0, 2, 0, 2, 0, 2, 0, 2, 0, 2],
    [1, 0, 3, 0, 0, 1, 0, 1, 0, 0, 0, 2, 0, 0],
    [0, 1, 0, 3, 0, 0, 1, 0, 1, 0, 0, 0, 2, 0],
    [1, 0, 0, 0, 3, 0, 0, 1, 0, 1, 0, 0, 0, 2],
    [0, 1, 1, 0, 0, 3, 0, 0, 1, 0, 2, 0, 0, 0],
    [1, 0, 0, 1, 0, 0, 3, 0, 0, 1, 0, 2, 0, 0],
    [0, 1, 1, 0, 1, 0, 0, 3, 0, 0, 0, 0, 2, 0],
    [1, 0, 0, 1, 0, 1, 0, 0, 3, 0, 0, 0, 0, 2],
    [0, 1, 0, 0, 1, 0, 1, 0, 0, 3, 2, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 2, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 2, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 2, 0],
    [0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 2],
]

REFERENCE_VECTOR_N4 = [7, 7, 3, 3, 3, 3, 3, 3, 3, 3, 1, 1, 1, 1]


def test_smallest_matrices():
    H1 = spectra.build_hamiltonian(1)
    assert H1.dense_rows() == [[2]]
    assert spectra.perron_vector(H1).components == (1,)
    H2 = spectra.build_hamiltonian(2)
    assert H2.dense_rows() == [[2, 2], [2, 2]]
    assert spectra.perron_vector(H2).components == (1, 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_column_sums_and_diagonal(n):
    H = spectra.build_hamiltonian(n)
    assert all(s == 2 * n for s in H.column_sums())
    for r, p in enumerate(patterns.enumerate_patterns(n)):
        assert H.get(r, r) == p.adjacent_arcs()


def test_reference_matrix_and_vector_n4():
    sigma = [patterns.rank(patterns.LinkPattern.from_text(t))
             for t in REFERENCE_ORDER_N4]
    assert sorted(sigma) == list(range(14))
    H = spectra.build_hamiltonian(4)
    for i in range(14):
        for j in range(14):
            assert REFERENCE_H_N4[i][j] == H.get(sigma[i], sigma[j])
    psi = spectra.perron_vector(H)
    assert [psi.components[sigma[i]] for i in range(14)] == REFERENCE_VECTOR_N4
    hist = fpl.histogram(4)
    vec = hist.as_vector()
    assert [vec[sigma[i]] for i in range(14)] == REFERENCE_VECTOR_N4


def test_diagonal_multiset_n4():
    H = spectra.build_hamiltonian(4)
    diag = sorted(H.diagonal())
    assert diag == [2, 2, 2, 2] + [3] * 8 + [4, 4]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_engines_agree(n):
    H = spectra.build_hamiltonian(n)
    a = spectra.perron_vector(H, engine="modular")
    b = spectra.perron_vector(H, engine="bareiss")
    assert a.components == b.components


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7])
def test_eigenvector_equals_census(n):
    H = spectra.build_hamiltonian(n)
    psi = spectra.perron_vector(H)
    assert list(psi.components) == fpl.histogram(n).as_vector()
    assert psi.total() == fpl.asm_count(n)
    assert psi.maximum() == fpl.asm_count(n - 1)


def test_perron_unknown_engine():
    H = spectra.build_hamiltonian(2)
    with pytest.raises(ValueError):
        spectra.perron_vector(H, engine="cubic")


def test_violation_when_no_kernel():
    # a matrix whose shifted form is invertible: no eigenvector at 2n
    M = spectra.SparseIntMatrix(2, 2, {(0, 0): 1, (1, 1): 1})
    with pytest.raises(ConjectureViolation) as exc:
        spectra.perron_vector(M)
    assert "invertible" in str(exc.value) or "no eigenvector" in str(exc.value)
    with pytest.raises(ConjectureViolation):
        spectra.perron_vector(M, engine="bareiss")


def test_violation_when_kernel_too_big():
    # shifted form is the zero matrix: kernel dimension 2, not 1
    M = spectra.SparseIntMatrix(2, 2, {(0, 0): 4, (1, 1): 4})
    with pytest.raises(ConjectureViolation) as exc:
        spectra.perron_vector(M)
    assert exc.value.details  # structured details travel with it
    with pytest.raises(ConjectureViolation):
        spectra.perron_vector(M, engine="bareiss")


def test_violation_on_nonpositive_component():
    # eigenvector at the shift exists but has a zero/negative entry:
    # [[4, 0], [0, 2]] at shift 4 has kernel (1, 0)
    M = spectra.SparseIntMatrix(2, 2, {(0, 0): 4, (1, 1): 2})
    with pytest.raises(ConjectureViolation) as exc:
        spectra.perron_vector(M)
    assert "nonpositive" in str(exc.value)


def test_matrix_ceiling():
    with pytest.raises(CapacityError):
        spectra.build_hamiltonian(10)
    with pytest.raises(CapacityError):
        spectra.build_hamiltonian(4, max_dim=5)


def test_matvec_and_exports():
    H = spectra.build_hamiltonian(3)
    ones = [1] * H.dim
    assert sum(H.matvec(ones)) == sum(H.column_sums())
    with pytest.raises(ValueError):
        H.matvec([1, 2])
    text = H.to_coo_text()
    assert text.startswith("# operator-sum matrix")
    assert len(text.splitlines()) == 1 + len(H.entries)
    obj = H.to_json_obj()
    assert obj["kind"] == "operator-sum-matrix" and obj["dim"] == 5
    psi = spectra.perron_vector(H)
    vobj = psi.to_json_obj()
    assert vobj["component_sum"] == str(fpl.asm_count(3))
    assert vobj["components"] == [str(v) for v in psi.components]


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_preimage_identity_direct(n):
    hist = fpl.histogram(n)
    sums = spectra.preimage_sums_all(n, hist)
    for r in range(patterns.catalan(n)):
        assert sums[r] == 2 * n * hist.count(r)
    # the one-target route agrees with the all-targets sweep
    probe = patterns.unrank(n, 0)
    assert spectra.preimage_sum(n, probe, hist) == sums[0]


@pytest.mark.parametrize("n", [2, 4, 6])
def test_operator_symmetry(n):
    H = spectra.build_hamiltonian(n)
    for sigma in (patterns.rotation_permutation(n),
                  patterns.reflection_permutation(n)):
        permuted = {(sigma[r], sigma[c]): v for (r, c), v in H.entries.items()}
        assert permuted == H.entries


@pytest.mark.parametrize("n", [2, 4, 6])
def test_spectral_radius_check(n):
    sc = spectra.spectral_radius_check(spectra.build_hamiltonian(n))
    assert sc.column_sums_ok and sc.converged
    assert sc.relative_error <= 1e-9
    assert sc.passed


def test_rational_reconstruction_round_trip():
    # internal helper sanity: reconstruct small fractions mod a big modulus
    m = 2147483647 * 2147483629
    for num, den in [(1, 1), (7, 3), (-5, 11), (429, 2), (0, 1)]:
        a = (num * pow(den, -1, m)) % m
        got = spectra._rational_reconstruct(a, m)
        assert got is not None
        gn, gd = got
        assert gn * den == num * gd


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_verify_conjecture_report(n):
    rep = spectra.verify_conjecture(n)
    assert rep.passed
    names = [c.name for c in rep.checks]
    assert "census-equals-eigenvector" in names
    assert "preimage-identity" in names
    obj = rep.to_json_obj()
    assert obj["kind"] == "verification-report"
    assert obj["passed"] is True
    assert len(obj["checks"]) == len(rep.checks)
    lines = rep.summary_lines()
    assert len(lines) == len(rep.checks) + 1
    assert all(line.startswith("[pass]") for line in lines)


def test_verify_conjecture_reports_failure_structurally():
    # a corrupted histogram must fail verification, not crash it
    rep = spectra.VerificationReport(3)
    rep.add("probe", False, "synthetic failure")
    assert not rep.passed
    assert "[FAIL]" in rep.summary_lines()[0]


@pytest.mark.slow
def test_verify_conjecture_n7():
    rep = spectra.verify_conjecture(7)
    assert rep.passed


@pytest.mark.long
def test_verify_conjecture_n8():
    rep = spectra.verify_conjecture(8)
    assert rep.passed
