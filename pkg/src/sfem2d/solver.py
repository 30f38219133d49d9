"""Global assembly, boundary conditions, direct solve, and strain
recovery for plane-stress problems on quad meshes.

DOF layout: node i owns (2i, 2i+1) = (ux, uy). Constraints are applied by
row/column elimination with load correction; the strain energy is always
evaluated through the unreduced stiffness so prescribed DOFs contribute.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    AllDofsFixed,
    SfemError,
    SingularSystem,
    UnknownTag,
)
from .mesh import EDGE_CORNERS, subdivide_adaptive
from .shapefn import shape_evaluator
from .smoothing import (
    GAUSS_1D,
    default_quadrature,
    element_stiffness,
    smoothed_b,
)


@dataclass(frozen=True)
class DofMap:
    """Node id -> (ux, uy) global indices."""

    num_nodes: int

    def ux(self, node):
        return 2 * node

    def uy(self, node):
        return 2 * node + 1

    @property
    def total_dofs(self):
        return 2 * self.num_nodes

    def element_dofs(self, element):
        out = []
        for n in element.node_ids:
            out.extend((2 * n, 2 * n + 1))
        return np.array(out)


@dataclass(eq=False)
class GlobalSystem:
    mesh: object
    stiffness: sp.csr_matrix
    load: np.ndarray
    fixed: dict = field(default_factory=dict)  # dof -> prescribed value
    scheme: str = "wachspress"
    k_cells: int = 4


@dataclass(eq=False)
class Solution:
    u: np.ndarray
    strain_energy: float
    residual: float
    fixed_dofs: np.ndarray
    reactions: np.ndarray
    per_cell_strains: list | None = None


def assemble(mesh, scheme, k_cells, material, n_points=None, split="12-34"):
    """Scatter element stiffness into a sparse symmetric global matrix."""
    dofs = DofMap(mesh.num_nodes)
    rows, cols, vals = [], [], []
    for e in range(mesh.num_elements):
        try:
            ke = element_stiffness(
                mesh.element_coords(e), k_cells, scheme, material,
                n_points=n_points, split=split,
            )
        except SfemError as err:
            raise type(err)(f"element {e}: {err}") from err
        edofs = dofs.element_dofs(mesh.elements[e])
        idx = np.repeat(edofs, 8)
        rows.append(idx)
        cols.append(np.tile(edofs, 8))
        vals.append(ke.k.ravel())
    n = dofs.total_dofs
    k = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    ).tocsr()
    k = 0.5 * (k + k.T)
    return GlobalSystem(mesh=mesh, stiffness=k, load=np.zeros(n),
                        scheme=scheme, k_cells=k_cells)


def apply_tractions(mesh, edge_tag, traction, n_points=2, scheme="wachspress",
                    k_cells=4):
    """Consistent nodal loads for a traction field on tagged boundary edges.

    ``traction(x, y) -> (tx, ty)`` is force per unit edge length. The
    wachspress and averaged schemes restrict linearly to element edges, so
    the edge-node hat functions carry the load; the lagrange scheme is not
    edge-linear and gets its actual shape values, spread over all four
    element nodes.
    """
    edges = [be for be in mesh.boundary_edges if be.tag == edge_tag]
    if not edges:
        raise UnknownTag(f"no boundary edge tagged {edge_tag!r}")
    load = np.zeros(2 * mesh.num_nodes)
    xi, wq = GAUSS_1D[n_points]
    for be in edges:
        el = mesh.elements[be.element]
        quad = mesh.element_coords(be.element)
        a, b = EDGE_CORNERS[be.local_edge]
        v0, v1 = quad[a], quad[b]
        edge = v1 - v0
        length = float(np.hypot(edge[0], edge[1]))
        pts = 0.5 * (v0 + v1) + 0.5 * np.outer(xi, edge)
        tvals = np.array([traction(x, y) for x, y in pts])  # (n_points, 2)
        weights = 0.5 * length * wq
        if scheme == "lagrange":
            nvals = np.asarray(shape_evaluator(scheme, quad, k_cells)(pts))
            for i, node in enumerate(el.node_ids):
                fi = (weights * nvals[:, i]) @ tvals
                load[2 * node : 2 * node + 2] += fi
        else:
            shape_a = 0.5 * (1.0 - xi)
            shape_b = 0.5 * (1.0 + xi)
            fa = (weights * shape_a) @ tvals
            fb = (weights * shape_b) @ tvals
            na, nb = el.node_ids[a], el.node_ids[b]
            load[2 * na : 2 * na + 2] += fa
            load[2 * nb : 2 * nb + 2] += fb
    return load


def apply_dirichlet(system, node_ids, displacement):
    """Prescribe both displacement components of the given nodes from
    ``displacement(x, y) -> (ux, uy)``. Returns the system for chaining."""
    for n in node_ids:
        nd = system.mesh.nodes[n]
        ux, uy = displacement(nd.x, nd.y)
        if not (np.isfinite(ux) and np.isfinite(uy)):
            raise ValueError(f"prescribed displacement at node {n} not finite")
        system.fixed[2 * n] = float(ux)
        system.fixed[2 * n + 1] = float(uy)
    if len(system.fixed) >= system.stiffness.shape[0]:
        raise AllDofsFixed("every degree of freedom is prescribed")
    return system


def fix_dof(system, dof, value=0.0):
    """Prescribe a single degree of freedom."""
    system.fixed[dof] = float(value)
    if len(system.fixed) >= system.stiffness.shape[0]:
        raise AllDofsFixed("every degree of freedom is prescribed")
    return system


def _rank_diagnostics(k_red):
    n = k_red.shape[0]
    if n > 2000:
        return f"{n} free DOFs (too large for a dense rank check)"
    eigs = np.linalg.eigvalsh(k_red.toarray())
    tol = 1e-9 * max(abs(eigs).max(), 1e-300)
    n_zero = int(np.sum(np.abs(eigs) < tol))
    return (
        f"reduced matrix has {n_zero} near-zero eigenvalue(s) out of {n}; "
        "suspect single-cell spurious modes or missing constraints"
    )


def solve(system):
    """Direct symmetric solve of the constrained system.

    Enforces the residual contract |K u - f| / |f| < 1e-10 on the reduced
    system and reports the strain energy 0.5 u^T K u through the full
    stiffness (prescribed DOFs included).
    """
    n = system.stiffness.shape[0]
    fixed_dofs = np.array(sorted(system.fixed), dtype=int)
    fixed_vals = np.array([system.fixed[d] for d in fixed_dofs])
    free = np.setdiff1d(np.arange(n), fixed_dofs)
    if free.size == 0:
        raise AllDofsFixed("every degree of freedom is prescribed")

    k = system.stiffness
    k_ff = k[free][:, free]
    rhs = system.load[free]
    if fixed_dofs.size:
        rhs = rhs - k[free][:, fixed_dofs] @ fixed_vals

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", spla.MatrixRankWarning)
        u_free = spla.spsolve(k_ff.tocsc(), rhs)
    if not np.all(np.isfinite(u_free)):
        raise SingularSystem(_rank_diagnostics(k_ff))
    resid = np.linalg.norm(k_ff @ u_free - rhs)
    scale = max(np.linalg.norm(rhs),
                abs(k_ff).max() * max(np.abs(u_free).max(), 1.0) * 1e-6)
    rel = resid / scale if scale > 0 else resid
    if rel > 1e-10:
        raise SingularSystem(
            f"solver residual {rel:.3e} exceeds 1e-10; " + _rank_diagnostics(k_ff)
        )

    u = np.zeros(n)
    u[free] = u_free
    u[fixed_dofs] = fixed_vals
    ku = k @ u
    energy = 0.5 * float(u @ ku)
    reactions = ku[fixed_dofs] - system.load[fixed_dofs]
    return Solution(u=u, strain_energy=energy, residual=rel,
                    fixed_dofs=fixed_dofs, reactions=reactions)


def cell_strains(mesh, u, scheme, k_cells, n_points=None, split="12-34"):
    """Smoothed strain per cell: list of (SmoothingCell, 3-vector)."""
    if n_points is None:
        n_points = default_quadrature(scheme)
    dofs = DofMap(mesh.num_nodes)
    out = []
    for e in range(mesh.num_elements):
        quad = mesh.element_coords(e)
        cells, k_used, split_used = subdivide_adaptive(
            quad, k_cells, parent_element=e, split=split)
        evaluator = shape_evaluator(scheme, quad, k_used, split_used)
        ue = u[dofs.element_dofs(mesh.elements[e])]
        for cell in cells:
            bm = smoothed_b(cell, evaluator, n_points)
            out.append((cell, bm.entries @ ue))
    return out
