"""Strain smoothing: cell-wise strain-displacement operators by boundary
integration, and element stiffness assembly over smoothing cells.

For a cell C with area A and CCW boundary, the smoothed operator per node
I is

    B_I = (1/A) * integral over dC of [[N_I nx, 0], [0, N_I ny],
                                        [N_I ny, N_I nx]] dGamma,

with n the outward unit normal; the element stiffness is the cell sum
K = sum_C B_C^T D B_C A_C t. Boundary integrals use Gauss-Legendre points
per straight segment: 2 by default for the rational and polynomial
schemes, the native single midpoint for the averaged scheme.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import ZeroArea
from .mesh import subdivide_adaptive
from .shapefn import shape_evaluator

log = logging.getLogger(__name__)

GAUSS_1D = {n: leggauss(n) for n in (1, 2, 3, 4)}


@dataclass(frozen=True)
class MaterialModel:
    """Plane-stress isotropic elasticity."""

    youngs_modulus: float
    poisson_ratio: float
    thickness: float = 1.0

    def __post_init__(self):
        if self.youngs_modulus <= 0:
            raise ValueError("Young's modulus must be positive")
        if not 0.0 <= self.poisson_ratio < 0.5:
            raise ValueError("Poisson ratio must be in [0, 0.5)")
        if self.thickness <= 0:
            raise ValueError("thickness must be positive")


def elasticity_matrix(material):
    """Plane-stress 3x3 stress-strain matrix."""
    e = material.youngs_modulus
    nu = material.poisson_ratio
    f = e / (1.0 - nu * nu)
    return f * np.array(
        [[1.0, nu, 0.0], [nu, 1.0, 0.0], [0.0, 0.0, 0.5 * (1.0 - nu)]]
    )


def default_quadrature(scheme):
    """Gauss points per boundary segment: midpoint for the averaged
    scheme (its native definition), 2 otherwise."""
    return 1 if scheme == "averaged" else 2


@dataclass(frozen=True, eq=False)
class SmoothedBMatrix:
    entries: np.ndarray  # (3, 8)
    cell_area: float


def boundary_flux(cell, evaluator, n_points=2):
    """Per-node boundary integrals (bx_I, by_I) = integral of N_I * n over
    the cell boundary, as a (4, 2) array."""
    verts = cell.vertices
    xi, wq = GAUSS_1D[n_points]
    v0 = verts
    v1 = np.roll(verts, -1, axis=0)
    edges = v1 - v0                                   # (m, 2)
    lengths = np.hypot(edges[:, 0], edges[:, 1])      # (m,)
    normals = np.column_stack([edges[:, 1], -edges[:, 0]])  # outward for CCW
    normals /= np.where(lengths > 0.0, lengths, 1.0)[:, None]
    # all quadrature points of all segments in one evaluator call
    mids = 0.5 * (v0 + v1)
    pts = mids[:, None, :] + 0.5 * xi[None, :, None] * edges[:, None, :]
    nvals = np.asarray(evaluator(pts.reshape(-1, 2)))
    nvals = nvals.reshape(len(verts), n_points, 4)
    weights = 0.5 * lengths[:, None] * wq[None, :]    # (m, n_points)
    per_segment = np.einsum("sq,sqi->si", weights, nvals)  # (m, 4)
    return np.einsum("si,sd->id", per_segment, normals)


def smoothed_b(cell, evaluator, n_points=2):
    """Smoothed 3x8 strain-displacement matrix of one cell."""
    if cell.area <= 0.0:
        raise ZeroArea(f"cell of element {cell.parent_element} has zero area")
    flux = boundary_flux(cell, evaluator, n_points) / cell.area
    b = np.zeros((3, 8))
    for i in range(4):
        bx, by = flux[i]
        b[0, 2 * i] = bx
        b[1, 2 * i + 1] = by
        b[2, 2 * i] = by
        b[2, 2 * i + 1] = bx
    return SmoothedBMatrix(entries=b, cell_area=cell.area)


@dataclass(frozen=True, eq=False)
class ElementStiffness:
    k: np.ndarray                # (8, 8)
    cells: list                  # SmoothingCell per smoothing domain
    b_matrices: list             # SmoothedBMatrix per cell
    zero_modes: int              # eigenvalues below 1e-9 * max

    @property
    def spurious_modes(self):
        """Zero-energy modes beyond the three rigid-body ones."""
        return max(0, self.zero_modes - 3)


def element_stiffness(quad, k_cells, scheme, material, n_points=None,
                      split="12-34"):
    """Stiffness of one element smoothed over k_cells subcells.

    k_cells=1 is permitted but known to carry spurious zero-energy modes;
    a rank check runs on every element and warns when they appear.
    """
    if n_points is None:
        n_points = default_quadrature(scheme)
    cells, k_used, split_used = subdivide_adaptive(quad, k_cells, split=split)
    if k_used != k_cells:
        log.debug("element too concave for %d cells; smoothed with %d",
                  k_cells, k_used)
    evaluator = shape_evaluator(scheme, quad, k_used, split_used)
    d = elasticity_matrix(material)
    t = material.thickness
    k = np.zeros((8, 8))
    bmats = []
    for cell in cells:
        bm = smoothed_b(cell, evaluator, n_points)
        bmats.append(bm)
        k += (bm.entries.T @ d @ bm.entries) * (cell.area * t)
    k = 0.5 * (k + k.T)
    eigs = np.linalg.eigvalsh(k)
    zero_modes = int(np.sum(eigs < 1e-9 * max(eigs.max(), 0.0)))
    stiff = ElementStiffness(k=k, cells=cells, b_matrices=bmats,
                             zero_modes=zero_modes)
    if k_cells == 1 and stiff.spurious_modes:
        warnings.warn(
            f"single-cell smoothing leaves {stiff.spurious_modes} spurious "
            "zero-energy mode(s); use 2 or 4 cells for a full-rank element",
            stacklevel=2,
        )
    return stiff
