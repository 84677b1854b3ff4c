# Copyright 2020 Peter Bencze
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Plane-stress finite elements with eight-node serendipity quadrilaterals on rectangular grids.

Element tensors are constant per element and given as Kelvin–Mandel matrices, so the strain-displacement matrix maps
element displacements to (e11, e22, sqrt(2) e12). All elements of a mesh share the same geometry, hence the
strain-displacement matrices at the 3x3 Gauss points are computed once per mesh.
"""

import logging
import math
from typing import Callable, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import factorized

from hsfomo.design_field import DesignField
from hsfomo.errors import SingularStiffnessError, SolverBreakdownError
from hsfomo.load_case import LoadCase
from hsfomo.mesh import Mesh

logger = logging.getLogger(__name__)

_GAUSS_POINTS = (-math.sqrt(0.6), 0.0, math.sqrt(0.6))
_GAUSS_WEIGHTS = (5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0)
_NATURAL_NODES = np.array([(-1, -1), (1, -1), (1, 1), (-1, 1), (0, -1), (1, 0), (0, 1), (-1, 0)], dtype=float)
_RESIDUAL_TOL = 1e-9


def shape_derivatives(xi: float, eta: float) -> np.ndarray:
    """
    Returns the derivatives of the serendipity shape functions in natural coordinates.

    :param xi: the first natural coordinate
    :param eta: the second natural coordinate
    :return: an array of shape (8, 2) holding (dN/dxi, dN/deta) per node
    """

    derivatives = np.empty((8, 2))
    for k, (xi_k, eta_k) in enumerate(_NATURAL_NODES):
        if k < 4:
            derivatives[k, 0] = 0.25 * xi_k * (1.0 + eta * eta_k) * (2.0 * xi * xi_k + eta * eta_k)
            derivatives[k, 1] = 0.25 * eta_k * (1.0 + xi * xi_k) * (xi * xi_k + 2.0 * eta * eta_k)
        elif xi_k == 0.0:
            derivatives[k, 0] = -xi * (1.0 + eta * eta_k)
            derivatives[k, 1] = 0.5 * (1.0 - xi * xi) * eta_k
        else:
            derivatives[k, 0] = 0.5 * xi_k * (1.0 - eta * eta)
            derivatives[k, 1] = -eta * (1.0 + xi * xi_k)

    return derivatives


def strain_displacement(mesh: Mesh, xi: float, eta: float) -> np.ndarray:
    """
    Returns the Kelvin–Mandel strain-displacement matrix of a mesh element at a natural point.

    :param mesh: the mesh
    :param xi: the first natural coordinate
    :param eta: the second natural coordinate
    :return: an array of shape (3, 16)
    """

    derivatives = shape_derivatives(xi, eta)
    dndx = derivatives[:, 0] * (2.0 / mesh.element_width)
    dndy = derivatives[:, 1] * (2.0 / mesh.element_height)
    b = np.zeros((3, 16))
    b[0, 0::2] = dndx
    b[1, 1::2] = dndy
    b[2, 0::2] = dndy / math.sqrt(2.0)
    b[2, 1::2] = dndx / math.sqrt(2.0)
    return b


def _quadrature(mesh: Mesh) -> Tuple[np.ndarray, np.ndarray]:
    det_j = 0.25 * mesh.element_area
    matrices, weights = [], []
    for xi, w_xi in zip(_GAUSS_POINTS, _GAUSS_WEIGHTS):
        for eta, w_eta in zip(_GAUSS_POINTS, _GAUSS_WEIGHTS):
            matrices.append(strain_displacement(mesh, xi, eta))
            weights.append(w_xi * w_eta * det_j)

    return np.array(matrices), np.array(weights)


def _element_basis(mesh: Mesh) -> np.ndarray:
    b, w = _quadrature(mesh)
    return np.einsum('g,gai,gbj->abij', w, b, b)


def element_stiffness(mesh: Mesh, tensors: np.ndarray) -> np.ndarray:
    """
    Returns the element stiffness matrices, which are linear in the element tensors.

    :param mesh: the mesh
    :param tensors: the Kelvin–Mandel matrices, shape (n, 3, 3)
    :return: an array of shape (n, 16, 16)
    """

    return np.einsum('eab,abij->eij', np.asarray(tensors, dtype=float), _element_basis(mesh))


def assemble_full(mesh: Mesh, tensors: np.ndarray) -> sparse.csr_matrix:
    """
    Assembles the unconstrained global stiffness matrix.

    :param mesh: the mesh
    :param tensors: the Kelvin–Mandel matrices, shape (element_count, 3, 3)
    :return: the sparse stiffness matrix
    """

    ke = element_stiffness(mesh, tensors)
    dofs = mesh.element_dofs
    rows = np.repeat(dofs, 16, axis=1).ravel()
    cols = np.tile(dofs, (1, 16)).ravel()
    k = sparse.coo_matrix((ke.ravel(), (rows, cols)), shape=(mesh.dof_count, mesh.dof_count)).tocsr()
    k.sum_duplicates()
    return k


def free_dofs(mesh: Mesh, fixed_dofs: np.ndarray) -> np.ndarray:
    """
    Returns the unconstrained degrees of freedom.

    :param mesh: the mesh
    :param fixed_dofs: the constrained degrees of freedom
    :return: the sorted free degrees of freedom
    """

    return np.setdiff1d(np.arange(mesh.dof_count), fixed_dofs)


def assemble(mesh: Mesh, tensors: np.ndarray, fixed_dofs: np.ndarray) -> sparse.csr_matrix:
    """
    Assembles the stiffness matrix reduced to the free degrees of freedom.

    :param mesh: the mesh
    :param tensors: the Kelvin–Mandel matrices, shape (element_count, 3, 3)
    :param fixed_dofs: the constrained degrees of freedom
    :return: the reduced sparse stiffness matrix
    :raise SingularStiffnessError: if the constraints cannot suppress the rigid body motions
    """

    fixed_dofs = np.asarray(fixed_dofs)
    if fixed_dofs.size < 3 or not np.any(fixed_dofs % 2 == 0) or not np.any(fixed_dofs % 2 == 1):
        raise SingularStiffnessError()

    free = free_dofs(mesh, fixed_dofs)
    return assemble_full(mesh, tensors)[free][:, free]


class StateSolution:
    """Equilibrium displacements and compliances of every load case for one design."""

    def __init__(self, displacements: np.ndarray, compliances: np.ndarray, solver: Callable[[np.ndarray], np.ndarray]
                 ) -> None:
        """
        Creates a new state solution instance.

        :param displacements: the full displacement vectors, shape (loadcases, dof_count)
        :param compliances: the compliance of every load case
        :param solver: the factorized reduced stiffness
        """

        self._displacements = displacements
        self._compliances = compliances
        self._solver = solver

    @property
    def displacements(self) -> np.ndarray:
        """
        Returns the displacement vectors, one column per load case.

        :return: the displacement vectors, one column per load case
        """

        return self._displacements

    @property
    def compliances(self) -> np.ndarray:
        """
        Returns the compliance of every load case.

        :return: the compliance of every load case
        """

        return self._compliances

    @property
    def solver(self) -> Callable[[np.ndarray], np.ndarray]:
        """
        Returns the factorized stiffness solver.

        :return: the factorized stiffness solver
        """

        return self._solver

    @property
    def total_compliance(self) -> float:
        """
        Returns the sum of the load case compliances.

        :return: the total compliance
        """

        return float(np.sum(self._compliances))

    def __str__(self) -> str:
        """
        Returns the string representation of the state solution.

        :return: the string representation of the state solution
        """

        return f'StateSolution(compliances={self._compliances.tolist()})'


def solve_state(mesh: Mesh, design: DesignField, loadcases: Sequence[LoadCase]) -> StateSolution:
    """
    Solves the equilibrium equations of all load cases with one factorization.

    :param mesh: the mesh
    :param design: the design field
    :param loadcases: the load cases, which must share their constraints
    :return: the state solution
    :raise SingularStiffnessError: if the reduced stiffness matrix is singular
    :raise SolverBreakdownError: if a relative residual exceeds 1e-9
    """

    fixed = loadcases[0].fixed_dofs
    if any(not np.array_equal(loadcase.fixed_dofs, fixed) for loadcase in loadcases[1:]):
        raise ValueError('Load cases must share their fixed degrees of freedom')

    free = free_dofs(mesh, fixed)
    k = assemble(mesh, design.tensors, fixed)
    try:
        solver = factorized(k.tocsc())
    except RuntimeError as error:
        raise SingularStiffnessError() from error

    displacements = np.zeros((len(loadcases), mesh.dof_count))
    compliances = np.empty(len(loadcases))
    for j, loadcase in enumerate(loadcases):
        f = loadcase.load_vector(mesh.dof_count)[free]
        u = solver(f)
        residual = float(np.linalg.norm(k @ u - f) / np.linalg.norm(f))
        if not np.isfinite(residual) or residual > _RESIDUAL_TOL:
            raise SolverBreakdownError(residual)

        displacements[j, free] = u
        compliances[j] = float(f @ u)
        logger.debug('Load case %d: compliance %.9g, residual %.3e', j, compliances[j], residual)

    return StateSolution(displacements, compliances, solver)


def _gauss_strains(mesh: Mesh, state: StateSolution) -> Tuple[np.ndarray, np.ndarray]:
    b, w = _quadrature(mesh)
    local = state.displacements[:, mesh.element_dofs]
    return np.einsum('gai,jei->jega', b, local), w


def element_fields(mesh: Mesh, design: DesignField, state: StateSolution) -> Tuple[np.ndarray, np.ndarray]:
    """
    Returns the element-averaged strains and stresses of every load case.

    :param mesh: the mesh
    :param design: the design field
    :param state: the state solution
    :return: strains and stresses, each of shape (loadcases, element_count, 3)
    """

    strains, w = _gauss_strains(mesh, state)
    averaged = np.einsum('g,jega->jea', w, strains) / mesh.element_area
    stresses = np.einsum('eab,jeb->jea', design.tensors, averaged)
    return averaged, stresses


def compliance_sensitivities(mesh: Mesh, state: StateSolution) -> np.ndarray:
    """
    Returns the derivatives of every load case compliance with respect to every element tensor.

    :param mesh: the mesh
    :param state: the state solution
    :return: negative semidefinite matrices of shape (loadcases, element_count, 3, 3)
    """

    strains, w = _gauss_strains(mesh, state)
    return -np.einsum('g,jega,jegb->jeab', w, strains, strains)


def compliance_sensitivity(mesh: Mesh, design: DesignField, state: StateSolution, element: int,
                           loadcase: int) -> np.ndarray:
    """
    Returns the derivative of one load case compliance with respect to one element tensor.

    :param mesh: the mesh
    :param design: the design field
    :param state: the state solution
    :param element: the element index
    :param loadcase: the load case index
    :return: the negative semidefinite 3x3 matrix G
    """

    if not 0 <= element < len(design):
        raise ValueError(f'No element exists with index {element}')

    b, w = _quadrature(mesh)
    strains = np.einsum('gai,i->ga', b, state.displacements[loadcase, mesh.element_dofs[element]])
    return -np.einsum('g,ga,gb->ab', w, strains, strains)
