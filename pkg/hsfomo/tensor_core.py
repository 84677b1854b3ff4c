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
Two-dimensional symmetric tensor algebra in the Kelvin–Mandel representation.

A symmetric strain or stress ``x`` is stored as the 3-vector ``(x11, x22, sqrt(2) * x12)``.
A fourth-order elasticity tensor ``E`` is stored as the symmetric 3x3 matrix::

    [[E1111,           E1122,           sqrt(2) * E1112],
     [E1122,           E2222,           sqrt(2) * E2212],
     [sqrt(2) * E1112, sqrt(2) * E2212, 2 * E1212      ]]

With these factors the Euclidean inner product of vectors equals the Frobenius product of the tensors,
``<E eps, eps>`` is ``v @ M @ v`` and rotations act as orthogonal conjugations.
"""

import math
from typing import Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

SQRT2 = math.sqrt(2.0)

# Projections onto the volumetric and deviatoric subspaces of 2D symmetric tensors
J_MATRIX = 0.5 * np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
K_MATRIX = np.eye(3) - J_MATRIX

_PAIRS = ((0, 0), (1, 1), (0, 1))
_WEIGHTS = (1.0, 1.0, SQRT2)

ArrayLike = Union[float, np.ndarray]


class IsoModuli:
    """Plane-stress bulk and shear moduli of an isotropic phase."""

    def __init__(self, kappa: float, mu: float) -> None:
        """
        Creates a new isotropic moduli instance.

        :param kappa: the plane-stress bulk modulus
        :param mu: the shear modulus
        """

        if not (kappa > 0 and mu > 0):
            raise ValueError(f'Moduli must be positive, got kappa={kappa} and mu={mu}')

        self._kappa = float(kappa)
        self._mu = float(mu)

    @classmethod
    def from_young_poisson(cls, young: float, poisson: float) -> 'IsoModuli':
        """
        Creates the plane-stress moduli of a material given by Young's modulus and Poisson's ratio.

        :param young: the Young's modulus
        :param poisson: the Poisson's ratio
        :return: the isotropic moduli
        """

        if not (young > 0 and -1.0 < poisson < 1.0):
            raise ValueError(f'Invalid elastic constants: young={young}, poisson={poisson}')

        return cls(young / (2.0 * (1.0 - poisson)), young / (2.0 * (1.0 + poisson)))

    @property
    def kappa(self) -> float:
        """
        Returns the plane-stress bulk modulus.

        :return: the plane-stress bulk modulus
        """

        return self._kappa

    @property
    def mu(self) -> float:
        """
        Returns the shear modulus.

        :return: the shear modulus
        """

        return self._mu

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IsoModuli):
            return NotImplemented

        return self._kappa == other._kappa and self._mu == other._mu

    def __str__(self) -> str:
        """
        Returns the string representation of the moduli.

        :return: the string representation of the moduli
        """

        return f'IsoModuli(kappa={self._kappa:.6g}, mu={self._mu:.6g})'


class PhasePair:
    """Well-ordered pair of isotropic phases: a weak phase E- and a strong phase E+."""

    def __init__(self, weak: IsoModuli, strong: IsoModuli) -> None:
        """
        Creates a new phase pair.

        :param weak: the moduli of the weak phase
        :param strong: the moduli of the strong phase
        """

        if not (weak.kappa < strong.kappa and weak.mu < strong.mu):
            raise ValueError(f'Phases are not well-ordered: weak={weak}, strong={strong}')

        self._weak = weak
        self._strong = strong
        self._weak_tensor = _frozen(iso_tensor(weak))
        self._strong_tensor = _frozen(iso_tensor(strong))
        r_kappa = weak.kappa * strong.kappa / (strong.kappa - weak.kappa)
        r_mu = weak.mu * strong.mu / (strong.mu - weak.mu)
        self._r_tensor = _frozen(iso_matrix(r_kappa, r_mu))

    @classmethod
    def from_contrast(cls, young: float = 1.0, poisson: float = 0.3, contrast: float = 1e-2) -> 'PhasePair':
        """
        Creates a phase pair whose weak phase has the Young's modulus scaled by the contrast.

        :param young: the Young's modulus of the strong phase, defaults to 1
        :param poisson: the common Poisson's ratio, defaults to 0.3
        :param contrast: the ratio of the weak and strong Young's moduli, defaults to 1e-2
        :return: the phase pair
        """

        if not 0.0 < contrast < 1.0:
            raise ValueError(f'Contrast must lie in (0, 1), got {contrast}')

        weak = IsoModuli.from_young_poisson(contrast * young, poisson)
        return cls(weak, IsoModuli.from_young_poisson(young, poisson))

    @property
    def weak(self) -> IsoModuli:
        """
        Returns the moduli of the weak phase.

        :return: the moduli of the weak phase
        """

        return self._weak

    @property
    def strong(self) -> IsoModuli:
        """
        Returns the moduli of the strong phase.

        :return: the moduli of the strong phase
        """

        return self._strong

    @property
    def dkappa(self) -> float:
        """
        Returns the bulk modulus contrast kappa+ - kappa-.

        :return: the bulk modulus contrast
        """

        return self._strong.kappa - self._weak.kappa

    @property
    def dmu(self) -> float:
        """
        Returns the shear modulus contrast mu+ - mu-.

        :return: the shear modulus contrast
        """

        return self._strong.mu - self._weak.mu

    @property
    def weak_tensor(self) -> np.ndarray:
        """
        Returns the read-only Kelvin–Mandel matrix of the weak phase.

        :return: the matrix of E-
        """

        return self._weak_tensor

    @property
    def strong_tensor(self) -> np.ndarray:
        """
        Returns the read-only Kelvin–Mandel matrix of the strong phase.

        :return: the matrix of E+
        """

        return self._strong_tensor

    @property
    def r_tensor(self) -> np.ndarray:
        """
        Returns the isotropic tensor ((E-)^-1 - (E+)^-1)^-1 of the complementary bound.

        :return: the matrix of R
        """

        return self._r_tensor

    def voigt_tensor(self, v: float) -> np.ndarray:
        """
        Returns the arithmetic mixture (1 - v) E- + v E+.

        :param v: the strong phase volume fraction
        :return: the Voigt mixture matrix
        """

        return (1.0 - v) * self._weak_tensor + v * self._strong_tensor

    def __str__(self) -> str:
        """
        Returns the string representation of the phase pair.

        :return: the string representation of the phase pair
        """

        return f'PhasePair(weak={self._weak}, strong={self._strong})'


class OrthoTensor:
    """Orthotropic tensor given by its base coefficients and an orientation angle."""

    def __init__(self, e1111: float, e1122: float, e2222: float, e1212: float, phi: float = 0.0) -> None:
        """
        Creates a new orthotropic tensor.

        :param e1111: the base coefficient E1111
        :param e1122: the base coefficient E1122
        :param e2222: the base coefficient E2222
        :param e1212: the base coefficient E1212
        :param phi: the orientation angle, normalized to [0, pi), defaults to 0
        """

        self._e1111 = float(e1111)
        self._e1122 = float(e1122)
        self._e2222 = float(e2222)
        self._e1212 = float(e1212)
        self._phi = float(phi) % math.pi

    @property
    def e1111(self) -> float:
        """
        Returns the E1111 base coefficient.

        :return: the E1111 base coefficient
        """

        return self._e1111

    @property
    def e1122(self) -> float:
        """
        Returns the E1122 base coefficient.

        :return: the E1122 base coefficient
        """

        return self._e1122

    @property
    def e2222(self) -> float:
        """
        Returns the E2222 base coefficient.

        :return: the E2222 base coefficient
        """

        return self._e2222

    @property
    def e1212(self) -> float:
        """
        Returns the E1212 base coefficient.

        :return: the E1212 base coefficient
        """

        return self._e1212

    @property
    def phi(self) -> float:
        """
        Returns the orientation angle.

        :return: the orientation angle in [0, pi)
        """

        return self._phi

    @property
    def coefficients(self) -> Tuple[float, float, float, float]:
        """
        Returns the base coefficients.

        :return: the tuple (E1111, E1122, E2222, E1212)
        """

        return self._e1111, self._e1122, self._e2222, self._e1212

    def base_matrix(self) -> np.ndarray:
        """
        Returns the Kelvin–Mandel matrix of the unrotated base.

        :return: the base matrix
        """

        return base_matrices(np.array(self.coefficients))

    def with_angle(self, phi: float) -> 'OrthoTensor':
        """
        Returns a copy of this tensor with another orientation angle.

        :param phi: the new orientation angle
        :return: the reoriented tensor
        """

        return OrthoTensor(self._e1111, self._e1122, self._e2222, self._e1212, phi)

    def __str__(self) -> str:
        """
        Returns the string representation of the orthotropic tensor.

        :return: the string representation of the orthotropic tensor
        """

        return f'OrthoTensor(e1111={self._e1111:.6g}, e1122={self._e1122:.6g}, e2222={self._e2222:.6g}, ' \
               f'e1212={self._e1212:.6g}, phi={self._phi:.6g})'


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def iso_matrix(kappa: ArrayLike, mu: ArrayLike) -> np.ndarray:
    """
    Builds Kelvin–Mandel matrices of isotropic tensors, vectorized over the moduli.

    :param kappa: the bulk moduli
    :param mu: the shear moduli
    :return: an array of shape (..., 3, 3)
    """

    kappa = np.asarray(kappa, dtype=float)
    mu = np.asarray(mu, dtype=float)
    return 2.0 * kappa[..., None, None] * J_MATRIX + 2.0 * mu[..., None, None] * K_MATRIX


def iso_tensor(moduli: IsoModuli) -> np.ndarray:
    """
    Returns the Kelvin–Mandel matrix of kappa Tr(eps) I + 2 mu dev(eps).

    :param moduli: the isotropic moduli
    :return: the matrix [[k+m, k-m, 0], [k-m, k+m, 0], [0, 0, 2m]]
    """

    return iso_matrix(moduli.kappa, moduli.mu)


def mandel_transform(q: np.ndarray) -> np.ndarray:
    """
    Returns the Kelvin–Mandel matrix of the map eps -> Q eps Q^T for an orthogonal 2x2 matrix Q.

    :param q: an orthogonal matrix of shape (..., 2, 2)
    :return: an orthogonal matrix of shape (..., 3, 3)
    """

    q = np.asarray(q, dtype=float)
    q11, q12, q21, q22 = q[..., 0, 0], q[..., 0, 1], q[..., 1, 0], q[..., 1, 1]
    t = np.empty(q.shape[:-2] + (3, 3))
    t[..., 0, 0] = q11 * q11
    t[..., 0, 1] = q12 * q12
    t[..., 0, 2] = SQRT2 * q11 * q12
    t[..., 1, 0] = q21 * q21
    t[..., 1, 1] = q22 * q22
    t[..., 1, 2] = SQRT2 * q21 * q22
    t[..., 2, 0] = SQRT2 * q11 * q21
    t[..., 2, 1] = SQRT2 * q12 * q22
    t[..., 2, 2] = q11 * q22 + q12 * q21
    return t


def base_matrices(coefficients: np.ndarray) -> np.ndarray:
    """
    Builds unrotated Kelvin–Mandel matrices from rows of base coefficients.

    :param coefficients: an array of shape (..., 4) with columns (E1111, E1122, E2222, E1212)
    :return: an array of shape (..., 3, 3)
    """

    coefficients = np.asarray(coefficients, dtype=float)
    m = np.zeros(coefficients.shape[:-1] + (3, 3))
    m[..., 0, 0] = coefficients[..., 0]
    m[..., 0, 1] = m[..., 1, 0] = coefficients[..., 1]
    m[..., 1, 1] = coefficients[..., 2]
    m[..., 2, 2] = 2.0 * coefficients[..., 3]
    return m


def planar_rotation(phi: ArrayLike) -> np.ndarray:
    """
    Returns the planar rotation Q(phi) = [[cos, -sin], [sin, cos]].

    :param phi: the rotation angles
    :return: an array of shape (..., 2, 2)
    """

    phi = np.asarray(phi, dtype=float)
    c, s = np.cos(phi), np.sin(phi)
    return np.stack([np.stack([c, -s], axis=-1), np.stack([s, c], axis=-1)], axis=-2)


def rotation_matrix(phi: ArrayLike) -> np.ndarray:
    """
    Returns the Kelvin–Mandel rotation R(phi) induced by Q(phi), vectorized over the angles.

    :param phi: the rotation angles
    :return: an array of shape (..., 3, 3)
    """

    return mandel_transform(planar_rotation(phi))


def rotate(tensor: OrthoTensor) -> np.ndarray:
    """
    Returns the Kelvin–Mandel matrix R(phi) M_base R(phi)^T of an orthotropic tensor.

    :param tensor: the orthotropic tensor
    :return: the rotated matrix
    """

    r = rotation_matrix(tensor.phi)
    return r @ tensor.base_matrix() @ r.T


def change_basis(m: np.ndarray, u: np.ndarray) -> np.ndarray:
    """
    Returns the components of a tensor in the orthonormal basis given by the columns of U.

    :param m: the Kelvin–Mandel matrix
    :param u: the orthogonal basis matrix
    :return: the matrix T(U)^T M T(U)
    """

    t = mandel_transform(u)
    return np.swapaxes(t, -1, -2) @ m @ t


def loewner_leq(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> Union[bool, np.ndarray]:
    """
    Checks the Loewner order A <= B through the smallest eigenvalue of B - A.

    :param a: the smaller candidate, shape (..., 3, 3)
    :param b: the larger candidate, shape (..., 3, 3)
    :param tol: the absolute eigenvalue tolerance, defaults to 1e-9
    :return: True if the smallest eigenvalue of B - A is at least -tol
    """

    diff = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
    diff = 0.5 * (diff + np.swapaxes(diff, -1, -2))
    result = np.linalg.eigvalsh(diff)[..., 0] >= -tol
    return bool(result) if np.ndim(result) == 0 else result


def is_admissible(m: np.ndarray, pair: PhasePair, tol: float = 1e-9) -> Union[bool, np.ndarray]:
    """
    Checks E- <= E <= E+ in the Loewner order.

    :param m: the Kelvin–Mandel matrix
    :param pair: the phase pair
    :param tol: the absolute eigenvalue tolerance, defaults to 1e-9
    :return: True if the tensor lies between the phases
    """

    lower = loewner_leq(pair.weak_tensor, m, tol)
    upper = loewner_leq(m, pair.strong_tensor, tol)
    return lower & upper


def strain_invariants(e: np.ndarray) -> Tuple[ArrayLike, ArrayLike]:
    """
    Returns the invariants t = |Tr(eps)| and s = sqrt((e11 - e22)^2 + 4 e12^2).

    :param e: Kelvin–Mandel vectors of shape (..., 3)
    :return: the pair (t, s)
    """

    e = np.asarray(e, dtype=float)
    t = np.abs(e[..., 0] + e[..., 1])
    s = np.sqrt((e[..., 0] - e[..., 1]) ** 2 + 2.0 * e[..., 2] ** 2)
    if np.ndim(t) == 0:
        return float(t), float(s)

    return t, s


def energy(m: np.ndarray, e: np.ndarray) -> ArrayLike:
    """
    Returns the quadratic form <E eps, eps>.

    :param m: Kelvin–Mandel matrices of shape (..., 3, 3)
    :param e: Kelvin–Mandel vectors of shape (..., 3)
    :return: the energies
    """

    value = np.einsum('...i,...ij,...j->...', np.asarray(e, dtype=float), np.asarray(m, dtype=float),
                      np.asarray(e, dtype=float))
    return float(value) if np.ndim(value) == 0 else value


def complementary_energy(m: np.ndarray, s: np.ndarray) -> ArrayLike:
    """
    Returns the complementary energy <E^-1 sigma, sigma>.

    :param m: Kelvin–Mandel matrices of shape (..., 3, 3)
    :param s: Kelvin–Mandel stress vectors of shape (..., 3)
    :return: the complementary energies
    """

    s = np.asarray(s, dtype=float)
    solved = np.linalg.solve(np.asarray(m, dtype=float), s[..., None])[..., 0]
    value = np.einsum('...i,...i->...', s, solved)
    return float(value) if np.ndim(value) == 0 else value


def to_matrix(v: np.ndarray) -> np.ndarray:
    """
    Converts Kelvin–Mandel vectors to symmetric 2x2 matrices.

    :param v: vectors of shape (..., 3)
    :return: matrices of shape (..., 2, 2)
    """

    v = np.asarray(v, dtype=float)
    off = v[..., 2] / SQRT2
    return np.stack([np.stack([v[..., 0], off], axis=-1), np.stack([off, v[..., 1]], axis=-1)], axis=-2)


def from_matrix(x: np.ndarray) -> np.ndarray:
    """
    Converts symmetric 2x2 matrices to Kelvin–Mandel vectors.

    :param x: matrices of shape (..., 2, 2)
    :return: vectors of shape (..., 3)
    """

    x = np.asarray(x, dtype=float)
    return np.stack([x[..., 0, 0], x[..., 1, 1], SQRT2 * 0.5 * (x[..., 0, 1] + x[..., 1, 0])], axis=-1)


def full_tensor(m: np.ndarray) -> np.ndarray:
    """
    Expands a Kelvin–Mandel matrix into the 2x2x2x2 array of tensor components.

    :param m: the Kelvin–Mandel matrix
    :return: the component array E[i, j, k, l]
    """

    tensor = np.empty((2, 2, 2, 2))
    for a, (i, j) in enumerate(_PAIRS):
        for b, (k, l) in enumerate(_PAIRS):
            value = m[a, b] / (_WEIGHTS[a] * _WEIGHTS[b])
            for p, q in {(i, j), (j, i)}:
                for r, s in {(k, l), (l, k)}:
                    tensor[p, q, r, s] = value

    return tensor


def from_full_tensor(tensor: np.ndarray) -> np.ndarray:
    """
    Compresses a 2x2x2x2 array with minor symmetries into its Kelvin–Mandel matrix.

    :param tensor: the component array E[i, j, k, l]
    :return: the Kelvin–Mandel matrix
    """

    m = np.empty((3, 3))
    for a, (i, j) in enumerate(_PAIRS):
        for b, (k, l) in enumerate(_PAIRS):
            m[a, b] = _WEIGHTS[a] * _WEIGHTS[b] * tensor[i, j, k, l]

    return m


def symmetrize_orthotropic(m: np.ndarray, principal_basis: np.ndarray) -> np.ndarray:
    """
    Averages a tensor with its reflection across the principal axes U.

    The result is (E + T_Q(E)) / 2 with Q = U Diag(1, -1) U^T, which has vanishing shear couplings
    when expressed in the basis U and keeps the trace of E.

    :param m: the Kelvin–Mandel matrix
    :param principal_basis: the orthogonal matrix U whose columns are the principal directions
    :return: the symmetrized matrix
    """

    u = np.asarray(principal_basis, dtype=float)
    if not np.allclose(u.T @ u, np.eye(2), atol=1e-12):
        raise ValueError('Principal basis is not orthogonal')

    t = mandel_transform(u @ np.diag([1.0, -1.0]) @ u.T)
    return 0.5 * (m + t @ m @ t.T)


def principal_stresses(s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Returns the eigenvalues sigma1 >= sigma2 and the principal directions of stresses.

    Repeated eigenvalues, |sigma1 - sigma2| < 1e-12 max(1, |sigma1| + |sigma2|), get the identity frame.

    :param s: Kelvin–Mandel vectors of shape (..., 3)
    :return: eigenvalues of shape (..., 2) and orthogonal frames of shape (..., 2, 2) with the directions as columns
    """

    values, vectors = np.linalg.eigh(to_matrix(s))
    values = values[..., ::-1]
    vectors = vectors[..., ::-1]
    repeated = np.abs(values[..., 0] - values[..., 1]) < 1e-12 * np.maximum(1.0, np.abs(values).sum(axis=-1))
    vectors = np.where(repeated[..., None, None], np.eye(2), vectors)
    return values, vectors


def _coupling(m: np.ndarray, phi: float) -> float:
    r = rotation_matrix(phi)
    base = r.T @ m @ r
    return base[0, 2] ** 2 + base[1, 2] ** 2


def orthotropic_frame(m: np.ndarray, samples: int = 721) -> OrthoTensor:
    """
    Extracts base coefficients and orientation of an orthotropic Kelvin–Mandel matrix.

    The angle minimizing the squared shear couplings of R(phi)^T M R(phi) over [0, pi/2) is located by dense sampling
    followed by a bounded scalar refinement.

    :param m: the Kelvin–Mandel matrix
    :param samples: the number of sampled angles, defaults to 721
    :return: the orthotropic tensor with M = rotate(result)
    """

    m = np.asarray(m, dtype=float)
    angles = np.arange(samples) * (0.5 * math.pi / samples)
    r = rotation_matrix(angles)
    bases = np.swapaxes(r, -1, -2) @ m @ r
    couplings = bases[:, 0, 2] ** 2 + bases[:, 1, 2] ** 2
    k = int(np.argmin(couplings))
    step = angles[1] - angles[0] if samples > 1 else 0.5 * math.pi
    result = minimize_scalar(lambda phi: _coupling(m, phi), bounds=(angles[k] - step, angles[k] + step),
                             method='bounded', options={'xatol': 1e-13})
    phi = float(result.x) if result.fun <= couplings[k] else float(angles[k])
    r = rotation_matrix(phi)
    base = r.T @ m @ r
    return OrthoTensor(base[0, 0], base[0, 1], base[1, 1], 0.5 * base[2, 2], phi)
