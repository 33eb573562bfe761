# Copyright 2018-2019 Xanadu Quantum Technologies Inc.

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
r"""
This module contains the scalar constitutive laws of the circuit elements.

Every storage element (capacitance, inductance) is described by a strictly
increasing forward map, e.g. the charge :math:`q(u_C)` of a capacitance, its
Jacobian :math:`C(u_C) = dq/du_C > 0`, the inverse map :math:`q^{-1}` and the
stored energy

.. math::

    V_C(q_C) = \int_0^{q_C} q^{-1}(s)\,ds,

which satisfies :math:`\nabla V_C = q^{-1}`, :math:`V_C \geq 0` and
:math:`V_C(0) = 0`. Resistances carry a conductance law :math:`g(u_R)` with
:math:`G(u_R) = dg/du_R > 0`.

Three law families are available:

* ``linear``: :math:`c\,x`,
* ``poly``: the monotone cubic :math:`c_1 x + c_3 x^3` with :math:`c_1>0`, :math:`c_3\geq 0`,
* ``diode``: :math:`I_s(\exp(x/V_t) - 1)` (resistances only).

Derivatives of the nonlinear families are obtained with Autograd.
"""
from collections import namedtuple
import math

import autograd
import autograd.numpy as anp
from scipy import integrate


#: float: default absolute tolerance of the scalar inversion
INVERSION_TOL = 1e-12

#: float: default tolerance of the adaptive quadrature of the stored energy
QUADRATURE_TOL = 1e-12


class LawError(Exception):
    """Exception raised when a constitutive law receives invalid parameters."""


class NonConvergenceError(Exception):
    """Exception raised when the scalar inversion of a law does not converge.

    Args:
        message (str): description of the failure
        residual (float): last residual :math:`|f(x) - y|`
        iterations (int): number of iterations performed
    """

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class QuadratureError(Exception):
    """Exception raised when the stored-energy quadrature fails."""


LawSpec = namedtuple("LawSpec", ["key", "family", "params"])
"""Textual description of a constitutive law as it appears in a netlist.

Args:
    key (str): the netlist key, one of ``R``, ``G``, ``C``, ``Q``, ``L``, ``PHI``
    family (str): ``"linear"``, ``"poly"`` or ``"diode"``
    params (tuple[float]): the law parameters in netlist order
"""


def _linear(x, c):
    return c * x


def _poly(x, c1, c3):
    return c1 * x + c3 * x ** 3


def _diode(x, i_s, v_t):
    return i_s * (anp.exp(x / v_t) - 1.0)


_FAMILIES = {"linear": _linear, "poly": _poly, "diode": _diode}


class ConstitutiveLaw:
    """Base class for scalar, autonomous, strictly increasing constitutive laws.

    Args:
        family (str): the law family
        params (tuple[float]): the parameters of the family; for the linear
            family this is the slope of the forward map
        inversion_tol (float): absolute tolerance :math:`|f(x)-y|` of :meth:`invert`
        quadrature_tol (float): tolerance of the stored-energy quadrature
    """

    #: str: the branch type the law belongs to
    role = None

    #: tuple[str]: the admissible families
    families = ()

    #: bool: whether the law stores energy
    stores_energy = True

    def __init__(self, family, params, inversion_tol=INVERSION_TOL, quadrature_tol=QUADRATURE_TOL):
        if family not in self.families:
            raise LawError(
                "{} laws do not support the family '{}'; choose one of {}.".format(
                    self.role, family, ", ".join(self.families)
                )
            )

        params = tuple(float(p) for p in params)
        self._check_params(family, params)

        self.family = family
        self.params = params
        self.inversion_tol = inversion_tol
        self.quadrature_tol = quadrature_tol

        self._forward = _FAMILIES[family]
        self._derivative = autograd.grad(self._forward, 0)

    def __repr__(self):
        return "<{}: family={}, params={}>".format(self.__class__.__name__, self.family, self.params)

    def __eq__(self, other):
        return (
            self.__class__ is other.__class__
            and self.family == other.family
            and self.params == other.params
        )

    def __hash__(self):
        return hash((self.__class__.__name__, self.family, self.params))

    @staticmethod
    def _check_params(family, params):
        if any(not math.isfinite(p) for p in params):
            raise LawError("Law parameters must be finite, got {}.".format(params))

        if family == "linear":
            if len(params) != 1 or params[0] <= 0:
                raise LawError("A linear law needs one positive parameter, got {}.".format(params))
        elif family == "poly":
            if len(params) != 2:
                raise LawError("A poly law needs two parameters c1,c3, got {}.".format(params))
            if params[0] <= 0 or params[1] < 0:
                raise LawError("A poly law needs c1 > 0 and c3 >= 0, got {}.".format(params))
        elif family == "diode":
            if len(params) != 2 or params[0] <= 0 or params[1] <= 0:
                raise LawError("A diode law needs Is > 0 and Vt > 0, got {}.".format(params))

    @property
    def is_linear(self):
        """bool: whether the forward map is linear"""
        return self.family == "linear"

    def eval(self, x):
        """Evaluate the forward map.

        Args:
            x (float): the argument

        Returns:
            float: the value of the forward map
        """
        return float(self._forward(float(x), *self.params))

    def jacobian(self, x):
        """Evaluate the derivative of the forward map.

        Args:
            x (float): the argument

        Returns:
            float: the (strictly positive) derivative
        """
        if self.is_linear:
            return self.params[0]
        return float(self._derivative(float(x), *self.params))

    def _bracket(self, y):
        """Return an interval ``[a, b]`` with ``f(a) <= y <= f(b)``."""
        if self.family == "poly":
            # |root| <= |y|/c1 because c3 >= 0
            bound = abs(y) / self.params[0]
            return (-bound, 0.0) if y < 0 else (0.0, bound)

        if self.family == "diode" and y <= -self.params[0]:
            raise NonConvergenceError(
                "The diode law is bounded below by -Is = {}; cannot invert {}.".format(-self.params[0], y),
                residual=float("inf"),
                iterations=0,
            )

        a, b = -1.0, 1.0
        for _ in range(200):
            if self.eval(a) <= y:
                break
            a *= 2.0
        for _ in range(200):
            if self.eval(b) >= y:
                break
            b *= 2.0
        return a, b

    def invert(self, y, max_iter=100):
        """Invert the forward map by safeguarded Newton iteration.

        Newton steps leaving the current bracket are replaced by bisection
        steps. Linear laws are inverted in closed form.

        Args:
            y (float): the value to invert
            max_iter (int): maximum number of iterations

        Returns:
            float: ``x`` with ``|f(x) - y| <= inversion_tol``

        Raises:
            NonConvergenceError: if the tolerance is not reached
        """
        y = float(y)

        if self.is_linear:
            return y / self.params[0]

        if y == 0.0:
            return 0.0

        a, b = self._bracket(y)
        x = 0.5 * (a + b)
        polish = 2

        for it in range(max_iter):
            fx = self.eval(x) - y

            if fx == 0.0:
                return x

            if fx < 0:
                a = x
            else:
                b = x

            if abs(fx) <= self.inversion_tol:
                if polish == 0 or b - a <= 4 * 2.220446049250313e-16 * max(1.0, abs(x)):
                    return x
                polish -= 1

            dfx = self.jacobian(x)
            x_new = x - fx / dfx if dfx > 0 else None

            if x_new is None or not a <= x_new <= b:
                x_new = 0.5 * (a + b)

            if x_new == x:
                if abs(fx) <= self.inversion_tol:
                    return x
                x_new = 0.5 * (a + b)

            x = x_new

        residual = abs(self.eval(x) - y)
        if residual <= self.inversion_tol:
            return x

        raise NonConvergenceError(
            "Inversion of {} at y={} did not converge after {} iterations "
            "(residual {:.3e}).".format(self, y, max_iter, residual),
            residual=residual,
            iterations=it + 1,
        )

    def stored_energy(self, state):
        r"""Evaluate the stored energy :math:`\int_0^{s} f^{-1}(\sigma)\,d\sigma`.

        Linear laws use the closed form :math:`s^2/(2c)`; the other families
        use adaptive Gauss-Kronrod quadrature.

        Args:
            state (float): the charge or flux :math:`s`

        Returns:
            float: the stored energy

        Raises:
            QuadratureError: if the quadrature reports a failure
        """
        if not self.stores_energy:
            raise LawError("{} laws do not store energy.".format(self.role))

        state = float(state)

        if state == 0.0:
            return 0.0

        if self.is_linear:
            return state ** 2 / (2.0 * self.params[0])

        res = integrate.quad(
            self.invert,
            0.0,
            state,
            epsabs=self.quadrature_tol,
            epsrel=self.quadrature_tol,
            limit=200,
            full_output=1,
        )

        if len(res) > 3:
            raise QuadratureError(
                "Stored-energy quadrature of {} at {} failed: {}".format(self, state, res[3])
            )

        return res[0]

    def spec(self):
        """Return the :class:`LawSpec` that reproduces this law in a netlist."""
        raise NotImplementedError


class CapacitorLaw(ConstitutiveLaw):
    """Charge law :math:`q(u_C)` of a capacitance.

    The linear family is parametrized by the capacitance :math:`C`.
    """

    role = "capacitor"
    families = ("linear", "poly")

    def spec(self):
        if self.is_linear:
            return LawSpec("C", "linear", self.params)
        return LawSpec("Q", self.family, self.params)


class InductorLaw(ConstitutiveLaw):
    """Flux law :math:`\\phi(j_L)` of an inductance.

    The linear family is parametrized by the inductance :math:`L`.
    """

    role = "inductor"
    families = ("linear", "poly")

    def spec(self):
        if self.is_linear:
            return LawSpec("L", "linear", self.params)
        return LawSpec("PHI", self.family, self.params)


class ResistorLaw(ConstitutiveLaw):
    """Conductance law :math:`g(u_R)` of a resistance.

    The linear family is parametrized by the conductance :math:`G = 1/R`.
    Use :meth:`from_resistance` for the usual ``R=`` parametrization.
    """

    role = "resistor"
    families = ("linear", "poly", "diode")
    stores_energy = False

    def __init__(self, family, params, resistance=None, **kwargs):
        super().__init__(family, params, **kwargs)
        self._resistance = resistance

    @classmethod
    def from_resistance(cls, resistance, **kwargs):
        """Linear resistance law from the resistance value :math:`R > 0`."""
        if not resistance > 0:
            raise LawError("A resistance must be positive, got {}.".format(resistance))
        return cls("linear", (1.0 / float(resistance),), resistance=float(resistance), **kwargs)

    def spec(self):
        if self.is_linear:
            if self._resistance is not None:
                return LawSpec("R", "linear", (self._resistance,))
            return LawSpec("R", "linear", (1.0 / self.params[0],))
        return LawSpec("G", self.family, self.params)


_ROLE_KEYS = {
    "R": (ResistorLaw, ("R", "G")),
    "C": (CapacitorLaw, ("C", "Q")),
    "L": (InductorLaw, ("L", "PHI")),
}


def law_from_spec(kind, spec, **kwargs):
    """Construct the law object of an element from its netlist description.

    Args:
        kind (str): element kind, one of ``R``, ``C``, ``L``
        spec (LawSpec): the textual law description

    Returns:
        ConstitutiveLaw: the law

    Raises:
        LawError: if the key does not fit the element kind or the parameters are invalid
    """
    try:
        cls, keys = _ROLE_KEYS[kind]
    except KeyError:
        raise LawError("Elements of kind {} have no constitutive law.".format(kind))

    if spec.key not in keys:
        raise LawError(
            "Law key {}= is not valid for a {} element; use one of {}.".format(
                spec.key, kind, ", ".join(k + "=" for k in keys)
            )
        )

    if spec.key == "R":
        return ResistorLaw.from_resistance(spec.params[0], **kwargs)

    return cls(spec.family, spec.params, **kwargs)


def eval_law(law, x):
    """Evaluate the forward map of ``law`` at ``x``."""
    return law.eval(x)


def jacobian(law, x):
    """Evaluate the derivative of the forward map of ``law`` at ``x``."""
    return law.jacobian(x)


def invert(law, y):
    """Invert the forward map of ``law`` at ``y``."""
    return law.invert(y)


def stored_energy(law, state):
    """Evaluate the stored energy of ``law`` at the charge or flux ``state``."""
    return law.stored_energy(state)
