# -*- coding: utf-8 -*-
import numpy as np
import scipy.integrate

from astropy.modeling import Fittable1DModel

__all__ = ["BaseCoefficientModel"]


class BaseCoefficientModel(Fittable1DModel):
    """
    Base time-dependent coefficient c(t) of a Hamiltonian term.  Do not use.

    Subclasses define ``kind`` (the name used in scenario documents),
    ``evaluate`` and ``scaled``.
    """

    kind = None

    def area(self, t0, t1):
        """
        Integral of the coefficient between two times

        Parameters
        ----------
        t0, t1: float
           integration limits [time]

        Returns
        -------
        area: float
           integral of c(t) dt [rad when c is an energy]
        """
        val, _ = scipy.integrate.quad(
            lambda t: float(self(t)),
            t0,
            t1,
            points=self._kinks(t0, t1) or None,
            epsabs=1e-13,
            epsrel=1e-13,
            limit=200,
        )
        return val

    def scaled(self, factor):
        """
        Same kind of coefficient multiplied by a constant factor

        Parameters
        ----------
        factor: float
           multiplicative factor

        Returns
        -------
        coefficient: BaseCoefficientModel
            new model with factor * c(t)
        """
        raise NotImplementedError

    def to_dict(self):
        """
        Scenario-document representation of the coefficient

        Returns
        -------
        doc: dict
           ``{"kind": ..., <parameter>: <value>, ...}``
        """
        doc = {"kind": self.kind}
        for name in self.param_names:
            doc[name] = float(getattr(self, name).value)
        return doc

    def check_domain(self, duration):
        """
        Check that the coefficient is finite on [0, duration]

        Parameters
        ----------
        duration: float
           scenario duration T

        Raises
        ------
        ValueError
           non-finite values on the sampled domain
        """
        times = np.linspace(0.0, duration, 257)
        if not np.all(np.isfinite(self(times))):
            raise ValueError(self.kind + " coefficient is not finite on [0, T]")

    def _kinks(self, t0, t1):
        return []
