from importlib.metadata import version as _version, PackageNotFoundError

from astropy import config as _config

try:
    __version__ = _version(__name__)
except PackageNotFoundError:  # pragma: no cover
    pass


class Conf(_config.ConfigNamespace):
    """
    Configuration parameters for `quantum_holonomy`.
    """

    default_steps = _config.ConfigItem(
        4096,
        "Number of grid steps used when a scenario does not give 'steps'. "
        "The HOLONOMY_DEFAULT_STEPS environment variable takes precedence.",
    )
    reunitarize_every = _config.ConfigItem(
        256,
        "Polar re-unitarization cadence (steps) of the unitary propagator "
        "and of the holonomy-operator core.",
    )
    cyclic_tol = _config.ConfigItem(
        1e-6, "Largest ||P(T) - P(0)||_F accepted as a cyclic evolution."
    )
    residual_tol = _config.ConfigItem(
        1e-6, "Pass threshold of the separation and route-equivalence residuals."
    )
    holonomic_tol = _config.ConfigItem(
        1e-6, "Pass threshold of ||D^dagger(T) - exp(i alpha) 1||_F."
    )
    parallel_transport_tol = _config.ConfigItem(
        1e-4, "Pass threshold of the discrete parallel-transport residual."
    )
    branch_shift = _config.ConfigItem(
        1e-3,
        "Shift delta of the logarithm branch (-pi + delta, pi + delta] used "
        "when a loop unitary has an eigenphase at pi.",
    )


conf = Conf()
