"""Exception hierarchy.

Every error carries a module-qualified ``code`` so the command line front-end
can report it without parsing messages.
"""

from __future__ import annotations


class QuasilocError(Exception):
    code = "quasiloc.error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


class RationalFrequencyError(QuasilocError):
    code = "arithmetic.rational_frequency"


class DepthError(QuasilocError):
    code = "arithmetic.insufficient_depth"


class OutOfStripError(QuasilocError):
    code = "model.out_of_strip"


class RegimeError(QuasilocError):
    """Raised when inputs fall outside the regime an estimate is stated for."""

    code = "model.not_in_regime"


class WindowError(QuasilocError):
    code = "acceleration.window_too_narrow"


class AnnulusDomainError(QuasilocError):
    code = "annulus.domain"


class IntegrityError(QuasilocError):
    code = "annulus.integrity"


class FamilyStructureError(QuasilocError):
    code = "annulus.family_structure"


class WindingError(QuasilocError):
    code = "zeros.winding"


class ZeroStructureError(QuasilocError):
    code = "zeros.structure"


class ReflectionError(QuasilocError):
    code = "zeros.reflection"


class AliasingError(QuasilocError):
    code = "deviation.aliasing"


class BandRegimeError(QuasilocError):
    code = "deviation.regime"


class ResonantIntervalError(QuasilocError):
    code = "localization.resonant_interval"


class PartitionError(QuasilocError):
    code = "localization.overlapping_regimes"


class UnderflowRangeError(QuasilocError):
    code = "localization.underflow"


class ConfigError(QuasilocError):
    code = "cli.config"
