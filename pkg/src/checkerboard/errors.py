"""Exception types shared across the package."""


class InvariantViolation(RuntimeError):
    """An internal identity failed to hold at its stated tolerance.

    ``identifier`` is a stable dotted name (e.g. ``"spectral.norm_bound"``)
    that the CLI prints before exiting with status 3.
    """

    def __init__(self, identifier, message=""):
        self.identifier = identifier
        super().__init__(f"{identifier}: {message}" if message else identifier)


class NotOnLatticeError(ValueError):
    """A spacetime point does not lie on the integer step lattice."""


class EnumerationCapError(ValueError):
    """A path enumeration would exceed the configured step cap."""


class AliasingError(ValueError):
    """A Fourier grid is too coarse to extract kernel coefficients exactly."""


def check(identifier, ok, message=""):
    if not ok:
        raise InvariantViolation(identifier, message)
