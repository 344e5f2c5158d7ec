class NumericalInvariantError(RuntimeError):
    """A numerical invariant of the evolution was violated.

    Raised when the state norm drifts beyond tolerance or the reduced
    coin density matrix produces eigenvalues outside [0, 1], both of
    which indicate a broken computation rather than bad user input.
    """
