"""Base exception shared by every acdgcl subsystem."""


class AcdgclError(Exception):
    """Root of all errors raised by acdgcl.

    Each subsystem derives its own error class from this one so the CLI can
    report any library failure uniformly.
    """
