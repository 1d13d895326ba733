"""Exception types shared across the package."""


class FanFormatError(ValueError):
    """Malformed fan data: bad indices, non-primitive or zero rays."""


class NotSmoothCompleteError(ValueError):
    """Operation requires a smooth complete fan and the input is not one."""


class NotNefError(ValueError):
    """A nef divisor was required."""


class UnboundedPolyhedronError(RuntimeError):
    """Lattice point enumeration hit a polyhedron with nontrivial recession cone."""


class UnboundedRegionError(RuntimeError):
    """A weight region with nonzero cohomology is unbounded.

    On a complete variety every contributing region is bounded, so this
    signals corrupted input or an engine bug, never a legitimate answer.
    """


class InternalInconsistencyError(RuntimeError):
    """Two routes to the same fact disagree (engine bug, never user error)."""


class TableIncompleteError(KeyError):
    """A cohomology table is missing classes needed by the computation."""

    def __init__(self, missing):
        self.missing = sorted(missing)
        super().__init__(f"table incomplete at classes {self.missing}")
