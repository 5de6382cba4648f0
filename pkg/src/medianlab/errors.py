"""Exception hierarchy for medianlab.

Every error class carries a distinct process exit code so CLI failures are
machine-distinguishable.  Exit code 1 is reserved for unexpected crashes and
0 for success; domain errors start at 2.
"""
from __future__ import annotations


class MedianLabError(Exception):
    """Base class for all domain errors raised by medianlab."""

    exit_code = 2


class ParseError(MedianLabError):
    """A graph file, operator table, config file or report failed to parse."""

    exit_code = 3


class InvalidEdge(MedianLabError):
    """An edge references a vertex out of range or has a non-positive weight."""

    exit_code = 4


class DisconnectedGraph(MedianLabError):
    """The graph must be connected for its path metric to be total."""

    exit_code = 5


class SizeCapExceeded(MedianLabError):
    """An exhaustive sweep was requested beyond its configured size cap."""

    exit_code = 6


class NotATree(MedianLabError):
    """The operation requires a tree (connected, acyclic) input."""

    exit_code = 7


class NotMedianGraph(MedianLabError):
    """Some triple of vertices has no unique triple-interval intersection."""

    exit_code = 8


class ArityMismatch(MedianLabError):
    """An operator was applied to the wrong number of arguments."""

    exit_code = 9


class M0Violated(MedianLabError):
    """The exact symmetry/localisation axiom failed; certification refused."""

    exit_code = 10


class SpaceMismatch(MedianLabError):
    """Two operators that must share an underlying space do not."""

    exit_code = 11


class EmptySubset(MedianLabError):
    """A subset argument was empty where a nonempty one is required."""

    exit_code = 12


class NoChain(MedianLabError):
    """The interval's step graph is disconnected; no chain exists.

    For a certified operator this flags a certificate violation, so the
    message should carry the offending pair.
    """

    exit_code = 13


class EmptyCorpus(MedianLabError):
    """No quasigeodesic in the requested family survived re-verification."""

    exit_code = 14


class NoBarycentre(MedianLabError):
    """Neither trichotomy case succeeded at the given proximity threshold."""

    exit_code = 15


class WindowOverflow(MedianLabError):
    """A shear evaluation left the valid window of the conjugating map."""

    exit_code = 16


class InvalidParams(MedianLabError):
    """Generator or operator parameters are out of their documented range."""

    exit_code = 17


ALL_ERRORS = [
    ParseError,
    InvalidEdge,
    DisconnectedGraph,
    SizeCapExceeded,
    NotATree,
    NotMedianGraph,
    ArityMismatch,
    M0Violated,
    SpaceMismatch,
    EmptySubset,
    NoChain,
    EmptyCorpus,
    NoBarycentre,
    WindowOverflow,
    InvalidParams,
]
