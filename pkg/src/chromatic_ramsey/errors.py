"""Exception types shared across the library.

Every failure mode that callers are expected to handle gets its own class;
anything else is a plain ValueError/RuntimeError bug.
"""


class ChromaticRamseyError(Exception):
    """Base class for all library-specific errors."""


class TooLarge(ChromaticRamseyError):
    """Input exceeds the exact-computation vertex cap."""


class UnknownColor(ChromaticRamseyError):
    """A color id outside the palette (or with no edges where required)."""


class DegenerateGraph(ChromaticRamseyError):
    """Graph shape makes the requested operation meaningless."""


class EmptyGraph(ChromaticRamseyError):
    """Operation requires at least one edge."""


class NotDisjoint(ChromaticRamseyError):
    """Vertex sets were required to be disjoint."""


class NotBalanced(ChromaticRamseyError):
    """Pair parts were required to have equal size, or a level sequence
    failed its well-balancedness recheck."""


class EpsilonOutOfRange(ChromaticRamseyError):
    """eps outside (0, eps0) or otherwise outside its documented range."""


class BadRange(ChromaticRamseyError):
    """Malformed size window."""


class TooFewSets(ChromaticRamseyError):
    """intersect_select needs at least the configured minimum of subsets."""


class SubsetTooSmall(ChromaticRamseyError):
    """A subset fell below the (1 - eps) fraction required for selection."""


class SparsityViolated(ChromaticRamseyError):
    """A color claimed sparse has a dense pair inside the claimed window."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NoDensePair(ChromaticRamseyError):
    """No qualifying dense pair exists (exact-mode nonexistence)."""


class NotNested(ChromaticRamseyError):
    """A child set escaped its parent in a level structure."""


class ActuallyShattered(ChromaticRamseyError):
    """nonshattered_subset called on a properly shattered parent."""


class ProfileTooSmall(ChromaticRamseyError):
    """A reduction step needs more colors than the profile provides."""


class IsBalanced(ChromaticRamseyError):
    """step_not_balanced called on a sequence that extends to a balanced one."""


class NotBaseCase(ChromaticRamseyError):
    """base_case_check called while the recursion can still step."""


class Stalled(ChromaticRamseyError):
    """A reduction step failed to shrink either the vertex set or the profile."""


class BudgetExceeded(ChromaticRamseyError):
    """Node or wall-clock budget exhausted mid-search."""

    def __init__(self, message, frontier=None):
        super().__init__(message)
        self.frontier = frontier


class Overflow(ChromaticRamseyError):
    """Result exceeds the lossless interop range (2^63 - 1)."""


class PreconditionViolation(ChromaticRamseyError):
    """Engine input failed its chromatic-(p,q) precondition; carries the witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class CertificateInvalid(ChromaticRamseyError):
    """Replay found a check whose verdict does not reproduce."""
