"""
core/errors.py
Exception hierarchy shared by every package.
"""


class MedialFieldError(Exception):
    """Base class for all domain errors raised by this project."""


class GradientUndefined(MedialFieldError):
    """Query sits on the medial locus (raw gradient magnitude below threshold)."""


class BoundsDegenerate(MedialFieldError):
    """A bounding box has a non-positive extent, or cannot be derived."""


class SpokeMarchFailed(MedialFieldError):
    """The spoke identity |phi(foot + t n)| = t fails at its starting point."""


class ExcludedRegion(MedialFieldError):
    """Point lies inside the exclusion band around the surface or medial locus."""


class EmptyBatch(MedialFieldError):
    """A loss was requested on a batch with no samples."""


class DivergedLoss(MedialFieldError):
    """Total training loss became non-finite."""


class Dim2NotRenderable(MedialFieldError):
    """Perspective rendering was requested for a 2D scene."""


class RejectionStarved(MedialFieldError):
    """Interior rejection sampling accepted too few trials."""


class NotEnoughCandidates(MedialFieldError):
    """More spheres were requested than candidates exist."""


class EmptyProxy(MedialFieldError):
    """A proxy representation with no spheres / samples was evaluated."""


class SceneError(MedialFieldError):
    """Scene file is missing or invalid."""


class CheckpointError(MedialFieldError):
    """Checkpoint is missing, truncated or does not match its header."""
