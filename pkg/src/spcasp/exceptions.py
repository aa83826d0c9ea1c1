"""Exception types raised across the package."""


class DimensionMismatch(ValueError):
    """Vector or matrix shape incompatible with the operation."""


class StackFull(RuntimeError):
    """A reflector stack already holds one reflector per dimension."""


class NotSymmetric(ValueError):
    """Input matrix is not symmetric within tolerance."""


class ZeroMatrix(ValueError):
    """Operation undefined for an (effectively) zero matrix."""


class ZeroVector(ValueError):
    """Operation undefined for a zero vector."""


class RankDeficient(RuntimeError):
    """Sketch spans fewer directions than the requested subspace dimension.

    Reduce the subspace dimension or raise the sample count.
    """


class Unreachable(RuntimeError):
    """No admissible subspace dimension reaches the variance target."""


class AllEntriesTruncated(ValueError):
    """Hard-thresholding removed every entry; the threshold is too large."""


class RankCollapse(RuntimeError):
    """Projection update left no usable subspace column."""


class UndefinedForSingleLoading(ValueError):
    """Total orthogonality needs at least two loadings."""


class ParseError(ValueError):
    """Malformed numeric input file."""


class RaggedRows(ParseError):
    """CSV rows have inconsistent lengths."""


class AssetCorrupt(RuntimeError):
    """A bundled data file failed its checksum."""
