"""Exception types shared across the engine.

Each error carries an ``exit_code`` so the CLI can map failures to distinct
process exit statuses.
"""


class CanopymapError(Exception):
    """Base class for all engine errors."""

    exit_code = 1


class ParseError(CanopymapError):
    """Input file is missing or does not parse as the documented format."""

    exit_code = 2


class ValidationError(CanopymapError):
    """Parsed data violates a structural invariant."""

    exit_code = 3


class ShapeError(CanopymapError):
    """Matrix dimensions do not match what the caller declared."""

    exit_code = 4


class NonFiniteError(CanopymapError):
    """Numeric input contains NaN or infinity."""

    exit_code = 5


class EmptyInput(CanopymapError):
    """Operation requires at least one data point."""

    exit_code = 6


class RangeError(CanopymapError):
    """Scalar parameter outside its documented range."""

    exit_code = 7


class UnknownNode(CanopymapError):
    """Node id does not exist in the tree."""

    exit_code = 8


class UnknownLeaf(CanopymapError):
    """Leaf id does not exist in the tree."""

    exit_code = 8


class DegenerateSpace(CanopymapError):
    """Available space cannot fit a single image cell."""

    exit_code = 9


class NoPredictions(CanopymapError):
    """Operation needs model predictions but the dataset has none."""

    exit_code = 10


class EmptySubset(CanopymapError):
    """Operation needs a nonempty selection of images."""

    exit_code = 10
