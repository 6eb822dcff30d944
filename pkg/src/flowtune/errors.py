"""Exception hierarchy shared across the package."""


class FlowtuneError(Exception):
    """Base class for all package-specific errors."""


class FieldOverflow(FlowtuneError):
    """A value does not fit the bit width declared for its field."""


class CapacityExhausted(FlowtuneError):
    """The flow-ID register bank is full and the key is new."""


class SinkUnavailable(FlowtuneError):
    """The collector is detached; a mirrored record cannot be delivered."""


class UnknownRegister(FlowtuneError):
    """Register name not recognized by the control endpoint."""


class IndexOutOfRange(FlowtuneError):
    """Register index outside the bank's capacity."""


class ValueOutOfRange(FlowtuneError):
    """Register value outside its legal range."""


class UnsortedTrace(FlowtuneError):
    """Trace rows are not sorted by timestamp."""


class OverlappingPortSets(FlowtuneError):
    """Two class profiles (or label-map entries) claim the same port."""


class SchemaMismatch(FlowtuneError):
    """A dataset/trace file does not match the expected column schema."""


class MissingLabel(FlowtuneError):
    """A dataset row lacks the required class label."""


class ClassTooSmall(FlowtuneError):
    """A class has too few samples for a stratified split."""


class LengthMismatch(FlowtuneError):
    """Prediction and truth sequences differ in length (or are empty)."""


class SingleClassOnly(FlowtuneError):
    """ROC is undefined: no positives or no negatives for the class."""


class DimensionMismatch(FlowtuneError):
    """Image matrices have different shapes."""


class ConfigInvalid(FlowtuneError):
    """Scenario or policy configuration failed validation."""


class ParseFailure(FlowtuneError):
    """A numeric input file could not be parsed."""


class IoFailure(FlowtuneError):
    """An output destination could not be written or read."""
