"""Exception hierarchy shared by all modules."""


class AtlasError(Exception):
    """Base class for every error raised by shimura_atlas."""


class GroupTooLarge(AtlasError):
    pass


class DimensionMismatch(AtlasError, ValueError):
    pass


class InvalidModel(AtlasError, ValueError):
    pass


class InvalidData(AtlasError, ValueError):
    pass


class EmptySubset(AtlasError, ValueError):
    pass


class EmptyOrbitMember(AtlasError, ValueError):
    pass


class InvalidPartialCMType(AtlasError, ValueError):
    pass


class NotClassicalCMType(AtlasError, ValueError):
    pass


class InconsistentData(AtlasError, ValueError):
    pass


class NotPrimitive(AtlasError, ValueError):
    pass


class OrbitMismatch(AtlasError, ValueError):
    pass


class Case0Rejected(AtlasError, ValueError):
    pass


class DuplicateIsotype(AtlasError, ValueError):
    pass


class MixedAdjointData(AtlasError, ValueError):
    pass


class IndexOutOfRange(AtlasError, IndexError):
    pass
