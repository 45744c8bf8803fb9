"""Exception hierarchy shared by the library and the CLI."""


class WlanVoipError(Exception):
    pass


class InvalidParameter(WlanVoipError, ValueError):
    """A caller supplied an out-of-range or inconsistent argument."""


class InvalidMap(InvalidParameter):
    pass


class UnsupportedSectorCount(InvalidParameter):
    pass


class InfeasibleParameters(WlanVoipError, ValueError):
    """Arguments are well-formed but describe a configuration that cannot work."""


class InfeasibleBudget(InfeasibleParameters):
    pass


class SlotTooSmall(InfeasibleParameters):
    pass


class PlanMissing(InfeasibleParameters):
    pass


class DuplicateVertex(WlanVoipError, KeyError):
    pass


class UnknownVertex(WlanVoipError, KeyError):
    pass


class ConfigInvalid(WlanVoipError):
    pass
