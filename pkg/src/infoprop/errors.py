"""Exception hierarchy shared by every module in the package."""


class InfopropError(Exception):
    """Base class for all errors raised by infoprop."""


class InvalidNetwork(InfopropError, ValueError):
    """The network violates a structural invariant (self-loop, duplicate edge, ...)."""


class EmptyNetwork(InfopropError, ValueError):
    """The network has no agents besides the sponsor."""


class SchemeRequiresTwoFirstLayerAgents(InfopropError, ValueError):
    """The budget distribution scheme needs at least two agents in the first layer."""


class EdgeNotOwned(InfopropError, ValueError):
    """An edge passed to ``hide_edges`` does not originate at the hiding agent."""


class NotSingleAgentLayer(InfopropError, ValueError):
    pass


class NoAncestorFound(InfopropError, RuntimeError):
    pass


class EnumerationCapExceeded(InfopropError, ValueError):
    """An agent has too many out-edges for exhaustive deviation enumeration."""


class UnknownFixture(InfopropError, KeyError):
    pass


class InvalidParameters(InfopropError, ValueError):
    pass
