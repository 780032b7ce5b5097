class DomainError(ValueError):
    """A map or formula was evaluated outside its domain."""


class ConfigurationError(ValueError):
    """An experiment configuration violates a hypothesis it relies on."""


class ResourceLimitError(RuntimeError):
    """An exhaustive enumeration was asked to exceed its configured cap."""
