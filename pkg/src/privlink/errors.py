"""Exception hierarchy shared across the toolkit."""


class PrivlinkError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(PrivlinkError):
    """A record, feature, or field does not fit the governing schema."""


class CapacityError(PrivlinkError):
    """A configured size cap would be exceeded (caller must coarsen inputs)."""


class IngestError(PrivlinkError):
    """A delimited input file is malformed; the message names the line."""


class ConfigError(PrivlinkError):
    """A key-value configuration file is missing or malformed."""


class FramingError(PrivlinkError):
    """A wire frame is truncated, oversize, or otherwise undecodable."""


class ProtocolError(PrivlinkError):
    """A party received a message that is illegal in its current phase."""


class TransportError(PrivlinkError):
    """The byte-stream transport failed mid-protocol."""


class AuditError(PrivlinkError):
    """An append was attempted on an unverifiable audit log tail."""
