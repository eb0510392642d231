"""Exception types shared across the engine."""


class SlothError(Exception):
    """Base class for all engine errors."""


class InvalidInputError(SlothError, ValueError):
    """Malformed caller input: bad vector lengths, boxes, images, blobs."""


class ConflictError(SlothError):
    """Duplicate id, or a write against a frozen index."""


class ConfigError(SlothError):
    """Rejected index configuration."""


class EmptyQueryError(SlothError):
    """Query with no active modality."""


class ManifestError(SlothError):
    """Unreadable or inconsistent dataset manifest."""


class StorageError(SlothError):
    """Index persistence failure: bad magic, version, or checksum."""
