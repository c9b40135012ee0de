"""Exception types shared across the engine."""


class RagforgeError(Exception):
    """Base class for all engine errors."""


class EmptyDocumentError(RagforgeError):
    """Document text is empty after preprocessing."""


class DimensionMismatchError(RagforgeError):
    """Vector dimension disagrees with the index or provider dimension."""


class DuplicateChunkIdError(RagforgeError):
    """Same chunk_id submitted twice with different text (corpus inconsistency)."""


class EmptyIndexError(RagforgeError):
    """Search issued against an index with no entries."""


class IndexFormatError(RagforgeError):
    """Index file is not in the expected format."""


class VersionMismatchError(IndexFormatError):
    """Index file was written by an incompatible format version."""


class ChecksumError(IndexFormatError):
    """Index file payload is corrupt (checksum or length mismatch)."""


class ProviderUnreachableError(RagforgeError):
    """Remote provider could not be reached after retries."""


class ProviderRefusalError(RagforgeError):
    """Remote provider rejected the request (non-retryable)."""


class PipelineInitError(RagforgeError):
    """Pipeline initialization failed; the message names the failing stage."""
