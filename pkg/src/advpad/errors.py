"""Exception types shared across the toolkit.

Every error raised by advpad derives from AdvPadError so callers (and the
CLI) can map failures to a single category line.
"""


class AdvPadError(Exception):
    """Base class for all advpad errors."""

    category = "Internal"


# --- packet model ---------------------------------------------------------

class PacketError(AdvPadError):
    category = "Packet"


class TruncatedPacket(PacketError):
    """Raw bytes are shorter than the lengths declared in the headers."""


class UnsupportedProtocol(PacketError):
    """Not IPv4, or transport protocol outside {TCP, UDP}."""


class MalformedHeader(PacketError):
    """Structurally invalid header (ihl < 5, bad data offset, ...)."""


class PacketTooLarge(PacketError):
    """Mutation would push total_length past 65535."""


class BadMagic(PacketError):
    """pcap file does not start with a known magic number."""


class TruncatedRecord(PacketError):
    """pcap record header declares more bytes than the file holds."""


# --- perturb ---------------------------------------------------------------

class PerturbError(AdvPadError):
    category = "Perturb"


class InconsistentRecord(PerturbError):
    """Reversal record disagrees with the packet's length arithmetic."""


class AlreadyLonger(PerturbError):
    """fixed_pad target is below the current packet length."""


class EmptyCache(PerturbError):
    """Sequence cache holds no entries."""


# --- classifier ------------------------------------------------------------

class OracleError(AdvPadError):
    category = "Oracle"


class EmptyInput(OracleError):
    """Prediction requested for an empty byte sequence."""


class OracleUnavailable(OracleError):
    """Remote oracle endpoint could not be reached."""


class ProtocolError(OracleError):
    """Remote oracle response violates the wire protocol."""


class CapabilityUnsupported(OracleError):
    """Oracle lacks a capability (distribution/embedding) the caller needs."""


class DegenerateDataset(AdvPadError):
    category = "Data"
    """Dataset unusable for training (single class, too few samples)."""


# --- rlgen -----------------------------------------------------------------

class RlError(AdvPadError):
    category = "Train"


class EpisodeFinished(RlError):
    """env_step called after the episode consumed its budget."""


class NonPositiveTemperature(RlError):
    """Softmax temperature must be > 0."""


class NaNLoss(RlError):
    """A loss became NaN; training aborts and reports the step."""


# --- evalkit ---------------------------------------------------------------

class EmptyAfterFiltering(AdvPadError):
    category = "Data"
    """Preprocessing removed every packet."""


class ConfigError(AdvPadError):
    category = "Config"
