from .ip import (
    IP_MAX_LEN,
    PROTO_TCP,
    PROTO_UDP,
    IpHeader,
    ParsedPacket,
    TcpHeader,
    UdpHeader,
    finalize,
    ip_header_checksum,
    ones_complement_checksum,
    parse_packet,
    serialize,
    transport_checksum,
    validate,
    verifies,
)
from .pcap import (
    LINKTYPE_ETHERNET,
    LINKTYPE_RAW_IP,
    PcapCapture,
    PcapRecord,
    read_hex_dump,
    read_pcap,
    write_hex_dump,
    write_pcap,
)

__all__ = [
    "IP_MAX_LEN",
    "PROTO_TCP",
    "PROTO_UDP",
    "IpHeader",
    "TcpHeader",
    "UdpHeader",
    "ParsedPacket",
    "parse_packet",
    "serialize",
    "finalize",
    "validate",
    "verifies",
    "ones_complement_checksum",
    "ip_header_checksum",
    "transport_checksum",
    "LINKTYPE_ETHERNET",
    "LINKTYPE_RAW_IP",
    "PcapCapture",
    "PcapRecord",
    "read_pcap",
    "write_pcap",
    "read_hex_dump",
    "write_hex_dump",
]
