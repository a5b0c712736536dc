import random

import pytest

from advpad.errors import EmptyAfterFiltering
from advpad.evalkit import (
    PacketSample,
    load_jsonl,
    load_pcap_dir,
    preprocess,
    save_jsonl,
    strip_ethernet,
    strip_for_classifier,
)
from advpad.packet import (
    LINKTYPE_ETHERNET,
    PcapCapture,
    PcapRecord,
    serialize,
    write_pcap,
)
from packetgen import make_tcp_packet, make_udp_packet


def make_samples(n=1000, seed=0):
    rng = random.Random(seed)
    out = []
    for i in range(n):
        pkt = make_tcp_packet(rng, payload_len=rng.randrange(30, 200))
        out.append(
            PacketSample(
                raw=serialize(pkt),
                label="app-%d" % (i % 4),
                flow_id="flow-%d" % (i // 10),
                direction=i % 2,
            )
        )
    return out


def test_split_sizes_eight_one_one():
    ds = preprocess(make_samples(1000), seed=3)
    assert len(ds.train_indices) == 800
    assert len(ds.val_indices) == 100
    assert len(ds.test_indices) == 100
    assert not (set(ds.train_indices) & set(ds.val_indices))
    assert not (set(ds.train_indices) & set(ds.test_indices))
    assert not (set(ds.val_indices) & set(ds.test_indices))


def test_split_deterministic_by_seed():
    a = preprocess(make_samples(200), seed=5)
    b = preprocess(make_samples(200), seed=5)
    c = preprocess(make_samples(200), seed=6)
    assert a.train_indices == b.train_indices
    assert a.train_indices != c.train_indices


def test_arp_only_dataset_rejected():
    arp = b"\x00\x01\x08\x00\x06\x04\x00\x01" + b"\x00" * 20
    with pytest.raises(EmptyAfterFiltering):
        preprocess([PacketSample(raw=arp, label="x")], seed=0)


def test_stripped_bytes_contain_no_ip_header_or_ports():
    rng = random.Random(1)
    pkt = make_tcp_packet(rng, payload_len=60)
    ip_header = serialize(pkt)[:20]
    sample = preprocess([PacketSample(raw=serialize(pkt), label="a"),
                         PacketSample(raw=serialize(make_tcp_packet(rng, payload_len=50)), label="b")],
                        seed=0).samples[0]
    assert ip_header not in sample.data
    # stripped view starts at the sequence number, not the ports
    assert sample.data[:4] == serialize(pkt)[24:28]
    # checksum bytes are zeroed
    assert sample.data[12:14] == b"\x00\x00"


def test_payloadless_and_dhcp_dropped():
    rng = random.Random(2)
    keep = make_tcp_packet(rng, payload_len=40)
    no_payload = make_tcp_packet(rng, payload_len=0)
    dhcp = make_udp_packet(rng, payload_len=100)
    dhcp.transport.src_port = 68
    dhcp.transport.dst_port = 67
    from advpad.packet import finalize

    dhcp = finalize(dhcp)
    ds = preprocess(
        [
            PacketSample(raw=serialize(p), label="x")
            for p in (keep, no_payload, dhcp, keep)
        ],
        seed=0,
    )
    assert len(ds.samples) == 2


def test_label_remap_dense():
    rng = random.Random(3)
    samples = [
        PacketSample(raw=serialize(make_tcp_packet(rng, payload_len=30)), label=lbl)
        for lbl in ("zebra", "alpha", "zebra", "mid")
    ]
    ds = preprocess(samples, seed=0)
    assert ds.label_names == ["alpha", "mid", "zebra"]
    assert sorted(set(s.label for s in ds.samples)) == [0, 1, 2]


def test_jsonl_round_trip(tmp_path):
    samples = make_samples(20)
    path = tmp_path / "data.jsonl"
    save_jsonl(path, samples)
    loaded = load_jsonl(path)
    assert [(s.raw, s.label, s.flow_id, s.direction) for s in loaded] == [
        (s.raw, s.label, s.flow_id, s.direction) for s in samples
    ]


def test_strip_ethernet():
    ip = b"\x45" + b"\x00" * 19
    eth = b"\xaa" * 6 + b"\xbb" * 6 + b"\x08\x00"
    assert strip_ethernet(eth + ip, LINKTYPE_ETHERNET) == ip
    arp_frame = b"\xaa" * 6 + b"\xbb" * 6 + b"\x08\x06" + b"\x00" * 28
    assert strip_ethernet(arp_frame, LINKTYPE_ETHERNET) is None
    assert strip_ethernet(ip, 101) == ip


def test_pcap_dir_ingestion(tmp_path):
    rng = random.Random(4)
    eth = b"\x02" * 6 + b"\x04" * 6 + b"\x08\x00"
    for name, label in [("a.pcap", "chat"), ("b.pcap", "voip")]:
        cap = PcapCapture(linktype=LINKTYPE_ETHERNET)
        for i in range(5):
            raw = eth + serialize(make_tcp_packet(rng, payload_len=50))
            cap.records.append(PcapRecord(ts_sec=i, ts_usec=0, data=raw))
        write_pcap(tmp_path / name, cap)
    (tmp_path / "labels.csv").write_text("a.pcap,chat\nb.pcap,voip\n")
    samples = load_pcap_dir(tmp_path, tmp_path / "labels.csv")
    assert len(samples) == 10
    assert {s.label for s in samples} == {"chat", "voip"}
    # Ethernet header must be gone
    assert all(s.raw[0] >> 4 == 4 for s in samples)


def test_strip_udp_layout():
    rng = random.Random(5)
    pkt = make_udp_packet(rng, payload_len=30)
    data = strip_for_classifier(pkt)
    # length field kept, checksum zeroed, ports gone
    assert data[:2] == serialize(pkt)[24:26]
    assert data[2:4] == b"\x00\x00"
    assert data[4:] == pkt.payload
