from .dataset import (
    LabeledDataset,
    PacketSample,
    Sample,
    load_jsonl,
    load_pcap_dir,
    preprocess,
    save_jsonl,
    strip_ethernet,
    strip_for_classifier,
)
from .evaluate import (
    DEFAULT_SCHEMES,
    SCHEME_CACHE,
    SCHEME_FIXEDPAD,
    SCHEME_NONE,
    SCHEME_PREPAD_POLICY,
    SCHEME_PREPAD_RANDOM,
    SCHEME_RANDPOSTPAD,
    SCHEME_RLPOSTPAD,
    Burst,
    EvalReport,
    LatencyReport,
    ReportRow,
    burst_view,
    eval_burst_defense,
    eval_packet_defense,
    group_bursts,
    measure_perturb_latency,
    perturb_packets,
)
from .metrics import acc, acc_from_labels, bandwidth_overhead
from .report import write_curve, write_eval_report
from .sweeps import (
    ALPHA_RANGE,
    TEMPERATURE_RANGE,
    sweep_entropy_alpha,
    sweep_padding_length,
    sweep_temperature,
)
from .synth import SynthConfig, make_synthetic_packets

__all__ = [
    "LabeledDataset",
    "PacketSample",
    "Sample",
    "preprocess",
    "strip_for_classifier",
    "strip_ethernet",
    "load_jsonl",
    "save_jsonl",
    "load_pcap_dir",
    "SynthConfig",
    "make_synthetic_packets",
    "acc",
    "acc_from_labels",
    "bandwidth_overhead",
    "EvalReport",
    "ReportRow",
    "Burst",
    "LatencyReport",
    "eval_packet_defense",
    "eval_burst_defense",
    "group_bursts",
    "burst_view",
    "perturb_packets",
    "measure_perturb_latency",
    "sweep_padding_length",
    "sweep_temperature",
    "sweep_entropy_alpha",
    "TEMPERATURE_RANGE",
    "ALPHA_RANGE",
    "write_eval_report",
    "write_curve",
    "DEFAULT_SCHEMES",
    "SCHEME_NONE",
    "SCHEME_RANDPOSTPAD",
    "SCHEME_FIXEDPAD",
    "SCHEME_RLPOSTPAD",
    "SCHEME_PREPAD_RANDOM",
    "SCHEME_PREPAD_POLICY",
    "SCHEME_CACHE",
]
