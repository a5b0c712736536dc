from .cache import SequenceCache, build_cache, cache_pad, load_cache, save_cache
from .schemes import (
    FIELD_BLOCK_LEN,
    PROVENANCE_CACHE,
    PROVENANCE_POLICY,
    PROVENANCE_RANDOM,
    SCHEME_FIXEDPAD,
    SCHEME_POSTPAD,
    SCHEME_PREPAD,
    SWEEP_LENGTHS,
    TRAILER_LEN,
    TRAILER_MAGIC,
    AdversarialByteSequence,
    PerturbationRecord,
    de_perturb,
    field_block,
    fixed_pad,
    post_pad,
    pre_pad,
    random_sequence,
    set_field_block,
)
from .sidecar import read_sidecar, write_sidecar

__all__ = [
    "AdversarialByteSequence",
    "PerturbationRecord",
    "SequenceCache",
    "pre_pad",
    "de_perturb",
    "post_pad",
    "fixed_pad",
    "random_sequence",
    "field_block",
    "set_field_block",
    "build_cache",
    "cache_pad",
    "save_cache",
    "load_cache",
    "read_sidecar",
    "write_sidecar",
    "SCHEME_PREPAD",
    "SCHEME_POSTPAD",
    "SCHEME_FIXEDPAD",
    "SWEEP_LENGTHS",
    "TRAILER_LEN",
    "TRAILER_MAGIC",
    "FIELD_BLOCK_LEN",
    "PROVENANCE_RANDOM",
    "PROVENANCE_POLICY",
    "PROVENANCE_CACHE",
]
