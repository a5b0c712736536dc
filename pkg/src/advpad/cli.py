"""Command-line surface for the whole pipeline.

Subcommands: synth, preprocess, train-oracle, train, perturb, deperturb,
eval, sweep, cache, latency. Every run is seeded, writes a manifest next
to its outputs, and exits non-zero with a single machine-parseable
`error: <Category>: <message>` line on failure.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .errors import AdvPadError, ConfigError
from .manifest import write_manifest

EXIT_CODES = {"Usage": 2, "Io": 3, "Config": 4}


def _fail(category: str, message: str) -> int:
    print("error: %s: %s" % (category, message), file=sys.stderr)
    return EXIT_CODES.get(category, 1)


def _load_oracle(spec: str | None, want_distribution=False, want_embedding=False):
    from .classifier import RemoteOracle, ToyOracle, default_endpoint, load_toy

    if spec is None:
        endpoint = default_endpoint()
        if endpoint is None:
            raise ConfigError("no --oracle given and ADVPAD_ORACLE_URL is unset")
        spec = "remote:" + endpoint
    if spec.startswith("remote:"):
        return RemoteOracle(spec[len("remote:"):], want_distribution, want_embedding)
    path = spec[len("toy:"):] if spec.startswith("toy:") else spec
    if not Path(path).exists():
        raise ConfigError("oracle checkpoint not found: %s" % path)
    return ToyOracle(load_toy(path))


def _load_dataset_samples(args):
    from .evalkit import load_jsonl, load_pcap_dir

    if getattr(args, "pcap_dir", None):
        if not args.labels:
            raise ConfigError("--pcap-dir requires --labels CSV")
        return load_pcap_dir(args.pcap_dir, args.labels)
    path = args.input
    if not Path(path).exists():
        raise ConfigError("dataset not found: %s" % path)
    return load_jsonl(path)


def _split_packets(samples, split_seed: int):
    """Preprocess and return (dataset, packets by split)."""
    from .evalkit import preprocess
    from .packet import parse_packet

    ds = preprocess(samples, seed=split_seed)
    packets = {
        name: [parse_packet(samples[s.source_index].raw) for s in ds.split(name)]
        for name in ("train", "val", "test")
    }
    return ds, packets


# --- subcommand implementations ----------------------------------------------


def cmd_synth(args) -> int:
    from .evalkit import SynthConfig, make_synthetic_packets, save_jsonl

    cfg = SynthConfig(
        n_classes=args.classes, packets_per_class=args.per_class, seed=args.seed
    )
    samples = make_synthetic_packets(cfg)
    save_jsonl(args.out, samples)
    write_manifest(args.out, "synth", args.seed, [], [args.out],
                   extra={"classes": args.classes, "per_class": args.per_class})
    print("wrote %d packets to %s" % (len(samples), args.out))
    return 0


def cmd_preprocess(args) -> int:
    samples = _load_dataset_samples(args)
    from .evalkit import preprocess

    ds = preprocess(samples, seed=args.seed)
    split_of = {}
    for name in ("train", "val", "test"):
        for i in getattr(ds, f"{name}_indices"):
            split_of[i] = name
    with open(args.out, "w", encoding="utf-8") as f:
        f.write(json.dumps({
            "classes": ds.label_names,
            "seed": ds.seed,
            "counts": {
                "train": len(ds.train_indices),
                "val": len(ds.val_indices),
                "test": len(ds.test_indices),
            },
        }) + "\n")
        for i, s in enumerate(ds.samples):
            f.write(json.dumps({
                "bytes_hex": s.data.hex(),
                "label": s.label,
                "flow_id": s.flow_id,
                "direction": s.direction,
                "split": split_of[i],
            }) + "\n")
    write_manifest(args.out, "preprocess", args.seed,
                   [args.input or args.pcap_dir], [args.out])
    print("preprocessed %d samples (%s)" % (len(ds.samples), ds.label_names))
    return 0


def cmd_train_oracle(args) -> int:
    from .classifier import ToyConfig, ToyOracle, ground_truth_accuracy, save_toy, train_toy

    samples = _load_dataset_samples(args)
    ds, _packets = _split_packets(samples, args.split_seed)
    model = train_toy(ds, ToyConfig(epochs=args.epochs, seed=args.seed))
    version = save_toy(args.out, model)
    test = ds.split("test")
    acc = ground_truth_accuracy(ToyOracle(model), [s.data for s in test], [s.label for s in test])
    write_manifest(args.out, "train-oracle", args.seed, [args.input or args.pcap_dir],
                   [args.out], checkpoint=args.out,
                   extra={"clean_test_accuracy": acc, "version": version})
    print("toy oracle %s: clean test accuracy %.4f" % (version, acc))
    return 0


def cmd_train(args) -> int:
    import dataclasses

    from .rlgen import TrainConfig, load_config, save_policy, train

    cfg = load_config(args.config) if args.config else TrainConfig()
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.budget is not None:
        cfg = dataclasses.replace(cfg, budget=args.budget)
    if args.scheme is not None:
        cfg = dataclasses.replace(cfg, scheme=args.scheme)
    if args.max_episodes is not None:
        cfg = dataclasses.replace(cfg, max_episodes=args.max_episodes)
    cfg.validate()

    oracle = _load_oracle(args.oracle,
                          want_distribution=cfg.reward_mode == "whitebox",
                          want_embedding=cfg.reward_mode == "whitebox"
                          and cfg.distance_on == "embedding")
    samples = _load_dataset_samples(args)
    _ds, packets = _split_packets(samples, args.split_seed)
    trained = train(packets["train"], oracle, cfg)
    version = save_policy(args.out, trained)
    write_manifest(args.out, "train", cfg.seed, [args.input or args.pcap_dir],
                   [args.out], config_path=args.config, checkpoint=args.out,
                   extra={"version": version, "episodes": len(packets["train"])
                          if cfg.max_episodes is None else cfg.max_episodes})
    print("policy %s trained (%s, budget %d)" % (version, cfg.scheme, cfg.budget))
    return 0


def _iter_ip_records(cap):
    """(record, ip_bytes or None, eth_prefix) per pcap record."""
    from .evalkit import strip_ethernet
    from .packet import LINKTYPE_ETHERNET

    for rec in cap.records:
        if cap.linktype == LINKTYPE_ETHERNET:
            ip = strip_ethernet(rec.data, cap.linktype)
            prefix = rec.data[:14] if ip is not None else b""
        else:
            ip, prefix = rec.data, b""
        yield rec, ip, prefix


def cmd_perturb(args) -> int:
    from .errors import PacketError
    from .packet import PcapRecord, parse_packet, read_pcap, serialize, write_pcap
    from .perturb import (
        fixed_pad,
        load_cache,
        post_pad,
        pre_pad,
        random_sequence,
        write_sidecar,
    )

    cap = read_pcap(args.input)
    policy = None
    cache = None
    if args.checkpoint:
        from .rlgen import load_policy

        policy = load_policy(args.checkpoint)
    if args.cache:
        cache = load_cache(args.cache)
    budget = args.budget

    # collect perturbable packets first so policy rollouts can batch
    entries = list(_iter_ip_records(cap))
    parsed = []
    for idx, (rec, ip, _prefix) in enumerate(entries):
        pkt = None
        if ip is not None:
            try:
                pkt = parse_packet(ip)
            except PacketError:
                pkt = None
        parsed.append(pkt)

    sequences: dict[int, bytes] = {}
    if args.scheme in ("prepad", "postpad"):
        todo = [i for i, p in enumerate(parsed) if p is not None]
        if policy is not None:
            from .rlgen import rollout_sequences

            seqs = rollout_sequences(
                policy, [parsed[i] for i in todo], budget, args.scheme, seed=args.seed
            )
            sequences = dict(zip(todo, seqs))
        elif cache is not None and args.scheme == "prepad":
            rng = random.Random(args.seed)
            sequences = {
                i: cache.entries[rng.randrange(len(cache.entries))].data for i in todo
            }
        else:
            rng_seed = args.seed
            sequences = {
                i: random_sequence(budget, rng_seed + i).data for i in todo
            }

    out_records = []
    records = {}
    n_perturbed = 0
    for idx, (rec, _ip, prefix) in enumerate(entries):
        pkt = parsed[idx]
        if pkt is None:
            out_records.append(rec)  # non-IP traffic passes through
            continue
        if args.scheme == "prepad":
            out_pkt, record = pre_pad(pkt, sequences[idx])
            records[idx] = record
        elif args.scheme == "postpad":
            out_pkt = post_pad(pkt, sequences[idx])
        elif args.scheme == "fixedpad":
            from .errors import AlreadyLonger

            try:
                out_pkt = fixed_pad(pkt, args.target_len)
            except AlreadyLonger:
                out_pkt = pkt
        elif args.scheme == "cache":
            if cache is None:
                raise ConfigError("--scheme cache requires --cache FILE")
            rng = random.Random(args.seed * 1_000_003 + idx)
            from .perturb import cache_pad

            out_pkt, record = cache_pad(pkt, cache, rng)
            records[idx] = record
        else:
            raise ConfigError("unknown scheme %s" % args.scheme)
        n_perturbed += 1
        out_records.append(
            PcapRecord(rec.ts_sec, rec.ts_usec, prefix + serialize(out_pkt))
        )
    cap.records = out_records
    write_pcap(args.out, cap)
    outputs = [args.out]
    if args.sidecar:
        write_sidecar(args.sidecar, records)
        outputs.append(args.sidecar)
    write_manifest(args.out, "perturb", args.seed, [args.input], outputs,
                   checkpoint=args.checkpoint,
                   extra={"scheme": args.scheme, "budget": budget,
                          "perturbed": n_perturbed, "records": len(out_records)})
    print("perturbed %d/%d records -> %s" % (n_perturbed, len(out_records), args.out))
    return 0


def cmd_deperturb(args) -> int:
    from .errors import PacketError
    from .packet import PcapRecord, parse_packet, read_pcap, serialize, write_pcap
    from .perturb import de_perturb, read_sidecar

    cap = read_pcap(args.input)
    records = read_sidecar(args.sidecar) if args.sidecar else {}
    out_records = []
    restored = 0
    for idx, (rec, ip, prefix) in enumerate(_iter_ip_records(cap)):
        if ip is None:
            out_records.append(rec)
            continue
        try:
            pkt = parse_packet(ip)
        except PacketError:
            out_records.append(rec)
            continue
        meta = records.get(idx)
        if meta is None and args.sidecar:
            out_records.append(rec)  # not perturbed per sidecar
            continue
        back = de_perturb(pkt, meta)
        restored += 1
        out_records.append(PcapRecord(rec.ts_sec, rec.ts_usec, prefix + serialize(back)))
    cap.records = out_records
    write_pcap(args.out, cap)
    write_manifest(args.out, "deperturb", None, [args.input, args.sidecar or ""],
                   [args.out], extra={"restored": restored})
    print("restored %d/%d records -> %s" % (restored, len(out_records), args.out))
    return 0


def cmd_eval(args) -> int:
    from .evalkit import (
        eval_burst_defense,
        eval_packet_defense,
        group_bursts,
        write_eval_report,
    )

    oracle = _load_oracle(args.oracle)
    samples = _load_dataset_samples(args)
    ds, packets = _split_packets(samples, args.split_seed)
    test_samples = ds.split("test")
    policy = postpad_policy = cache = None
    if args.checkpoint:
        from .rlgen import load_policy

        policy = load_policy(args.checkpoint)
    if args.postpad_checkpoint:
        from .rlgen import load_policy

        postpad_policy = load_policy(args.postpad_checkpoint)
    if args.cache:
        from .perturb import load_cache

        cache = load_cache(args.cache)

    schemes = tuple(s.strip() for s in args.schemes.split(",") if s.strip())
    report = eval_packet_defense(
        oracle,
        packets["test"],
        labels=[s.label for s in test_samples],
        schemes=schemes,
        budget=args.budget,
        policy=policy,
        postpad_policy=postpad_policy,
        cache=cache,
        seed=args.seed,
    )
    written = write_eval_report(args.out, "packet_defense", report, figures=not args.no_figures)
    outputs = list(written.values())

    if args.bursts:
        from .packet import parse_packet

        lookup = {s.source_index: parse_packet(samples[s.source_index].raw) for s in test_samples}
        bursts = group_bursts(test_samples, lambda i: lookup[i])
        for b in bursts:
            pass
        burst_scheme = next(
            (s for s in schemes if s not in ("no-defense",)), "prepad-random"
        )
        burst_report = eval_burst_defense(
            oracle, bursts, scheme=burst_scheme, budget=args.budget,
            policy=policy, postpad_policy=postpad_policy, cache=cache, seed=args.seed,
        )
        outputs += list(write_eval_report(args.out, "burst_defense", burst_report,
                                          figures=not args.no_figures).values())

    write_manifest(args.out, "eval", args.seed, [args.input or args.pcap_dir], outputs,
                   checkpoint=args.checkpoint)
    for row in report.rows:
        print("%-16s ACC=%.4f" % (row.scheme, row.acc))
    return 0


def cmd_sweep(args) -> int:
    from .evalkit import write_curve

    oracle = _load_oracle(args.oracle)
    samples = _load_dataset_samples(args)
    ds, packets = _split_packets(samples, args.split_seed)
    test_samples = ds.split("test")
    outputs = []

    if args.kind == "truncation":
        from .classifier import truncation_sweep

        lengths = [int(x) for x in args.lengths.split(",")] if args.lengths else None
        curve = truncation_sweep(
            oracle, [(s.data, s.label) for s in test_samples],
            lengths=lengths or (1, 2, 4, 8, 16, 32, 64, 128),
        )
        outputs += list(write_curve(args.out, "truncation", "input_length",
                                    sorted(curve.items()), ylabel="accuracy",
                                    figures=not args.no_figures).values())
        for length, value in sorted(curve.items()):
            print("len=%-4d acc=%.4f" % (length, value))
    else:
        if not args.checkpoint:
            raise ConfigError("sweep kind %s requires --checkpoint" % args.kind)
        from .rlgen import load_policy

        policy = load_policy(args.checkpoint)
        if args.kind == "padding":
            from .evalkit import sweep_padding_length

            lengths = [int(x) for x in args.lengths.split(",")] if args.lengths else (1, 2, 4, 8, 16, 32)
            curve = sweep_padding_length(oracle, packets["test"], policy,
                                         lengths=lengths, seed=args.seed)
            outputs += list(write_curve(args.out, "padding_length", "budget",
                                        sorted(curve.items()),
                                        figures=not args.no_figures).values())
            for length, value in sorted(curve.items()):
                print("budget=%-4d ACC=%.4f" % (length, value))
        elif args.kind == "temperature":
            from .evalkit import TEMPERATURE_RANGE, sweep_temperature

            taus = [float(x) for x in args.taus.split(",")] if args.taus else TEMPERATURE_RANGE
            rows = sweep_temperature(oracle, packets["test"], policy, taus=taus, seed=args.seed)
            points = [(r["tau"], r["acc"]) for r in rows]
            outputs += list(write_curve(args.out, "temperature", "tau", points,
                                        figures=not args.no_figures,
                                        extra_columns={"rows": [{"mean_entropy": r["mean_entropy"]} for r in rows]}).values())
            for r in rows:
                print("tau=%-5.2f ACC=%.4f mean_entropy=%.3f" % (r["tau"], r["acc"], r["mean_entropy"]))
        elif args.kind == "entropy":
            import dataclasses

            from .evalkit import ALPHA_RANGE, sweep_entropy_alpha
            from .rlgen import TrainConfig, load_config

            base = load_config(args.config) if args.config else TrainConfig()
            if args.max_episodes is not None:
                base = dataclasses.replace(base, max_episodes=args.max_episodes)
            alphas = [float(x) for x in args.alphas.split(",")] if args.alphas else ALPHA_RANGE
            rows = sweep_entropy_alpha(oracle, packets["train"], packets["test"],
                                       base, alphas=alphas, seed=args.seed)
            points = [(r["alpha"], r["acc"]) for r in rows]
            outputs += list(write_curve(args.out, "entropy_alpha", "alpha", points,
                                        figures=not args.no_figures,
                                        extra_columns={"rows": [{"mean_entropy": r["mean_entropy"]} for r in rows]}).values())
            for r in rows:
                print("alpha=%-5.2f ACC=%.4f mean_entropy=%.3f" % (r["alpha"], r["acc"], r["mean_entropy"]))
        else:
            raise ConfigError("unknown sweep kind %s" % args.kind)

    write_manifest(args.out, "sweep", args.seed, [args.input or args.pcap_dir], outputs,
                   checkpoint=args.checkpoint)
    return 0


def cmd_cache(args) -> int:
    from .perturb import build_cache, save_cache
    from .rlgen import load_policy

    policy = load_policy(args.checkpoint)
    samples = _load_dataset_samples(args)
    _ds, packets = _split_packets(samples, args.split_seed)
    pool = packets["train"] or packets["test"]
    cache = build_cache(policy, pool, k=args.k, length=args.len, seed=args.seed)
    save_cache(args.out, cache)
    write_manifest(args.out, "cache", args.seed, [args.input or args.pcap_dir],
                   [args.out], checkpoint=args.checkpoint,
                   extra={"k": args.k, "len": args.len})
    print("cache with %d sequences of %d bytes -> %s" % (args.k, args.len, args.out))
    return 0


def cmd_latency(args) -> int:
    import random as _random

    from .evalkit import measure_perturb_latency
    from .perturb import cache_pad, load_cache

    cache = load_cache(args.cache)
    samples = _load_dataset_samples(args)
    from .errors import PacketError
    from .packet import parse_packet

    packets = []
    for s in samples:
        try:
            packets.append(parse_packet(s.raw))
        except PacketError:
            continue
    rng = _random.Random(args.seed)

    def cached_prepad(pkt):
        return cache_pad(pkt, cache, rng)[0]

    identity = measure_perturb_latency(lambda p: p, packets, min_packets=args.packets)
    cached = measure_perturb_latency(cached_prepad, packets, min_packets=args.packets)
    payload = {"identity": identity.to_dict(), "cache_prepad": cached.to_dict()}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "latency.json").write_text(json.dumps(payload, indent=2) + "\n", "utf-8")
    write_manifest(args.out, "latency", args.seed, [args.input or args.pcap_dir],
                   [str(out / "latency.json")])
    print("cache_prepad mean %.4f ms/packet over %d packets (identity %.4f ms)" % (
        cached.mean_ms, cached.packets, identity.mean_ms))
    return 0


# --- argument parsing ----------------------------------------------------------


def _add_dataset_args(p, required=True):
    p.add_argument("--in", dest="input", help="packet dataset JSONL")
    p.add_argument("--pcap-dir", help="directory of pcap files")
    p.add_argument("--labels", help="labels.csv for --pcap-dir")
    p.add_argument("--split-seed", type=int, default=11, help="8:1:1 split seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="advpad",
        description="Adversarial pre-padding for IP packets: perturb, reverse, train, evaluate.",
    )
    parser.add_argument("--jobs", type=int, default=None, help="worker thread cap")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the synthetic labeled dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--per-class", type=int, default=2000)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("preprocess", help="strip/filter/split a labeled dataset")
    _add_dataset_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=11)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("train-oracle", help="train the toy byte-sequence classifier")
    _add_dataset_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=8)
    p.add_argument("--seed", type=int, default=3)
    p.set_defaults(func=cmd_train_oracle)

    p = sub.add_parser("train", help="train the padding policy against an oracle")
    _add_dataset_args(p)
    p.add_argument("--config", help="TrainConfig file (JSON or key=value)")
    p.add_argument("--oracle", help="toy:PATH or remote:URL (default $ADVPAD_ORACLE_URL)")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--scheme", choices=["prepad", "postpad"], default=None)
    p.add_argument("--max-episodes", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("perturb", help="perturb a pcap capture")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sidecar", help="JSONL reversal records")
    p.add_argument("--scheme", choices=["prepad", "postpad", "fixedpad", "cache"],
                   default="prepad")
    p.add_argument("--budget", type=int, default=32)
    p.add_argument("--checkpoint", help="trained policy checkpoint")
    p.add_argument("--cache", help="sequence cache file")
    p.add_argument("--target-len", type=int, default=1500, help="fixedpad target")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("deperturb", help="reverse a perturbed pcap capture")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--sidecar", help="JSONL reversal records")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_deperturb)

    p = sub.add_parser("eval", help="evaluate defenses against an oracle")
    _add_dataset_args(p)
    p.add_argument("--oracle", required=True)
    p.add_argument("--checkpoint", help="prepad policy checkpoint")
    p.add_argument("--postpad-checkpoint", help="postpad policy checkpoint")
    p.add_argument("--cache", help="sequence cache file")
    p.add_argument("--schemes",
                   default="no-defense,randpostpad,fixedpad,prepad-random,prepad-policy")
    p.add_argument("--budget", type=int, default=32)
    p.add_argument("--bursts", action="store_true", help="also evaluate burst level")
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="padding/temperature/entropy/truncation sweeps")
    p.add_argument("--kind", required=True,
                   choices=["padding", "temperature", "entropy", "truncation"])
    _add_dataset_args(p)
    p.add_argument("--oracle", required=True)
    p.add_argument("--checkpoint")
    p.add_argument("--config", help="base TrainConfig for the entropy sweep")
    p.add_argument("--lengths", help="comma-separated lengths")
    p.add_argument("--taus", help="comma-separated temperatures")
    p.add_argument("--alphas", help="comma-separated entropy coefficients")
    p.add_argument("--max-episodes", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cache", help="build a sequence cache from a trained policy")
    _add_dataset_args(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--k", type=int, default=64)
    p.add_argument("--len", type=int, default=32)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_cache)

    p = sub.add_parser("latency", help="measure per-packet perturbation latency")
    _add_dataset_args(p)
    p.add_argument("--cache", required=True)
    p.add_argument("--packets", type=int, default=10_000)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_latency)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs:
        import torch

        torch.set_num_threads(max(1, args.jobs))
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail("Config", str(exc))
    except AdvPadError as exc:
        return _fail(exc.category, str(exc))
    except FileNotFoundError as exc:
        return _fail("Io", str(exc))
    except OSError as exc:
        return _fail("Io", str(exc))


if __name__ == "__main__":
    sys.exit(main())
