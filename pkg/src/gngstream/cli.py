"""Command-line harness.

Verbs: ``run`` (one stream, one config), ``induce-rcd`` (append a recurrent
segment to a stream file), ``bench`` (a manifest of runs, with and without
memory) and ``gen`` (synthetic streams).

Exit status: 0 success, 1 configuration error, 2 dataset error, 3 runtime
failure.
"""
import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import _accel
from .datasets import (DATASETS, SURROGATES, SYNTHETIC_KINDS, SyntheticParams,
                       generate_synthetic, load_csv, save_csv, surrogate_stream)
from .errors import (ConfigError, GngStreamError, MissingClass, OutOfRange, ParseError)
from .memory import export_memory_csv
from .pipeline import RunConfig, run

log = logging.getLogger("gngstream")

EXIT_CONFIG, EXIT_DATASET, EXIT_RUNTIME = 1, 2, 3
BATCH_HEADER = ("batch", "prequential_percent", "retrieved", "stored", "memory_size")
SUMMARY_HEADER = ("dataset", "with_memory_error_percent", "with_memory_f1",
                  "without_memory_error_percent", "without_memory_f1", "status")


class Failure(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


# -- configs --------------------------------------------------------------------

def bundled_configs():
    """Names of the configs shipped with the package."""
    root = resources.files("gngstream") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def read_config(ref):
    """Config text and parsed :class:`RunConfig` from a path or bundled name."""
    path = Path(ref)
    if path.is_file():
        text = path.read_text()
    else:
        res = resources.files("gngstream") / "configs" / f"{str(ref).lower()}.json"
        if not res.is_file():
            raise ConfigError("config", f"{ref!r} is neither a file nor a bundled config")
        text = res.read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be an object")
    try:
        return text, RunConfig.from_dict(raw)
    except TypeError as exc:
        raise ConfigError("config", str(exc)) from None


# -- report files -----------------------------------------------------------------

def batch_rows(report):
    """Per-batch diagnostics; the running error is taken at each batch's end."""
    end = np.cumsum([len(b.predictions) for b in report.batches]) - 1
    for b, i in zip(report.batches, end):
        yield (b.batch, repr(100.0 * float(report.prequential[i])),
               "" if b.retrieved_model_index is None else b.retrieved_model_index,
               int(b.stored), b.memory_size)


def write_batches_csv(report, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BATCH_HEADER)
        w.writerows(batch_rows(report))


def read_batches_csv(path):
    rows = []
    with open(path, newline="") as fh:
        for r in csv.DictReader(fh):
            rows.append({
                "batch": int(r["batch"]),
                "prequential_percent": float(r["prequential_percent"]),
                "retrieved": int(r["retrieved"]) if r["retrieved"] else None,
                "stored": bool(int(r["stored"])),
                "memory_size": int(r["memory_size"]),
            })
    return rows


def read_report(path):
    with open(path) as fh:
        return json.load(fh)


def _load_stream(path):
    try:
        return load_csv(path, name=Path(path).stem)
    except OSError as exc:
        raise Failure(EXIT_DATASET, f"cannot read dataset {path}: {exc.strerror}") from None
    except ParseError as exc:
        raise Failure(EXIT_DATASET, f"{path}: {exc}") from None


def execute(data_path, config_ref, out_dir, memory=True, seed=None, snapshot=False):
    """Run one stream/config pair and write ``report.json`` and ``batches.csv``.

    Returns the report dict; raises :class:`Failure` with the exit status.
    """
    try:
        text, cfg = read_config(config_ref)
        if seed is not None:
            cfg = replace(cfg, seed=int(seed))
        cfg = replace(cfg, memory_enabled=cfg.memory_enabled and memory)
    except ConfigError as exc:
        raise Failure(EXIT_CONFIG, str(exc)) from None
    stream = _load_stream(data_path)

    t0 = time.perf_counter()
    try:
        report = run(stream, cfg)
    except (OutOfRange, MissingClass) as exc:
        raise Failure(EXIT_DATASET, f"{data_path}: {exc}") from None
    except (GngStreamError, ArithmeticError, ValueError) as exc:
        raise Failure(EXIT_RUNTIME, f"run failed: {exc}") from None
    elapsed = time.perf_counter() - t0

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_batches_csv(report, out / "batches.csv")
    summary = {
        "dataset": stream.name,
        "data_path": str(data_path),
        "config": text,
        "effective_config": cfg.to_dict(),
        "seed": cfg.seed,
        "memory_enabled": cfg.memory_enabled,
        "backend": _accel.backend(),
        "n_instances": len(stream),
        "n_batches": len(report.batches),
        "prequential_error": report.prequential_error,
        "prequential_error_percent": report.prequential_error_percent,
        "macro_f1": report.macro_f1,
        "memory_size": report.memory_size,
        "retrievals": [list(r) for r in report.retrievals],
        "stored_batches": [b.batch for b in report.batches if b.stored],
        "wall_seconds": elapsed,
    }
    with open(out / "report.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    if snapshot:
        export_memory_csv(report.memory, out / "memory.csv")
    return summary


# -- verbs ------------------------------------------------------------------------

def cmd_run(args):
    s = execute(args.data, args.config, args.out, memory=not args.no_memory,
                seed=args.seed, snapshot=args.memory_snapshot)
    print(f"{s['dataset']}: prequential error {s['prequential_error_percent']:.4f}%, "
          f"macro F1 {s['macro_f1']:.4f}, memory {s['memory_size']}, "
          f"{len(s['retrievals'])} retrievals, {s['wall_seconds']:.2f}s")
    return 0


def induce_rcd_file(src, dst, append, source_start):
    """Line-level :func:`~gngstream.datasets.induce_rcd`: the original bytes
    are kept and the copied rows are repeated verbatim."""
    stream = _load_stream(src)
    n = len(stream)
    if append < 0 or source_start < 0 or source_start + append > n:
        raise Failure(EXIT_DATASET, f"segment [{source_start}, {source_start + append}) "
                                    f"outside stream of {n} rows")
    raw = Path(src).read_bytes()
    lines = raw.splitlines(keepends=True)
    rows = [ln for ln in lines if ln.replace(b",", b"").strip()]
    tail = b"".join(rows[source_start:source_start + append])
    if tail and not raw.endswith((b"\n", b"\r")):
        raw += b"\n"
    if tail and not tail.endswith((b"\n", b"\r")):
        tail += b"\n"
    try:
        Path(dst).write_bytes(raw + tail)
    except OSError as exc:
        raise Failure(EXIT_DATASET, f"cannot write {dst}: {exc.strerror}") from None
    return n, n + append


def cmd_induce_rcd(args):
    before, after = induce_rcd_file(args.data_in, args.data_out, args.append, args.source_start)
    print(f"{before} -> {after} instances")
    return 0


def _bench_entry(job):
    name, data, config, out, seed = job
    row = {"dataset": name, "status": "ok"}
    try:
        for tag, mem in (("with_memory", True), ("without_memory", False)):
            s = execute(data, config, Path(out) / name / tag, memory=mem, seed=seed)
            row[f"{tag}_error_percent"] = s["prequential_error_percent"]
            row[f"{tag}_f1"] = s["macro_f1"]
    except Failure as exc:
        row["status"] = f"error (exit {exc.code}): {exc}"
    return row


def read_manifest(path):
    """Entries ``(name, dataset path, config ref)``; relative paths resolve
    against the manifest's directory."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("manifest", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("manifest", f"invalid JSON ({exc})") from None
    entries = raw.get("entries") if isinstance(raw, dict) else raw
    if not isinstance(entries, list) or not entries:
        raise ConfigError("entries", "manifest lists no runs")
    base = Path(path).parent
    out = []
    for i, e in enumerate(entries):
        if not isinstance(e, dict) or "dataset" not in e or "config" not in e:
            raise ConfigError(f"entries[{i}]", "needs 'dataset' and 'config'")
        data = base / e["dataset"]
        config = base / e["config"] if (base / e["config"]).is_file() else e["config"]
        out.append((e.get("name", Path(e["dataset"]).stem), str(data), str(config)))
    return out


def bench_summary(rows):
    """Result rows followed by ``mean`` and ``std`` over the successful ones."""
    cols = SUMMARY_HEADER[1:-1]
    ok = [r for r in rows if r["status"] == "ok"]
    table = [[r["dataset"]] + [r.get(c, "") for c in cols] + [r["status"]] for r in rows]
    if ok:
        vals = np.array([[r[c] for c in cols] for r in ok], dtype=float)
        table.append(["mean"] + vals.mean(axis=0).tolist() + [""])
        table.append(["std"] + vals.std(axis=0).tolist() + [""])
    return table


def cmd_bench(args):
    try:
        entries = read_manifest(args.manifest)
    except ConfigError as exc:
        raise Failure(EXIT_CONFIG, str(exc)) from None
    jobs = [(name, data, cfg, args.out, args.seed) for name, data, cfg in entries]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_bench_entry, jobs))
    else:
        rows = [_bench_entry(j) for j in jobs]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        w.writerows(bench_summary(rows))
    for r in rows:
        if r["status"] == "ok":
            print(f"{r['dataset']}: {r['with_memory_error_percent']:.4f}% with memory, "
                  f"{r['without_memory_error_percent']:.4f}% without")
        else:
            print(f"{r['dataset']}: {r['status']}", file=sys.stderr)
    return EXIT_RUNTIME if any(r["status"] != "ok" for r in rows) else 0


def cmd_gen(args):
    try:
        if args.surrogate:
            if args.surrogate not in DATASETS:
                raise ConfigError("surrogate", f"unknown dataset {args.surrogate!r}")
            stream = surrogate_stream(args.surrogate, args.seed)
        else:
            kw = {}
            if args.n is not None:
                kw["n_instances"] = args.n
            if args.jump_at is not None:
                kw["jump_at"] = args.jump_at
            stream = generate_synthetic(args.kind, SyntheticParams(**kw), args.seed)
    except ConfigError as exc:
        raise Failure(EXIT_CONFIG, str(exc)) from None
    except GngStreamError as exc:
        raise Failure(EXIT_CONFIG, f"params: {exc}") from None
    save_csv(stream, args.out)
    print(f"wrote {len(stream)} instances to {args.out}")
    return 0


# -- entry point ----------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="gngstream", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="verb", required=True)

    r = sub.add_parser("run", help="run the learner on one stream")
    r.add_argument("--data", required=True, help="stream CSV")
    r.add_argument("--config", required=True,
                   help="config JSON path or bundled name (e.g. 1cdt)")
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--no-memory", action="store_true", help="disable the concept memory")
    r.add_argument("--seed", type=int, default=None, help="override the config seed")
    r.add_argument("--memory-snapshot", action="store_true",
                   help="also write memory.csv with the stored models")
    r.set_defaults(func=cmd_run)

    i = sub.add_parser("induce-rcd", help="append a recurrent segment to a stream")
    i.add_argument("--in", dest="data_in", required=True)
    i.add_argument("--out", dest="data_out", required=True)
    i.add_argument("--append", type=int, required=True, help="rows to append")
    i.add_argument("--source-start", type=int, required=True,
                   help="first row (0-based) of the copied segment")
    i.set_defaults(func=cmd_induce_rcd)

    b = sub.add_parser("bench", help="run a manifest with and without memory")
    b.add_argument("--manifest", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("gen", help="write a synthetic stream")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--kind", choices=SYNTHETIC_KINDS)
    src.add_argument("--surrogate", help=f"stand-in for a benchmark file "
                                         f"({', '.join(sorted(SURROGATES))}, or their -RCD)")
    g.add_argument("--out", required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n", type=int, default=None, help="number of instances")
    g.add_argument("--jump-at", type=int, default=None,
                   help="recurrence instant for recurrent-translating")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except Failure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except Exception as exc:  # noqa: BLE001 - last-resort runtime failure
        log.debug("unhandled", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
