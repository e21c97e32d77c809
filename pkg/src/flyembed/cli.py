"""Command-line entry point: ``flyembed run|verify|formats``.

Any spec key can be overridden with ``--dotted.key=value``; the value is
read as JSON when it parses, otherwise as a plain string::

    flyembed run grid.json --out results.csv --eval.K=50 --k=[16,32]
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import ingest
from .errors import FlyEmbedError, InvalidSpec, SchemaViolation
from .experiment import CSV_COLUMNS, WORKERS_ENV, ExperimentSpec, default_spec_dict, run_experiment, verify_report

EXIT_OK, EXIT_FAILURE, EXIT_RUN_ERRORS = 0, 1, 2

FORMATS_TEXT = """\
DATASET FILES
{ingest}
PROJECTION MATRIX SNAPSHOT (SPBM)
    "SPBM" magic, u16 version (=1), u64 D, u64 d, u64 nnz, then D+1
    little-endian u64 row offsets and nnz little-endian u32 column indices
    (sorted within each row).

EXPERIMENT SPEC (JSON object)
    sources      list of {{format, path, subset_size, subset_rule, seed, name}}
                 (format: fvecs | idx_images | glove_text | csv_dense;
                 subset_rule: first_n | seeded_sample; relative paths are
                 resolved against the spec file's directory)
    preprocess   list of none | original | mean_center | l2_normalize | center_normalize
    r            target mean for the original preprocessing (default 100)
    projection   {{distribution: [binomial | hypergeo_rows | hypergeo_cols],
                  density: [p, ...], D_rule: {{"multiple_of_k": 20}} | {{"fixed": D}}}}
    sparsifiers  list of kind names or {{kind, matching_bits}}; kinds:
                 kwta_real | kwta_binary | kwta_real_l2 | block_binary | identity
    k            list of active counts
    scenarios    list of euc_euc | ang_ang
    eval         {{K, num_queries, num_realizations, query_seed}}
    sequential   null or {{k, block_size, prefixes}}: prefix-of-blocks evaluation
    master_seed  integer

Example:
{example}

CSV REPORT
    columns: {columns}
    One row per (run, realization) followed by an aggregate row whose
    realization is "mean". Sparsifier labels: <kind>, block_binary+matching_bits,
    and in sequential mode <kind>/seq (first k blocks of the full embedding)
    and <kind>/direct (built directly on the first k blocks); k and D then
    give the number of blocks processed and the prefix dimension.
    wall_ms is timing metadata and is excluded from determinism checks.

ENVIRONMENT
    {workers}  worker threads for projection groups (default 1)

EXIT CODES
    0 all runs ok, 2 some runs recorded errors (CSV still written), 1 spec or IO failure
"""


def _parse_overrides(extra: list[str]) -> dict:
    out = {}
    for item in extra:
        if not item.startswith("--") or "=" not in item:
            raise InvalidSpec(f"unrecognized argument {item!r}; overrides look like --key=value")
        key, raw = item[2:].split("=", 1)
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flyembed", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="execute an experiment grid")
    run.add_argument("spec", help="JSON experiment spec")
    run.add_argument("--out", default="results.csv", help="CSV output path")
    verify = sub.add_parser("verify", help="validate a CSV report")
    verify.add_argument("csv")
    sub.add_parser("formats", help="print file format documentation")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "formats":
        if extra:
            parser.error(f"unexpected arguments: {extra}")
        print(FORMATS_TEXT.format(ingest=ingest.__doc__.split("Formats\n-------\n", 1)[1],
                                  example=json.dumps(default_spec_dict(), indent=2),
                                  columns=", ".join(CSV_COLUMNS), workers=WORKERS_ENV))
        return EXIT_OK

    if args.command == "verify":
        if extra:
            parser.error(f"unexpected arguments: {extra}")
        try:
            summary = verify_report(args.csv)
        except SchemaViolation as exc:
            print(f"INVALID: {exc}", file=sys.stderr)
            return EXIT_FAILURE
        print(f"OK: {summary.rows} rows, {summary.runs} runs, {summary.error_rows} rows with errors")
        return EXIT_OK

    try:
        spec = ExperimentSpec.from_file(args.spec, _parse_overrides(extra))
        summary = run_experiment(spec, args.out)
    except (FlyEmbedError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    print(f"wrote {summary.rows} rows for {summary.runs} runs to {summary.path}"
          + (f" ({summary.failed_rows} failed realizations)" if summary.failed_rows else ""))
    return summary.exit_code


if __name__ == "__main__":
    sys.exit(main())
