import logging

from lstab.commands.common import (
    add_data_args,
    add_engine_args,
    add_func_arg,
    add_out_arg,
    add_rc_arg,
    add_seed_arg,
    emit,
    engine_config,
    load_data,
    load_func,
    parse_rc,
)
from lstab.engine import lstability
from lstab.errors import ConfigError
from lstab.reports import stability_dict, sweep_csv, sweep_jsonl, to_json

logger = logging.getLogger(__name__)


def _common(p) -> None:
    add_data_args(p)
    add_func_arg(p)
    p.add_argument("--tuple", required=True, dest="tuple_id")
    add_rc_arg(p)
    add_seed_arg(p)
    add_engine_args(p)
    add_out_arg(p)


def register(subparsers) -> None:
    p = subparsers.add_parser("stability", help="Estimate the local stability of one tuple")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(handler=stability)

    p = subparsers.add_parser("sweep-k", help="Stability reports for k = 0..K")
    _common(p)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.set_defaults(handler=sweep_k)


def stability(args) -> int:
    d, _ = load_data(args)
    spec = load_func(args, d)
    config = engine_config(args, args.k, parse_rc(args.rc, d))
    report = lstability(spec, d, args.tuple_id, config)
    emit(to_json(stability_dict(report)), args.out)
    return 0


def sweep_k(args) -> int:
    if args.k_max < 0:
        raise ConfigError("--k-max must be non-negative")
    d, _ = load_data(args)
    spec = load_func(args, d)
    rc = parse_rc(args.rc, d)
    reports = []
    for k in range(args.k_max + 1):
        reports.append(lstability(spec, d, args.tuple_id, engine_config(args, k, rc)))
        logger.info("k=%d estimate %.4f", k, reports[-1].estimate)
    emit(sweep_csv(reports) if args.format == "csv" else sweep_jsonl(reports), args.out)
    return 0
