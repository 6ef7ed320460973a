from lstab import config as settings
from lstab.commands.common import (
    add_data_args,
    add_func_arg,
    add_out_arg,
    add_rc_arg,
    add_seed_arg,
    emit,
    load_data,
    load_func,
    parse_rc,
)
from lstab.dense import detect_dense_region
from lstab.reports import dense_dict, to_json
from lstab.sampling import substream


def register(subparsers) -> None:
    p = subparsers.add_parser("dense-region", help="Recommend k from the dense region around a tuple")
    add_data_args(p)
    add_func_arg(p)
    p.add_argument("--tuple", required=True, dest="tuple_id")
    add_rc_arg(p)
    p.add_argument("--samples", type=int, default=settings.DENSE_REGION_SAMPLES)
    p.add_argument("--workers", type=int, default=settings.WORKERS)
    add_seed_arg(p)
    add_out_arg(p)
    p.set_defaults(handler=dense_region)


def dense_region(args) -> int:
    d, _ = load_data(args)
    spec = load_func(args, d)
    rc = parse_rc(args.rc, d)
    report = detect_dense_region(
        spec, d, args.tuple_id, rc, args.samples, substream(args.seed, "curve"), workers=args.workers
    )
    emit(to_json(dense_dict(report, args.seed, args.tuple_id)), args.out)
    return 0
