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
from lstab.oracle import audit_flags, global_stability_2d, grid_oracle
from lstab.reports import flags_dict, global_dict, grid_dict, to_json
from lstab.sampling import substream

GLOBAL_SAMPLES = 500_000
FLAG_AUDIT_SAMPLES = 50


def register(subparsers) -> None:
    p = subparsers.add_parser("global-stability", help="Fraction of 2-D linear weightings that keep the ranking")
    add_data_args(p)
    p.add_argument("--samples", type=int, default=GLOBAL_SAMPLES)
    add_seed_arg(p)
    add_out_arg(p)
    p.set_defaults(handler=global_stability)

    p = subparsers.add_parser("oracle", help="Exact-on-grid local stability (n <= 3)")
    add_data_args(p)
    add_func_arg(p)
    p.add_argument("--tuple", required=True, dest="tuple_id")
    p.add_argument("--k", type=int, required=True)
    add_rc_arg(p)
    p.add_argument("--grid", type=int, default=201, help="Grid points per attribute")
    add_out_arg(p)
    p.set_defaults(handler=oracle)

    p = subparsers.add_parser("audit-flags", help="Check a ranker's declared flags on random refinements")
    add_data_args(p)
    add_func_arg(p)
    add_rc_arg(p)
    p.add_argument("--samples", type=int, default=FLAG_AUDIT_SAMPLES)
    add_seed_arg(p)
    add_out_arg(p)
    p.set_defaults(handler=flags)


def global_stability(args) -> int:
    d, _ = load_data(args)
    value = global_stability_2d(d, args.samples, substream(args.seed, "global"))
    emit(to_json(global_dict(value, args.samples, args.seed)), args.out)
    return 0


def oracle(args) -> int:
    d, _ = load_data(args)
    spec = load_func(args, d)
    rc = parse_rc(args.rc, d)
    result = grid_oracle(spec, d, args.tuple_id, args.k, rc, args.grid)
    emit(to_json(grid_dict(result, args.tuple_id, args.k, rc, args.grid)), args.out)
    return 0


def flags(args) -> int:
    d, _ = load_data(args)
    spec = load_func(args, d)
    rc = parse_rc(args.rc, d)
    audit = audit_flags(spec, d, args.samples, substream(args.seed, "flags"), rc=rc)
    emit(to_json(flags_dict(audit, spec, rc, args.seed)), args.out)
    return 0
