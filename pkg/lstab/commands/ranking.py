from lstab.commands.common import add_data_args, add_func_arg, add_out_arg, emit, load_data, load_func
from lstab.ranking import rank_dataset
from lstab.reports import ranking_csv


def register(subparsers) -> None:
    p = subparsers.add_parser("rank", help="Rank a dataset and print the ranking table as CSV")
    add_data_args(p)
    add_func_arg(p)
    add_out_arg(p)
    p.set_defaults(handler=rank)


def rank(args) -> int:
    d, frame = load_data(args)
    spec = load_func(args, d)
    emit(ranking_csv(rank_dataset(spec, d), d, frame, args.id_column), args.out)
    return 0
