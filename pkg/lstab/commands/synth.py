from lstab import config as settings
from lstab.commands.common import emit
from lstab.errors import ConfigError
from lstab.reports import to_json
from lstab.synthetic import generate_dense_dataset, write_benchmark


def _size_range(text: str):
    try:
        lo, hi = (int(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"--sizes expects LOW,HIGH, got {text!r}") from None
    return lo, hi


def register(subparsers) -> None:
    p = subparsers.add_parser("synth", help="Generate a dense-region benchmark with ground truth")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--dims", type=int, default=2)
    p.add_argument("--margin", type=float, default=10.0)
    p.add_argument("--sizes", type=_size_range, default=(2, 6), help="Region size range LOW,HIGH")
    p.add_argument("--noise", type=float, default=None, help="Gaussian sigma (default margin/50)")
    p.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    p.add_argument("--out", required=True, help="Dataset CSV path; ground truth goes next to it")
    p.set_defaults(handler=synth)


def synth(args) -> int:
    bench = generate_dense_dataset(args.n, args.dims, args.margin, args.sizes, args.noise, args.seed)
    csv_path, truth_path = write_benchmark(bench, args.out)
    emit(to_json({
        "data": str(csv_path),
        "ground_truth": str(truth_path),
        "tuples": len(bench.dataset),
        "regions": len(bench.region_scores),
        "rc": list(bench.rc.eps_max),
        "noise_sigma": bench.noise_sigma,
        "seed": bench.seed,
    }))
    return 0
