"""Command-line interface: gen, optimize, eval, serve.

Exit codes: 0 success (optimize: constraints satisfied), 2 usage or
validation failure, 3 optimize finished at k_max with constraints still
violated.
"""

from __future__ import annotations

import argparse
import json
import sys

from .constraints import load_constraints
from .core import LayoutError, load_layouts, save_layouts
from .metrics import evaluate_collections, load_features
from .optim import AdamOptions, CmaOptions, SolveOptions
from .service import (
    default_workspace,
    generate_layout,
    parse_labels,
    resolve_model,
    run_optimize,
    synthetic_vocabulary,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_UNSATISFIED = 3


def _dump(obj, path: str | None):
    text = json.dumps(obj, sort_keys=True, indent=1) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _labels_for(args, handle):
    if args.labels is not None:
        return parse_labels(args.labels, handle)
    layouts, _ = load_layouts(args.labels_from, max_elements=10 ** 9)
    if not layouts:
        raise LayoutError(f"{args.labels_from}: no layouts to take labels from")
    return parse_labels(list(layouts[0].labels), handle)


def cmd_gen(args) -> int:
    handle = resolve_model(args.model, args.workspace)
    labels = parse_labels(args.labels, handle)
    layouts = []
    for i in range(args.count):
        layout, _ = generate_layout(handle, labels, args.seed + i)
        layouts.append(layout)
    vocab = synthetic_vocabulary(handle.vocab_size)
    save_layouts(layouts, vocab, args.out)
    print(f"wrote {len(layouts)} layouts to {args.out}")
    if args.reference:
        references, _ = load_layouts(args.reference, max_elements=10 ** 9)
        report = evaluate_collections(layouts, references)
        _dump(report.to_dict(), None)
    return EXIT_OK


def cmd_optimize(args) -> int:
    handle = resolve_model(args.model, args.workspace)
    labels = _labels_for(args, handle)
    constraints_doc = load_constraints(args.constraints).to_dict() if args.constraints else []
    if args.inner == "cma-es":
        inner = CmaOptions(sigma0=args.sigma0, iters=args.iters)
    else:
        inner = AdamOptions(lr=args.lr, iters=args.iters)
    options = SolveOptions(
        alpha=args.alpha, mu0=args.mu0, k_max=args.k_max,
        eps_stop=args.eps_stop, seed=args.seed, inner=inner,
    )
    request = {
        "model": args.model,
        "labels": labels,
        "constraints": constraints_doc,
        "options": options.to_dict(),
    }
    report = run_optimize(handle, request)
    _dump(report.to_dict(), args.out)
    if not report.satisfied:
        print(f"unsatisfied after {len(report.history)} outer iterations "
              f"(max violation {report.max_violation:g})", file=sys.stderr)
        return EXIT_UNSATISFIED
    return EXIT_OK


def cmd_eval(args) -> int:
    if (args.real_features is None) != (args.gen_features is None):
        print("eval: --real-features and --gen-features must be given together",
              file=sys.stderr)
        return EXIT_USAGE
    generated, _ = load_layouts(args.generated, max_elements=10 ** 9)
    references, _ = load_layouts(args.reference, max_elements=10 ** 9)
    real_features = load_features(args.real_features) if args.real_features else None
    gen_features = load_features(args.gen_features) if args.gen_features else None
    report = evaluate_collections(generated, references,
                                  real_features=real_features, gen_features=gen_features)
    _dump(report.to_dict(), args.out)
    return EXIT_OK


def cmd_serve(args) -> int:
    from .server import serve

    host, _, port = args.bind.rpartition(":")
    serve(args.workspace, host=host or "127.0.0.1", port=int(port))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="layoutopt",
        description="generate graphic layouts and enforce design constraints "
                    "by optimizing generator latent codes",
    )
    parser.add_argument("--workspace", default=default_workspace(),
                        help="workspace directory (env LAYOUTOPT_WORKSPACE)")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="sample unconstrained layouts from a model")
    gen.add_argument("--model", required=True)
    gen.add_argument("--labels", required=True, help="comma-separated label ids")
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="layout file to write")
    gen.add_argument("--reference", help="layout file to score the samples against")
    gen.set_defaults(func=cmd_gen)

    opt = sub.add_parser("optimize", help="generate a layout satisfying constraints")
    opt.add_argument("--model", required=True)
    group = opt.add_mutually_exclusive_group(required=True)
    group.add_argument("--labels", help="comma-separated label ids")
    group.add_argument("--labels-from", help="layout file supplying the label multiset")
    opt.add_argument("--constraints", help="constraint file (defaults to none)")
    opt.add_argument("--seed", type=int, default=0)
    opt.add_argument("--inner", choices=["cma-es", "adam"], default="cma-es")
    opt.add_argument("--iters", type=int, default=200)
    opt.add_argument("--sigma0", type=float, default=0.25)
    opt.add_argument("--lr", type=float, default=0.01)
    opt.add_argument("--k-max", type=int, default=5)
    opt.add_argument("--alpha", type=float, default=3.0)
    opt.add_argument("--mu0", type=float, default=1.0)
    opt.add_argument("--eps-stop", type=float, default=1e-4)
    opt.add_argument("--out", help="report file to write (stdout otherwise)")
    opt.set_defaults(func=cmd_optimize)

    ev = sub.add_parser("eval", help="score generated layouts against references")
    ev.add_argument("--generated", required=True)
    ev.add_argument("--reference", required=True)
    ev.add_argument("--real-features", help="feature file for the reference side")
    ev.add_argument("--gen-features", help="feature file for the generated side")
    ev.add_argument("--out")
    ev.set_defaults(func=cmd_eval)

    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--bind", default="127.0.0.1:8321")
    srv.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LayoutError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
