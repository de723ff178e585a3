"""Command-line client for the benchmark service.

Every subcommand builds a request against the HTTP API.  Without ``--server``
the request runs in-process against the bundled ASGI app, so no daemon is
needed; with ``--server URL`` the same request targets a running instance.
``serve`` starts that instance.

Exit codes: 0 success, 1 config error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

import httpx

from .errors import EXIT_CONFIG, EXIT_DATA, EXIT_NUMERICAL, EXIT_OK

_ERROR_EXIT = {"config": EXIT_CONFIG, "data": EXIT_DATA,
               "numerical": EXIT_NUMERICAL}


def _request(server: str | None, endpoint: str, payload: dict) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            return client.post(endpoint, json=payload)

    from .service.app import app  # deferred: keeps --help fast

    async def go() -> httpx.Response:
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, timeout=None,
                                     base_url="http://sblorec") as client:
            return await client.post(endpoint, json=payload)

    return asyncio.run(go())


def _post(args, endpoint: str, payload: dict) -> dict:
    response = _request(args.server, endpoint, payload)
    body = response.json()
    if response.status_code != 200:
        error = body.get("error", {})
        message = error.get("message", response.text)
        kind = error.get("kind", "data")
        print(f"error ({kind}): {message}", file=sys.stderr)
        raise SystemExit(_ERROR_EXIT.get(kind, EXIT_DATA))
    return body


def _print(args, body: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(body, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


def cmd_ingest(args) -> int:
    body = _post(args, "/ingest", {"config_path": args.config})
    s = body["stats"]
    _print(args, body, [
        f"dataset {body['dataset']}: m={s['m']} n={s['n']}",
        f"social edges: {s['n_social_edges']} (mean degree {s['mean_social_degree']:.2f}, "
        f"sparsity {s['sparsity_social']:.2e})",
        f"interactions: {s['n_interactions']} (mean degree {s['mean_interaction_degree']:.2f}, "
        f"sparsity {s['sparsity_interactions']:.2e})",
        "class fractions: " + ", ".join(
            f"{k}={v:.4f}" for k, v in sorted(body["class_fractions"].items())),
    ])
    return EXIT_OK


def cmd_split(args) -> int:
    payload = {"config_path": args.config, "cold_start": args.cold_start}
    if args.seed is not None:
        payload["seed"] = args.seed
    body = _post(args, "/split", payload)
    _print(args, body, [
        f"{body['kind']} split (seed {body['seed']}): "
        f"{body['n_train']} train / {body['n_probe']} probe edges, "
        f"{body['n_users_empty_train']} users with empty train profile",
        *(f"  {k}: {v}" for k, v in body["files"].items()),
    ])
    return EXIT_OK


def cmd_fit(args) -> int:
    payload = {"config_path": args.config, "algo": args.algo,
               "dump": not args.no_dump}
    if args.seed is not None:
        payload["seed"] = args.seed
    body = _post(args, "/fit", payload)
    lines = [f"fitted {body['algo']} (seed {body['seed']}) "
             f"in {body['seconds']:.3f}s, params {body['params']}"]
    if body.get("residual") is not None:
        lines.append(f"  solve residual: {body['residual']:.3e}")
    lines.extend(f"  {k}: {v}" for k, v in body["files"].items())
    _print(args, body, lines)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    payload = {"config_path": args.config}
    if args.algo:
        payload["algo"] = args.algo
    if args.seed is not None:
        payload["seed"] = args.seed
    if args.L is not None:
        payload["list_length"] = args.L
    body = _post(args, "/evaluate", payload)
    lines = [f"run {body['config_hash']}: {len(body['rows'])} result cells"]
    for row in body["rows"]:
        if row["status"] != "ok":
            lines.append(f"  {row['algorithm']:>8s} {row['user_class']:<11s} "
                         f"L={row['length']} seed={row['seed']}: {row['status']}")
            continue
        lines.append(
            f"  {row['algorithm']:>8s} {row['user_class']:<11s} "
            f"L={row['length']} seed={row['seed']}: "
            f"AUPR={row['aupr']:.4f} Pre={row['precision']:.4f} "
            f"Rec={row['recall']:.4f} F={row['f_score']:.4f}"
        )
    lines.extend(f"  {k}: {v}" for k, v in body["files"].items())
    _print(args, body, lines)
    return EXIT_OK


def cmd_grid(args) -> int:
    payload = {"config_path": args.config, "algo": args.algo,
               "user_class": args.user_class}
    if args.L is not None:
        payload["list_length"] = args.L
    body = _post(args, "/grid", payload)
    _print(args, body, [
        f"grid search {body['algo']} on class {body['user_class']}: "
        f"{body['n_points']} points",
        f"best params: {body['best_params']}",
        f"table: {body['table_file']}",
    ])
    return EXIT_OK


def cmd_rewire_curve(args) -> int:
    payload = {"config_path": args.config, "user_class": args.user_class}
    if args.sigma is not None:
        payload["sigma"] = args.sigma
    if args.seed is not None:
        payload["seed"] = args.seed
    if args.L is not None:
        payload["list_length"] = args.L
    body = _post(args, "/rewire-curve", payload)
    lines = [f"reference (social-free) AUPR: {body['blo_aupr']:.6f}"]
    for point in body["points"]:
        lines.append(f"  sigma={point['sigma']:.2f}: "
                     f"AUPR={point['aupr_mean']:.6f} (+/-{point['aupr_std']:.6f}), "
                     f"improvement {point['improvement_over_blo']:+.6f}")
    lines.append(f"curve: {body['curve_file']}")
    _print(args, body, lines)
    return EXIT_OK


def cmd_analyze(args) -> int:
    payload = {"config_path": args.config}
    if args.seed is not None:
        payload["seed"] = args.seed
    body = _post(args, "/analyze", payload)
    _print(args, body, [
        f"conversion rates on {body['n_rates']} directed social edges "
        f"({body['n_undefined']} undefined)",
        f"  share h = 0: {body['zero_share']:.4f}",
        f"  share h > 0.2: {body['share_above_02']:.4f}",
        *(f"  {k}: {v}" for k, v in body["files"].items()),
    ])
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("sblorec.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sblorec",
        description="Social/behavioral recommendation benchmark harness",
    )
    parser.add_argument("--server", default=None,
                        help="base URL of a running service (default: in-process)")
    parser.add_argument("--json", action="store_true",
                        help="print raw JSON responses")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="experiment config (TOML)")
        p.set_defaults(func=func)
        return p

    add("ingest", cmd_ingest, "validate the dataset and print its statistics")

    p = add("split", cmd_split, "build and export a train/probe split")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--cold-start", action="store_true",
                   help="build the deterministic cold-start split")

    p = add("fit", cmd_fit, "fit one algorithm and dump its matrices")
    p.add_argument("--algo", default="sblo")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-dump", action="store_true")

    p = add("evaluate", cmd_evaluate, "run the benchmark described by the config")
    p.add_argument("--algo", default=None, help="restrict to one algorithm")
    p.add_argument("--seed", type=int, default=None, help="single-seed override")
    p.add_argument("--L", type=int, default=None, help="list-length override")

    p = add("grid", cmd_grid, "grid-search one algorithm's parameters")
    p.add_argument("--algo", required=True)
    p.add_argument("--user-class", default="all")
    p.add_argument("--L", type=int, default=None)

    p = add("rewire-curve", cmd_rewire_curve,
            "accuracy vs social rewiring fraction")
    p.add_argument("--sigma", type=float, default=None,
                   help="single rewiring fraction instead of the config grid")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--user-class", default="all")
    p.add_argument("--L", type=int, default=None)

    p = add("analyze", cmd_analyze,
            "conversion rates and common-object statistics")
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    except httpx.HTTPError as exc:
        print(f"error (connection): {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
