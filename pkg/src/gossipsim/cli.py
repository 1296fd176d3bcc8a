"""Command-line client for the simulation service.

By default requests are served in-process (the service app is mounted on an
ASGI transport, no network involved); pass --server to talk to a remote
instance instead. Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import httpx

from . import __version__
from .trajectory import write_atomic

_USAGE_ERROR = 2
_RUNTIME_ERROR = 1


def _parse_value(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


def _parse_params(items) -> dict:
    params = {}
    for item in items or []:
        if "=" not in item:
            raise SystemExit(f"error: --param expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        params[key] = _parse_value(value)
    return params


def _load_config(path) -> dict:
    """key=value per line; '#' starts a comment; values are typed like params."""
    config = {}
    with open(path) as f:
        for raw in f:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line is not key=value: {raw.strip()!r}")
            key, _, value = line.partition("=")
            config[key.strip().replace("-", "_")] = _parse_value(value.strip())
    return config


def _graph_spec(args) -> dict:
    if getattr(args, "graph_file", None):
        with open(args.graph_file) as f:
            return {"family": "file", "edge_list": f.read()}
    if not args.family:
        raise SystemExit("error: provide --family or --graph-file")
    return {"family": args.family, "params": _parse_params(args.param),
            "seed": args.seed if args.seed is not None else 0}


def _add_graph_args(p, require_family: bool = False):
    p.add_argument("--family", required=require_family,
                   help="graph family: complete | er | config | ba | torus | file")
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="family parameter (repeatable), e.g. n=1000 p=0.05")
    if not require_family:
        p.add_argument("--graph-file", help="read the graph from an edge-list file")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gossipsim",
        description="Gossip-diffusion simulation and analysis toolkit.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--server", help="base URL of a running service; "
                        "default runs the service in-process")
    parser.add_argument("--config", help="key=value config file; command-line "
                        "flags override config values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="generate a graph and save its edge list")
    _add_graph_args(p, require_family=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="edge-list output path")

    p = sub.add_parser("metrics", help="spectral radius, bottleneck ratio, degrees")
    _add_graph_args(p)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("meanfield", help="complete-graph regime classification")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--phi", default="linear")

    p = sub.add_parser("thresholds", help="rigorous thresholds for a general graph")
    _add_graph_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--phi", default="linear")

    p = sub.add_parser("simulate", help="run one trajectory and save t,Z,xi CSV")
    _add_graph_args(p)
    p.add_argument("--phi", default="linear")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--z0", type=float, required=True)
    p.add_argument("-T", "--horizon", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--sample-stride", type=int)
    p.add_argument("-o", "--output", help="trajectory CSV path (default stdout)")

    p = sub.add_parser("sweep", help="survival-probability sweep over beta or z0")
    _add_graph_args(p, require_family=True)
    p.add_argument("--phi", default="linear")
    p.add_argument("--axis", choices=("beta", "z0"), required=True)
    p.add_argument("--grid", required=True,
                   help="comma-separated strictly increasing values")
    p.add_argument("--beta", type=float, help="fixed beta when sweeping z0")
    p.add_argument("--z0", type=float, help="fixed z0 when sweeping beta")
    p.add_argument("--replicas", type=int, default=500)
    p.add_argument("-T", "--horizon", type=float, default=100.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--threads", type=int)
    p.add_argument("--fixed-graph", action="store_true",
                   help="reuse one graph instance for every replica")
    p.add_argument("-o", "--output", required=True, help="sweep CSV path")
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv) -> argparse.Namespace:
    """Parse argv with config-file values spliced in as extra flags.

    Explicit flags win over config values; config values win over defaults.
    Unknown config keys fail parsing like unknown flags would.
    """
    argv = list(argv)
    config_path = None
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            config_path = argv[i + 1]
            break
        if arg.startswith("--config="):
            config_path = arg.split("=", 1)[1]
            break
    if config_path is None:
        return parser.parse_args(argv)
    config = _load_config(config_path)
    global_dests = {a.dest for a in parser._actions}
    extra = []
    for key, value in config.items():
        flag = "--" + key.replace("_", "-")
        if any(a == flag or a.startswith(flag + "=") for a in argv):
            continue  # explicit flag wins
        if key in global_dests:
            argv = [flag, str(value)] + argv
        else:
            extra += [flag, str(value)]
    return parser.parse_args(argv + extra)


def _client(args):
    if args.server:
        return httpx.Client(base_url=args.server, timeout=3600.0)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app
    return TestClient(app)


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    resp = client.post(path, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        print(f"error: {detail}", file=sys.stderr)
        raise SystemExit(_RUNTIME_ERROR)
    return resp.json()


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else _USAGE_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR

    try:
        with _client(args) as client:
            return _dispatch(args, client)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else _RUNTIME_ERROR
    except httpx.HTTPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _RUNTIME_ERROR


def _dispatch(args, client) -> int:
    if args.command == "gen-graph":
        body = _post(client, "/graph/generate", {"graph": _graph_spec(args)})
        write_atomic(args.output, body["edge_list"])
        print(json.dumps(body["metrics"], indent=2))
        return 0

    if args.command == "metrics":
        body = _post(client, "/graph/metrics", {"graph": _graph_spec(args)})
        print(json.dumps(body, indent=2))
        return 0

    if args.command == "meanfield":
        body = _post(client, "/meanfield", {"beta": args.beta, "phi": args.phi})
        print(json.dumps(body, indent=2))
        return 0

    if args.command == "thresholds":
        body = _post(client, "/thresholds", {"graph": _graph_spec(args),
                                             "beta": args.beta, "phi": args.phi})
        metrics = body.pop("metrics")
        for key, value in {**body, **{f"metrics.{k}": v
                                      for k, v in metrics.items()}}.items():
            print(f"{key}={value}")
        return 0

    if args.command == "simulate":
        payload = {"graph": _graph_spec(args), "phi": args.phi,
                   "beta": args.beta, "z0": args.z0, "T": args.horizon,
                   "seed": args.seed, "sample_stride": args.sample_stride}
        body = _post(client, "/simulate", payload)
        if args.output:
            write_atomic(args.output, body["csv"])
            summary = {k: body[k] for k in
                       ("absorbed_at", "event_count", "final_z", "final_xi")}
            meta = {"request": {k: v for k, v in payload.items() if k != "graph"},
                    "graph": {k: v for k, v in payload["graph"].items()
                              if k != "edge_list"}, **summary}
            write_atomic(args.output + ".meta.json",
                         json.dumps(meta, indent=2) + "\n")
            print(json.dumps(summary, indent=2))
        else:
            sys.stdout.write(body["csv"])
        return 0

    if args.command == "sweep":
        if args.axis == "beta" and args.z0 is None:
            print("error: sweeping beta requires --z0", file=sys.stderr)
            return _USAGE_ERROR
        if args.axis == "z0" and args.beta is None:
            print("error: sweeping z0 requires --beta", file=sys.stderr)
            return _USAGE_ERROR
        try:
            grid = [float(v) for v in args.grid.split(",") if v.strip()]
        except ValueError:
            print(f"error: bad --grid value {args.grid!r}", file=sys.stderr)
            return _USAGE_ERROR
        payload = {"graph": _graph_spec(args), "phi": args.phi,
                   "axis": args.axis, "grid": grid, "beta": args.beta,
                   "z0": args.z0, "replicas": args.replicas,
                   "T": args.horizon, "seed": args.seed,
                   "threads": args.threads,
                   "regenerate_graph_per_replica": not args.fixed_graph}
        body = _post(client, "/sweep", payload)
        write_atomic(args.output, body["csv"])
        write_atomic(args.output + ".meta.json",
                     json.dumps(body["metadata"], indent=2) + "\n")
        print(f"wrote {args.output}")
        return 0

    raise SystemExit(_USAGE_ERROR)


if __name__ == "__main__":
    sys.exit(main())
