"""Command-line front end.

The CLI is a thin client: all computation happens behind the HTTP service
API (mounted in-process by default, or remote with --server), while all file
I/O stays here on the client side. Every subcommand is deterministic for a
fixed config; report bytes are reproducible run to run.
"""
from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from dataclasses import replace
from typing import Any, Optional

import httpx
import numpy as np

from . import __version__
from .attack import DatasetStats
from .errors import IgsymError
from .harness import (
    ATTACK_CSV_COLUMNS,
    ExperimentConfig,
    parse_dataset_csv,
    render_dataset_csv,
)
from .network import dumps_network, from_json_dict, to_json_dict
from .serialize import dumps, render_csv

BASELINE_FLAG_TO_KIND = {
    "zero": "zero",
    "max": "max_distance",
    "uniform": "uniform",
    "gaussian": "gaussian",
}


class CliError(Exception):
    pass


class ServiceClient:
    """POSTs payloads to the service, in-process unless --server is given."""

    def __init__(self, server: Optional[str]):
        self._server = server
        self._app = None
        if server is None:
            from .service import create_app

            self._app = create_app()

    def post(self, path: str, payload: dict) -> dict:
        if self._server is not None:
            try:
                resp = httpx.post(
                    self._server.rstrip("/") + path, json=payload, timeout=600.0
                )
            except httpx.HTTPError as exc:
                raise CliError(f"service unreachable: {exc}") from exc
        else:
            resp = asyncio.run(self._post_inprocess(path, payload))
        if resp.status_code != 200:
            raise CliError(f"service rejected {path}: {_error_detail(resp)}")
        return resp.json()

    async def _post_inprocess(self, path: str, payload: dict) -> httpx.Response:
        transport = httpx.ASGITransport(app=self._app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://igsym.internal", timeout=600.0
        ) as client:
            return await client.post(path, json=payload)


def _error_detail(resp: httpx.Response) -> str:
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        detail = resp.text
    return " ".join(str(detail).split())


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    doc: dict[str, Any] = {}
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except FileNotFoundError:
            raise CliError(f"config file not found: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise CliError(f"config is not valid JSON: {exc}") from None
    cfg = ExperimentConfig.from_json_dict(doc, seed_override=args.seed)
    attack = cfg.attack
    if getattr(args, "epsilon", None) is not None:
        attack = replace(attack, epsilon=args.epsilon)
    if getattr(args, "baseline", None) is not None:
        attack = replace(attack, baselines=(BASELINE_FLAG_TO_KIND[args.baseline],))
    if getattr(args, "mode", None) is not None:
        attack = replace(attack, modes=(args.mode,))
    verify = cfg.verify
    if getattr(args, "quad_steps", None) is not None:
        attack = replace(attack, quad_steps=args.quad_steps)
        verify = replace(verify, quad_steps=args.quad_steps)
    return replace(cfg, attack=attack, verify=verify)


def _out_path(args: argparse.Namespace, name: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _read_required(path: str, hint: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except FileNotFoundError:
        raise CliError(f"{hint} not found: {path}") from None


def cmd_gen_net(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    client = ServiceClient(args.server)
    resp = client.post("/network/generate", {"config": cfg.network.to_json_dict()})
    net = from_json_dict(resp["network"])
    path = _out_path(args, cfg.paths.network)
    _write_text(path, dumps_network(net))
    print(f"wrote {path} (input_dim={net.input_dim}, output_dim={net.output_dim})")
    return 0


def cmd_gen_data(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    client = ServiceClient(args.server)
    resp = client.post(
        "/dataset/generate",
        {"input_dim": cfg.network.input_dim, "config": cfg.dataset.to_json_dict()},
    )
    rows = np.asarray(resp["rows"], dtype=float)
    path = _out_path(args, cfg.paths.dataset)
    _write_text(path, render_dataset_csv(rows))
    print(f"wrote {path} ({rows.shape[0]} rows, {rows.shape[1]} features)")
    return 0


def _attack_csv_rows(trials: list[dict]) -> list[list]:
    rows = []
    for t in trials:
        r = t.get("result")
        if r is None:
            rows.append(
                [t["input_index"], t["mode"], t["baseline"], t["epsilon"],
                 None, None, None, None, None, None, False, None, t["error"]]
            )
        else:
            d = r["divergence"]
            rows.append(
                [t["input_index"], t["mode"], t["baseline"], t["epsilon"],
                 r["distance"], r["output_residual"], r["argmax_preserved"],
                 d["l2_relative"], d["cosine"], d["topk_jaccard"],
                 r["success"], r["retries_used"], t["error"]]
            )
    return rows


def _print_attack_summary(summary: dict) -> None:
    for mode, cells in summary.items():
        for baseline, entry in cells.items():
            parts = [f"{mode}/{baseline}:"]
            parts.append(f"success_rate={entry.get('success_rate', 0.0):.3f}")
            if "median_divergence" in entry:
                parts.append(f"median_divergence={entry['median_divergence']:.4f}")
            if entry.get("errors"):
                parts.append(f"errors={entry['errors']}")
            print("  " + " ".join(parts))


def cmd_attack(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    net_doc = json.loads(
        _read_required(
            os.path.join(args.out, cfg.paths.network), "network file (run gen-net)"
        )
    )
    net = from_json_dict(net_doc)
    rows = parse_dataset_csv(
        _read_required(
            os.path.join(args.out, cfg.paths.dataset), "dataset file (run gen-data)"
        )
    )
    if rows.shape[1] != net.input_dim:
        raise CliError(
            f"dataset has {rows.shape[1]} features but network expects {net.input_dim}"
        )
    stats = DatasetStats.from_box(cfg.dataset.low, cfg.dataset.high, net.input_dim)
    client = ServiceClient(args.server)
    resp = client.post(
        "/attack/run",
        {
            "network": to_json_dict(net),
            "rows": rows.tolist(),
            "stats": {"minimum": stats.minimum.tolist(), "maximum": stats.maximum.tolist()},
            "config": cfg.attack.to_json_dict(),
        },
    )
    csv_path = _out_path(args, cfg.paths.attack_csv)
    _write_text(csv_path, render_csv(ATTACK_CSV_COLUMNS, _attack_csv_rows(resp["trials"])))
    json_path = _out_path(args, cfg.paths.attack_json)
    _write_text(
        json_path,
        dumps(
            {"config": cfg.to_json_dict(), "trials": resp["trials"], "summary": resp["summary"]},
            indent=2,
        )
        + "\n",
    )
    print(f"wrote {csv_path} and {json_path}")
    _print_attack_summary(resp["summary"])
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    client = ServiceClient(args.server)
    resp = client.post("/verify/run", {"config": cfg.to_json_dict()})
    path = _out_path(args, cfg.paths.verify_json)
    _write_text(path, dumps(resp, indent=2) + "\n")
    for inv in resp["invariants"]:
        status = "PASS" if inv["passed"] else "FAIL"
        line = f"  {status} {inv['name']} max_residual={inv['max_residual']:.3e} tol={inv['tol']:.1e}"
        if inv.get("detail"):
            line += f" ({inv['detail']})"
        print(line)
    print(f"wrote {path}; all_passed={resp['all_passed']}")
    return 0


def cmd_equivariance(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    client = ServiceClient(args.server)
    resp = client.post("/equivariance/run", {"config": cfg.equivariance.to_json_dict()})
    steps = resp["steps"]
    header = ["instance", "kind"] + [f"residual_steps_{n}" for n in steps] + ["monotone"]
    rows = [
        [r["instance"], r["kind"], *r["residuals"], r["monotone"]] for r in resp["rows"]
    ]
    csv_path = _out_path(args, cfg.paths.equivariance_csv)
    _write_text(csv_path, render_csv(header, rows))
    json_path = _out_path(args, cfg.paths.equivariance_json)
    _write_text(json_path, dumps(resp, indent=2) + "\n")
    print(
        f"wrote {csv_path} and {json_path}; monotone_fraction={resp['monotone_fraction']:.3f}"
        f" max_final_residual={resp['max_final_residual']:.3e}"
    )
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    path = os.path.join(args.out, cfg.paths.attack_json)
    doc = json.loads(_read_required(path, "attack report (run attack)"))
    summary = doc.get("summary", {})
    trials = doc.get("trials", [])
    print(f"attack report: {path}")
    print(f"trials: {len(trials)}")
    _print_attack_summary(summary)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


def _add_common(sub: argparse.ArgumentParser, quad: bool = False, attack: bool = False) -> None:
    sub.add_argument("--config", metavar="PATH", default=None, help="experiment config JSON")
    sub.add_argument("--out", metavar="DIR", default=".", help="output directory")
    sub.add_argument("--seed", type=int, default=None, help="override every config seed")
    sub.add_argument("--server", metavar="URL", default=None,
                     help="remote service URL (default: in-process)")
    if quad:
        sub.add_argument("--quad-steps", type=int, default=None, dest="quad_steps",
                         help="override quadrature node count")
    if attack:
        sub.add_argument("--epsilon", type=float, default=None, help="perturbation budget")
        sub.add_argument("--baseline", choices=sorted(BASELINE_FLAG_TO_KIND), default=None,
                         help="restrict to one baseline")
        sub.add_argument("--mode", choices=["rotation", "translation"], default=None,
                         help="restrict to one attack mode")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="igsym",
        description="Symmetry attacks on integrated-gradients attributions.",
    )
    parser.add_argument("--version", action="version", version=f"igsym {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("gen-net", help="generate a seeded network file")
    _add_common(p)
    p.set_defaults(func=cmd_gen_net)

    p = subs.add_parser("gen-data", help="generate a seeded dataset CSV")
    _add_common(p)
    p.set_defaults(func=cmd_gen_data)

    p = subs.add_parser("attack", help="run attacks over the dataset and write reports")
    _add_common(p, quad=True, attack=True)
    p.set_defaults(func=cmd_attack)

    p = subs.add_parser("verify", help="run the numerical invariant suite")
    _add_common(p, quad=True)
    p.set_defaults(func=cmd_verify)

    p = subs.add_parser("equivariance", help="residuals vs quadrature resolution")
    _add_common(p)
    p.set_defaults(func=cmd_equivariance)

    p = subs.add_parser("report", help="print a summary of a written attack report")
    _add_common(p)
    p.set_defaults(func=cmd_report)

    p = subs.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, IgsymError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
