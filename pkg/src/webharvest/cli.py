"""Command line surface.

Subcommands: ``validate`` a configuration file, ``run`` one target to a
store (one-shot, same code path as scheduled runs), ``serve`` the admin
API, ``search`` a store, and ``export`` a store to the interchange
format. The environment variables HARVEST_CONFIG, HARVEST_BIND, and
HARVEST_STORE override the flags of the same meaning.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .clock import SystemClock
from .fetch import FetchPolicy, Fetcher
from .frontier import Frontier
from .runner import StopReason, harvest_target
from .store import IndexStore, StorageError
from .targets import ConfigError, parse_config

__all__ = ["main"]


def _read_config(path: str):
    with open(path, "rb") as fh:
        return parse_config(fh.read())


def _policy_from_args(args: argparse.Namespace) -> FetchPolicy:
    return FetchPolicy(
        per_host_delay=args.delay,
        timeout=args.timeout,
        max_retries=args.retries,
        user_agent=args.user_agent,
        respect_robots=not args.no_robots,
    )


def _add_policy_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--delay", type=float, default=1.0, help="per-host delay, seconds")
    parser.add_argument("--timeout", type=float, default=30.0, help="request timeout, seconds")
    parser.add_argument("--retries", type=int, default=2, help="retries on transport errors and 5xx")
    parser.add_argument("--user-agent", default="webharvest/0.1")
    parser.add_argument("--no-robots", action="store_true", help="skip robots.txt checks")


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        targets = _read_config(args.config)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 1
    print(f"ok: {len(targets)} target(s)")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        targets = _read_config(args.config)
    except (OSError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    by_id = {t.id: t for t in targets}
    target = by_id.get(args.target)
    if target is None:
        print(f"error: no target {args.target!r} in {args.config}", file=sys.stderr)
        return 1
    if not target.enabled:
        print(f"error: target {args.target!r} is disabled", file=sys.stderr)
        return 1

    store = IndexStore(args.store)
    clock = SystemClock()
    fetcher = Fetcher(policy=_policy_from_args(args), clock=clock)
    report = harvest_target(
        target,
        fetcher=fetcher,
        frontier=Frontier(),
        record_sink=lambda record: store.upsert(
            record, now=int(clock.now()), content_type=target.content_type
        ),
        clock=clock,
    )
    print(json.dumps(report.to_dict(), ensure_ascii=False, indent=2))
    return 1 if report.stopped_reason is StopReason.ABORTED else 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import Orchestrator, serve

    try:
        targets = _read_config(args.config)
    except (OSError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    ui_dir = args.ui_dir if args.ui_dir and os.path.isdir(args.ui_dir) else None
    orchestrator = Orchestrator(
        targets=targets,
        store=IndexStore(args.store),
        policy=_policy_from_args(args),
        workers=args.workers,
        config_path=args.config,
    )
    serve(orchestrator, bind=args.bind, ui_dir=ui_dir)
    return 0


def _cmd_search(args: argparse.Namespace) -> int:
    if not args.store:
        print("error: no store file (use --store or HARVEST_STORE)", file=sys.stderr)
        return 1
    try:
        store = IndexStore(args.store)
        hits = store.search(args.query, limit=args.limit)
    except StorageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(
        json.dumps(
            [
                {
                    "source_url": h.source_url,
                    "target_id": h.target_id,
                    "content_type": h.content_type,
                    "score": h.score,
                    "snippet": h.snippet,
                }
                for h in hits
            ],
            ensure_ascii=False,
            indent=2,
        )
    )
    return 0


def _cmd_export(args: argparse.Namespace) -> int:
    try:
        store = IndexStore(args.store_file)
        count = store.export(args.out)
    except StorageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"exported {count} document(s) to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="webharvest",
        description="Focused web harvesting with administrator-defined targets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a configuration file")
    p_validate.add_argument("config")
    p_validate.set_defaults(func=_cmd_validate)

    p_run = sub.add_parser("run", help="harvest one target once")
    p_run.add_argument("--target", required=True, help="target id")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--store", default=None, help="store file to write records to")
    _add_policy_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_serve = sub.add_parser("serve", help="run the admin API service")
    p_serve.add_argument("--config", required=True)
    p_serve.add_argument("--bind", default="127.0.0.1:8080")
    p_serve.add_argument("--store", default="harvest-store.jsonl")
    p_serve.add_argument("--workers", type=int, default=4)
    p_serve.add_argument("--ui-dir", default="frontend/dist")
    _add_policy_flags(p_serve)
    p_serve.set_defaults(func=_cmd_serve)

    p_search = sub.add_parser("search", help="query a store file")
    p_search.add_argument("query")
    p_search.add_argument("--store", default=None)
    p_search.add_argument("--limit", type=int, default=20)
    p_search.set_defaults(func=_cmd_search)

    p_export = sub.add_parser("export", help="export a store file")
    p_export.add_argument("store_file")
    p_export.add_argument("out")
    p_export.set_defaults(func=_cmd_export)

    return parser


def _apply_env_overrides(args: argparse.Namespace) -> None:
    config = os.environ.get("HARVEST_CONFIG")
    if config and hasattr(args, "config"):
        args.config = config
    bind = os.environ.get("HARVEST_BIND")
    if bind and hasattr(args, "bind"):
        args.bind = bind
    store = os.environ.get("HARVEST_STORE")
    if store:
        if hasattr(args, "store"):
            args.store = store
        if hasattr(args, "store_file"):
            args.store_file = store


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _apply_env_overrides(args)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
