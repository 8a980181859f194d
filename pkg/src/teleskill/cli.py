"""Command-line client for the pipeline service.

Every subcommand except `serve` is a thin HTTP client: it posts to a
running server given with --server, or to an in-process instance of the
service app when no server is given (no daemon needed for batch use).

Exit codes: 0 ran to completion, 2 input/validation error,
3 demonstrator failure, 4 fit failure.
"""
from __future__ import annotations

import argparse
import asyncio
import json
import sys

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEMONSTRATOR = 3
EXIT_FIT = 4

_KIND_TO_EXIT = {"input": EXIT_INPUT, "demonstrator": EXIT_DEMONSTRATOR, "fit": EXIT_FIT}


def _post(server: str | None, path: str, payload: dict) -> tuple[int, dict]:
    import httpx

    if server:
        try:
            with httpx.Client(base_url=server, timeout=600.0) as client:
                resp = client.post(path, json=payload)
        except httpx.HTTPError as exc:
            return -1, {"detail": {"kind": "input", "message": f"server unreachable: {exc}"}}
        return resp.status_code, resp.json()

    from .service.app import create_app

    async def go():
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(transport=transport,
                                     base_url="http://teleskill.local",
                                     timeout=600.0) as client:
            return await client.post(path, json=payload)

    resp = asyncio.run(go())
    return resp.status_code, resp.json()


def _finish(status: int, body: dict) -> int:
    if status == 200:
        print(json.dumps(body, indent=2))
        return EXIT_OK
    detail = body.get("detail", {})
    if isinstance(detail, dict) and "message" in detail:
        print(f"error: {detail['message']}", file=sys.stderr)
        return _KIND_TO_EXIT.get(detail.get("kind"), EXIT_INPUT)
    print(f"error: {detail}", file=sys.stderr)
    return EXIT_INPUT


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teleskill",
        description="Record, learn, and reproduce compliant insertion skills.",
    )
    parser.add_argument("--server", default=None,
                        help="base URL of a running teleskill service "
                             "(default: run the pipeline in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demo-gen", help="run the scripted demonstrator and save an archive")
    p.add_argument("scene", help="scene config JSON")
    p.add_argument("out", help="output archive path (directory or .zip)")

    p = sub.add_parser("fit", help="fit trajectory and wrench models from an archive")
    p.add_argument("archive", help="demonstration archive path")
    p.add_argument("out", help="output skill document path")
    p.add_argument("--n-basis", type=int, default=30, help="forcing-term basis count")
    p.add_argument("--k", type=int, default=5,
                   help="mixture components (sweep upper bound with --bic)")
    p.add_argument("--bic", action="store_true",
                   help="choose the component count by BIC over 1..K")

    p = sub.add_parser("reproduce", help="run one episode from an offset start pose")
    p.add_argument("skill", help="skill document path")
    p.add_argument("scene", help="scene config JSON")
    p.add_argument("out", help="output episode result path")
    p.add_argument("--dx", type=float, default=0.0, help="start x offset [m]")
    p.add_argument("--dy", type=float, default=0.0, help="start y offset [m]")
    p.add_argument("--dyaw", type=float, default=0.0, help="start yaw offset [rad]")
    p.add_argument("--tau-scale", type=float, default=1.5,
                   help="execution duration as a multiple of the demo duration")

    p = sub.add_parser("evaluate", help="run an initial-condition sweep and report")
    p.add_argument("skill", help="skill document path")
    p.add_argument("scene", help="scene config JSON")
    p.add_argument("conditions", help="conditions JSON")
    p.add_argument("out", help="output report path")
    p.add_argument("--tau-scale", type=float, default=1.5)

    p = sub.add_parser("export-profiles",
                       help="export demo/reference/measured wrench profiles as CSV")
    p.add_argument("skill", help="skill document path")
    p.add_argument("result", help="episode result path")
    p.add_argument("out", help="output CSV path")

    p = sub.add_parser("serve", help="run the service (REST + websocket teleoperation)")
    p.add_argument("scene", nargs="?", default=None, help="scene config JSON (optional)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8800)
    p.add_argument("--recordings-dir", default="recordings",
                   help="where teleoperation archives are saved")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service.app import create_app

        try:
            app = create_app(scene_path=args.scene, recordings_dir=args.recordings_dir)
        except Exception as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        uvicorn.run(app, host=args.host, port=args.port, log_level="info")
        return EXIT_OK

    if args.command == "demo-gen":
        status, body = _post(args.server, "/pipeline/demo-gen",
                             {"scene_path": args.scene, "out_path": args.out})
    elif args.command == "fit":
        status, body = _post(args.server, "/pipeline/fit",
                             {"archive_path": args.archive, "out_path": args.out,
                              "n_basis": args.n_basis, "k": args.k, "bic": args.bic})
    elif args.command == "reproduce":
        status, body = _post(args.server, "/pipeline/reproduce",
                             {"skill_path": args.skill, "scene_path": args.scene,
                              "out_path": args.out, "dx": args.dx, "dy": args.dy,
                              "dyaw": args.dyaw, "tau_scale": args.tau_scale})
    elif args.command == "evaluate":
        status, body = _post(args.server, "/pipeline/evaluate",
                             {"skill_path": args.skill, "scene_path": args.scene,
                              "conditions_path": args.conditions, "out_path": args.out,
                              "tau_scale": args.tau_scale})
    elif args.command == "export-profiles":
        status, body = _post(args.server, "/pipeline/export-profiles",
                             {"skill_path": args.skill, "result_path": args.result,
                              "out_path": args.out})
    else:  # unreachable: argparse enforces the choices
        return EXIT_INPUT

    return _finish(status, body)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
