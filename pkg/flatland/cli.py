"""
flatland 命令行：build、trace、iet、cutstack、htv、rosen、entropy、windtree、serve

成功退出 0，计算错误（定义域、截断、预算）退出 1，用法错误退出 2。
每个输出文件都带来源头：JSON 为 provenance 键，SVG/DOT 为注释，CSV 为 # 开头的行。
"""

import argparse
import csv
import json
import logging
import sys
from typing import Any, Dict, Iterable, List, Optional, Sequence

from flatland import __version__
from flatland.core.codec import iet_to_json, surface_to_json
from flatland.core.config import Budget, RunConfig, tolerance
from flatland.core.cutstack import steps_from_json
from flatland.core.enums import CommandEnum, ScalarMode
from flatland.core.errors import FlatlandError, PartialResult, UsageError
from flatland.core.scalar import Scalar, mode_of, parse_scalar
from flatland.core.svg_export import surface_to_svg
from flatland.services.cutstack_service import CutStackService, named_steps
from flatland.services.htv_service import HTVService, harmonic_for
from flatland.services.iet_service import IETService
from flatland.services.rosen_service import RosenService
from flatland.services.surface_service import SurfaceService, build_surface, resolve_surface
from flatland.services.windtree_service import CSV_COLUMNS, WindtreeService

logger = logging.getLogger("flatland.cli")

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


# ============================================================
# 解析辅助
# ============================================================


def _scalar(text: str) -> Scalar:
    try:
        return parse_scalar(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _pair(text: str):
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated scalars, got {text!r}")
    return _scalar(parts[0]), _scalar(parts[1])


def _key_value(text: str):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return key, value


def _index(text: str):
    """多边形下标：整数或 JSON（列表按元组处理）"""
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        return text

    def tup(v):
        return tuple(tup(x) for x in v) if isinstance(v, list) else v

    return tup(value)


def _infer_mode(values: Iterable[Any]) -> Optional[ScalarMode]:
    modes = set()
    for v in values:
        try:
            modes.add(mode_of(v))
        except (TypeError, ValueError):
            continue
    for m in (ScalarMode.FLOAT, ScalarMode.QUAD, ScalarMode.RATIONAL):
        if m in modes:
            return m
    return None


def _read_json(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


# ============================================================
# 输出
# ============================================================


def _header(config: RunConfig) -> str:
    return "flatland " + json.dumps(config.provenance(), ensure_ascii=False, sort_keys=True)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info("写出 %s", path)


def _dump(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"


def _with_provenance(config: RunConfig, data: Dict[str, Any]) -> Dict[str, Any]:
    return {"provenance": config.provenance(), **data}


def _emit(config: RunConfig, data: Dict[str, Any], out: Optional[str] = None) -> None:
    text = _dump(_with_provenance(config, data))
    if out:
        _write(out, text)
    else:
        sys.stdout.write(text)


def _write_csv(config: RunConfig, path: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        for key, value in config.provenance().items():
            f.write(f"# {key}: {json.dumps(value, ensure_ascii=False, sort_keys=True)}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
    logger.info("写出 %s", path)


# ============================================================
# 子命令
# ============================================================


def _family_params(args) -> Dict[str, Any]:
    params = dict(args.param or [])
    for key in ("lambda", "alpha", "ratio", "h0"):
        value = getattr(args, key.replace("lambda", "lam"), None)
        if value is not None:
            params[key] = value
    return params


def cmd_build(args, config: RunConfig) -> int:
    params = _family_params(args)
    config.params = {"family": args.family, **params}
    config.mode = args.mode or _infer_mode(parse_scalar(v) for v in params.values() if _is_scalar_text(v))
    surface, summary = SurfaceService().build(config, args.family, params)
    if args.out:
        _write(args.out, _dump(surface_to_json(surface, config.window, config.provenance())))
    if args.svg:
        _write(args.svg, surface_to_svg(surface, config.window, header=_header(config)))
    _emit(config, summary)
    return EXIT_OK


def _is_scalar_text(v: Any) -> bool:
    try:
        parse_scalar(v)
        return True
    except (UsageError, TypeError):
        return False


def _surface_from_args(args):
    if args.surface:
        return resolve_surface(surface=_read_json(args.surface))
    if args.family:
        return build_surface(args.family, _family_params(args))[0]
    raise UsageError("give --surface FILE or --family NAME")


def cmd_trace(args, config: RunConfig) -> int:
    surface = _surface_from_args(args)
    service = SurfaceService()
    config.params = {
        "surface": args.surface,
        "family": args.family,
        "direction": list(map(str, args.dir)),
        "from": None if args.point is None else list(map(str, args.point)),
        "poly": repr(args.poly),
    }
    config.mode = args.mode or _infer_mode(list(args.dir) + list(args.point or []))
    data: Dict[str, Any] = {}
    segments = []
    if args.cylinders:
        data["cylinders"] = service.cylinders(config, surface, args.dir)
    if args.saddles is not None:
        data["saddle_connections"] = service.saddle_connections(
            config, surface, args.dir, args.saddles, through_regular=args.through_regular
        )
    if args.multitwist is not None:
        data["multitwist"] = service.multitwist(config, surface, args.dir, args.multitwist)
    if args.point is not None:
        traj, summary = service.trace(config, surface, args.poly, args.point, args.dir)
        data["trajectory"] = summary
        segments = [(s.poly, s.start, s.end) for s in traj.segments]
    if not data:
        raise UsageError("nothing to do: give --from, --cylinders, --saddles or --multitwist")
    if args.svg:
        _write(args.svg, surface_to_svg(surface, config.window, segments, header=_header(config)))
    _emit(config, data, args.out)
    return EXIT_OK


def _load_iet(args):
    if args.spec:
        return IETService.load(_read_json(args.spec))
    if args.generator:
        return IETService.load({"generator": args.generator, "params": dict(args.param or [])})
    raise UsageError("give --spec FILE or --generator NAME")


def cmd_iet(args, config: RunConfig) -> int:
    service = IETService()
    config.params = {"action": args.action, "spec": args.spec, "generator": args.generator,
                     "params": dict(args.param or [])}
    if args.action == "keane":
        config.truncation = args.truncation
        _emit(config, service.keane(config, args.truncation, args.depth), args.out)
        return EXIT_OK
    if args.action == "malaga":
        if not args.alphas:
            raise UsageError("malaga needs --alphas a0,a1,...")
        alphas = [_scalar(a) for a in args.alphas.split(",")]
        x = args.x if args.x is not None else parse_scalar("0")
        _emit(config, service.malaga(config, alphas, x, args.level, args.n), args.out)
        return EXIT_OK
    f = _load_iet(args)
    if args.action == "show":
        _emit(config, iet_to_json(f), args.out)
        return EXIT_OK
    if args.action in ("eval", "orbit") and args.x is None:
        raise UsageError(f"{args.action} needs --x")
    config.mode = args.mode or _infer_mode([args.x] if args.x is not None else [])
    if args.action == "eval":
        data = service.eval(config, f, args.x)
    elif args.action == "orbit":
        data = service.orbit(config, f, args.x, args.n)
    elif args.action == "connections":
        data = service.connections(config, f, args.depth)
    else:
        data = service.periodic(config, f, args.n_max, strict=args.strict)
    _emit(config, data, args.out)
    return EXIT_OK


def cmd_entropy(args, config: RunConfig) -> int:
    service = IETService()
    m_range = range(args.m_min, args.m_max + 1) if args.m_max else None
    if args.lengths:
        lengths = [_scalar(v) for v in args.lengths.split(",")]
        config.params = {"lengths": args.lengths, "remainder": str(args.remainder)}
        data = service.entropy_of_lengths(config, lengths, args.remainder, m_range)
    elif args.step_ratio is not None:
        if args.dir is None:
            raise UsageError("the step billiard needs --dir")
        config.params = {"step_ratio": str(args.step_ratio), "direction": list(map(str, args.dir)),
                         "levels": args.levels}
        data = service.entropy_of_step_billiard(config, args.step_ratio, args.dir, args.levels)
    else:
        config.params = {"spec": args.spec, "generator": args.generator, "params": dict(args.param or [])}
        data = service.entropy_of_iet(config, _load_iet(args), m_range)
    if args.abramov_time is not None:
        data["flow_entropy_bound"] = service.abramov(data["last"], args.abramov_time)
    if args.csv:
        _write_csv(config, args.csv, ["m", "value", "running_inf"],
                   zip(data["m"], data["values"], data["running_inf"]))
    _emit(config, data, args.out)
    return EXIT_OK


def cmd_cutstack(args, config: RunConfig) -> int:
    service = CutStackService()
    if args.shields is not None:
        config.params = {"shields": args.shields}
        _emit(config, service.shields(config, args.shields), args.out)
        return EXIT_OK
    if args.steps:
        steps = steps_from_json(_read_text(args.steps))
    elif args.named:
        steps = named_steps(args.named)
    else:
        raise UsageError("give --steps FILE, --named FAMILY or --shields K")
    config.params = {"steps": args.steps, "named": args.named, "k": args.k}
    config.truncation = args.k
    res, summary = service.to_iet(config, steps, args.k)
    data: Dict[str, Any] = {"cutstack": summary}
    if args.dot or args.bratteli:
        diagram, bsummary = service.bratteli(config, steps)
        data["bratteli"] = bsummary
        if args.dot:
            _write(args.dot, diagram.to_dot(_header(config)))
        if args.bratteli:
            _write(args.bratteli, _dump(_with_provenance(config, diagram.to_json())))
    _emit(config, data, args.out)
    return EXIT_OK


def cmd_htv(args, config: RunConfig) -> int:
    service = HTVService()
    if args.baker is not None:
        config.params = {"baker": args.baker}
        _emit(config, service.baker(config, args.baker), args.out_report)
        return EXIT_OK
    family = args.family
    graph = None
    if args.h:
        kind, _, fam = args.h.partition(":")
        if kind == "closed" and fam:
            family = fam
        elif kind != "pf":
            raise UsageError(f"--h must be closed:FAMILY or pf, got {args.h!r}")
    if args.graph:
        graph = _read_json(args.graph)
        family = None
    config.params = {
        "family": family,
        "graph": args.graph,
        "lambda": None if args.lam is None else str(args.lam),
        "k": args.k,
        "q": args.q,
        "A": None if args.A is None else str(args.A),
        "B": None if args.B is None else str(args.B),
        "h0": None if args.h0 is None else str(args.h0),
    }
    config.window = args.window or config.window
    config.mode = args.mode or _infer_mode([v for v in (args.lam, args.A, args.B, args.h0) if v is not None])
    h = harmonic_for(family=family, lam=args.lam, graph=graph, k=args.k, q=args.q, A=args.A, B=args.B, h0=args.h0)
    surface, report = service.assemble(config, h)
    if args.out:
        _write(args.out, _dump(surface_to_json(surface, config.window, config.provenance())))
    if args.svg:
        _write(args.svg, surface_to_svg(surface, config.window, header=_header(config)))
    _emit(config, report, args.out_report)
    return EXIT_OK


def cmd_rosen(args, config: RunConfig) -> int:
    service = RosenService()
    config.params = {"action": args.action, "lambda": str(args.lam), "x": None if args.x is None else str(args.x),
                     "y": None if args.y is None else str(args.y), "depth": args.depth}
    config.mode = args.mode or _infer_mode([args.lam] + [v for v in (args.x, args.y) if v is not None])
    if args.action == "expand":
        if args.x is None:
            raise UsageError("expand needs --x")
        data = service.expand(config, args.x, args.lam, args.depth)
    elif args.action == "gap":
        data = service.gap(config, args.lam)
    else:
        if args.x is None or args.y is None:
            raise UsageError("reduce needs --x and --y")
        data = service.reduce(config, args.x, args.y, args.lam)
    _emit(config, data, args.out)
    return EXIT_OK


def cmd_windtree(args, config: RunConfig) -> int:
    if args.theta is None and args.dir is None:
        raise UsageError("give --theta or --dir")
    direction = args.theta if args.theta is not None else args.dir
    config.seed = args.seed if args.seed is not None else 0
    config.mode = ScalarMode.FLOAT
    config.params = {"a": str(args.a), "b": str(args.b), "theta": args.theta,
                     "direction": None if args.dir is None else list(map(str, args.dir)),
                     "orbits": args.orbits, "T": args.T}
    res, summary = WindtreeService().diffusion(config, args.a, args.b, direction, args.T, args.orbits)
    if args.csv:
        _write_csv(config, args.csv, CSV_COLUMNS, WindtreeService.csv_rows(res))
    _emit(config, summary, args.out)
    return EXIT_OK


def cmd_serve(args, config: RunConfig) -> int:
    from flatland.main import serve

    serve(args.host, args.port)
    return EXIT_OK


# ============================================================
# 参数表
# ============================================================


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=None, help="随机种子（记录在所有输出中）")
    p.add_argument("--eps", type=float, default=None, help="浮点比较容差 ε_cmp")
    p.add_argument("--window", type=int, default=None, help="惰性曲面的窗口大小")
    p.add_argument("--mode", type=ScalarMode, choices=list(ScalarMode), default=None, help="覆盖推断的数域模式")
    p.add_argument("--max-crossings", type=int, default=None)
    p.add_argument("--max-len", type=float, default=None)
    p.add_argument("--out", default=None, help="JSON 输出文件（缺省写到标准输出）")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _family_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--param", type=_key_value, action="append", metavar="KEY=VALUE")
    p.add_argument("--lambda", dest="lam", default=None)
    p.add_argument("--alpha", default=None)
    p.add_argument("--ratio", default=None)
    p.add_argument("--h0", default=None)


def _iet_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--spec", default=None, help="IET JSON 文件")
    p.add_argument("--generator", default=None, help="命名生成器：rotation、golden、baker_vertical、baker、keane…")
    p.add_argument("--param", type=_key_value, action="append", metavar="KEY=VALUE")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="flatland", description="平移曲面与区间交换变换的精确计算")
    parser.add_argument("--version", action="version", version=f"flatland {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common], help="构造曲面并校验")
    p.add_argument("family")
    _family_args(p)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_build, command_enum=CommandEnum.BUILD)

    p = sub.add_parser("trace", parents=[common], help="直线流、柱面与鞍点连接")
    p.add_argument("--surface", default=None, help="曲面 JSON 文件")
    p.add_argument("--family", default=None)
    _family_args(p)
    p.add_argument("--dir", type=_pair, required=True, metavar="P,Q")
    p.add_argument("--from", dest="point", type=_pair, default=None, metavar="X,Y")
    p.add_argument("--poly", type=_index, default=0)
    p.add_argument("--cylinders", action="store_true")
    p.add_argument("--saddles", type=_scalar, default=None, metavar="L")
    p.add_argument("--through-regular", action="store_true")
    p.add_argument("--multitwist", type=_scalar, default=None, metavar="LAMBDA")
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_trace, command_enum=CommandEnum.TRACE)

    p = sub.add_parser("iet", parents=[common], help="IET 求值、轨道、连接与周期分量")
    p.add_argument("action", choices=["show", "eval", "orbit", "connections", "periodic", "keane", "malaga"])
    _iet_source(p)
    p.add_argument("--x", type=_scalar, default=None)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--truncation", type=int, default=30)
    p.add_argument("--alphas", default=None, help="Málaga 映射的 α 序列（按层号周期延拓）")
    p.add_argument("--level", type=int, default=0)
    p.set_defaults(func=cmd_iet, command_enum=CommandEnum.IET)

    p = sub.add_parser("entropy", parents=[common], help="熵上界 log(m)·Λ_m")
    _iet_source(p)
    p.add_argument("--lengths", default=None)
    p.add_argument("--remainder", type=_scalar, default=parse_scalar("0"))
    p.add_argument("--step-ratio", type=_scalar, default=None)
    p.add_argument("--dir", type=_pair, default=None, metavar="P,Q")
    p.add_argument("--levels", type=int, default=20)
    p.add_argument("--m-min", type=int, default=2)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--abramov-time", type=_scalar, default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_entropy, command_enum=CommandEnum.ENTROPY)

    p = sub.add_parser("cutstack", parents=[common], help="切割堆叠、部分 IET 与 Bratteli 图")
    p.add_argument("--steps", default=None, help="步骤 JSON 文件")
    p.add_argument("--named", default=None, help="odometer:k、figure 或 shields:k")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--shields", type=int, default=None)
    p.add_argument("--dot", default=None)
    p.add_argument("--bratteli", default=None, help="Bratteli 图 JSON 文件")
    p.set_defaults(func=cmd_cutstack, command_enum=CommandEnum.CUTSTACK)

    p = sub.add_parser("htv", parents=[common], help="Hooper-Thurston-Veech 拼装")
    p.add_argument("--graph", default=None, help="有限带状图 JSON")
    p.add_argument("--family", default=None, help="Z、N、modifiedN 或 tree")
    p.add_argument("--h", default=None, help="closed:FAMILY 或 pf")
    p.add_argument("--lambda", dest="lam", type=_scalar, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--A", type=_scalar, default=None)
    p.add_argument("--B", type=_scalar, default=None)
    p.add_argument("--h0", type=_scalar, default=None)
    p.add_argument("--baker", type=int, default=None, metavar="Q")
    p.add_argument("--svg", default=None)
    p.add_argument("--report", dest="out_report", default=None, help="报告 JSON 文件（缺省写到标准输出）")
    p.set_defaults(func=cmd_htv, command_enum=CommandEnum.HTV)

    p = sub.add_parser("rosen", parents=[common], help="Rosen 连分数与 G_λ")
    p.add_argument("action", choices=["expand", "gap", "reduce"])
    p.add_argument("--lambda", dest="lam", type=_scalar, required=True)
    p.add_argument("--x", type=_scalar, default=None)
    p.add_argument("--y", type=_scalar, default=None)
    p.add_argument("--depth", type=int, default=30)
    p.add_argument("--json", action="store_true", help="JSON 输出（默认即是）")
    p.set_defaults(func=cmd_rosen, command_enum=CommandEnum.ROSEN)

    p = sub.add_parser("windtree", parents=[common], help="风树模型的扩散诊断")
    p.add_argument("--a", type=_scalar, required=True)
    p.add_argument("--b", type=_scalar, required=True)
    p.add_argument("--theta", type=float, default=None, help="方向角（弧度）")
    p.add_argument("--dir", type=_pair, default=None, metavar="P,Q")
    p.add_argument("--orbits", type=int, default=100)
    p.add_argument("--T", type=float, default=1e6)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_windtree, command_enum=CommandEnum.WINDTREE)

    p = sub.add_parser("serve", help="启动 HTTP 服务")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8200)
    p.set_defaults(func=cmd_serve, command_enum=None)
    return parser


def _config(args) -> RunConfig:
    budget = Budget()
    if getattr(args, "max_crossings", None):
        budget.max_crossings = args.max_crossings
    if getattr(args, "max_len", None):
        budget.max_length = args.max_len
    config = RunConfig(
        command=args.command_enum,
        window=getattr(args, "window", None),
        seed=getattr(args, "seed", None),
        budget=budget,
    )
    if getattr(args, "eps", None):
        config.eps_cmp = args.eps
    outputs = {k: getattr(args, k) for k in ("out", "svg", "csv", "dot", "bratteli") if getattr(args, k, None)}
    config.outputs = outputs
    return config


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )
    if args.command_enum is None:
        return args.func(args, None)
    try:
        config = _config(args)
        with tolerance(config.eps_cmp):
            return args.func(args, config)
    except UsageError as exc:
        sys.stderr.write(f"flatland {args.command}: usage error: {exc}\n")
        return EXIT_USAGE
    except PartialResult as exc:
        sys.stderr.write(f"flatland {args.command}: partial result: {exc} (covered {exc.covered})\n")
        return EXIT_DOMAIN
    except (FlatlandError, ValueError) as exc:
        sys.stderr.write(f"flatland {args.command}: {type(exc).__name__}: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
