"""命令行接口模块"""
import functools
import sys
from pathlib import Path
from typing import Optional

import click
import numpy as np

from approximants import ApproximantKind, RationalApproximant, dc_check, find_crossing
from config import IntegratorConfig, QuadratureConfig, TAIL_MODELS, get_config
from constants import (
    APP_NAME, APP_VERSION, B_CANONICAL, DEFAULT_SHOOT_HI, DEFAULT_SHOOT_LO, DEFAULT_SHOOT_TOL, GRID_X_MAX,
    GRID_X_MIN, REFERENCE_B1, REFERENCE_B2, REFERENCE_E1_PCT, REFERENCE_E2_PCT, REFERENCE_ROUNDING_ANOMALIES,
    REFERENCE_TABLE, REFERENCE_TABLE_ANOMALIES, REFERENCE_TWICE_POWER, TABLE_FLAG_THRESHOLD,
)
from exceptions import ConfigError, ThomasFermiError
from logger import setup_logger
from model import singular_solution
from ode_solver import TfIntegrator
from output import OutputFormat, render_record, render_rows, write_output
from quadrature import SumRuleEvaluator, fractional_error_pct
from series import (
    B_SYMBOL, HalfPower, eval_series, format_coefficient, reference_series,
    series_equal, series_truncate, substitute_b, symbolic_series,
)

FORMAT_CHOICE = click.Choice([f.value for f in OutputFormat])
POSITIVE = click.FloatRange(min=0.0, min_open=True)

# 文献中能量型求和规则的参考值
_REFERENCE_ENERGY = {
    ApproximantKind.ANSATZ1: (REFERENCE_B1, REFERENCE_E1_PCT),
    ApproximantKind.ANSATZ2: (REFERENCE_B2, REFERENCE_E2_PCT),
}


def exit_on_error(action: str):
    """装饰器：计算错误退出码 1，配置错误按用法错误处理（退出码 2）"""

    def decorator(f):
        @functools.wraps(f)
        def wrapper(*args, **kwargs):
            try:
                return f(*args, **kwargs)
            except ConfigError as e:
                raise click.UsageError(str(e))
            except ThomasFermiError as e:
                click.echo(f"{action}失败: {e}", err=True)
                sys.exit(1)

        return wrapper

    return decorator


def output_options(f):
    """子命令上的 --format / --out，覆盖全局设置"""
    f = click.option('--out', '-o', type=click.Path(dir_okay=False), help='输出文件路径')(f)
    f = click.option('--format', '-f', 'fmt', type=FORMAT_CHOICE, help='输出格式')(f)
    return f


def _resolve(ctx, fmt: Optional[str], out: Optional[str], default: OutputFormat):
    fmt = OutputFormat(fmt or ctx.obj.get('format') or default.value)
    out = out or ctx.obj.get('out')
    return fmt, Path(out) if out else None


def _emit(text: str, out: Optional[Path]) -> None:
    if out:
        write_output(text, out)
    else:
        click.echo(text, nl=False)


def _print_version(ctx, param, value):
    # 版本信息只写标准错误，标准输出保持为纯数据
    if not value or ctx.resilient_parsing:
        return
    click.echo(f"{APP_NAME}, version {APP_VERSION}", err=True)
    ctx.exit()


def _parse_order(ctx, param, value):
    if value is None:
        return None
    try:
        return HalfPower.parse(value)
    except (ValueError, ThomasFermiError) as e:
        raise click.BadParameter(str(e))


@click.group()
@click.option('--version', is_flag=True, expose_value=False, is_eager=True,
              callback=_print_version, help='显示版本并退出')
@click.option('--verbose', '-v', is_flag=True, help='启用详细输出')
@click.option('--format', '-f', 'fmt', type=FORMAT_CHOICE, help='输出格式')
@click.option('--out', '-o', type=click.Path(dir_okay=False), help='输出文件路径')
@click.option('--log-file', type=click.Path(dir_okay=False), help='日志文件路径')
@click.pass_context
def cli(ctx, verbose, fmt, out, log_file):
    """Thomas-Fermi 方程：数值解、有理近似与动力学一致性检查"""
    ctx.ensure_object(dict)
    config = get_config()
    ctx.obj['config'] = config
    ctx.obj['format'] = fmt
    ctx.obj['out'] = out
    setup_logger(APP_NAME, "DEBUG" if verbose else config.log_level, Path(log_file) if log_file else None)


@cli.command()
@click.option('--slope', type=click.FloatRange(max=0.0, max_open=True), default=-B_CANONICAL,
              show_default=True, help="初始斜率 y'(0)")
@click.option('--xmax', type=POSITIVE, help='积分上限')
@click.option('--step', type=POSITIVE, help='RK4 步长')
@click.option('--xstart', type=POSITIVE, help='级数与RK4的交接点')
@click.option('--series-order', callback=_parse_order, help='种子级数阶数，如 8 或 9/2')
@output_options
@click.pass_context
@exit_on_error("积分")
def solve(ctx, slope, xmax, step, xstart, series_order, fmt, out):
    """从 y(0)=1 积分并输出 x,y,dy 采样"""
    fmt, out = _resolve(ctx, fmt, out, OutputFormat.CSV)
    base = ctx.obj['config'].integrator
    cfg = IntegratorConfig(
        x_start=xstart if xstart is not None else base.x_start,
        h=step if step is not None else base.h,
        x_max=xmax if xmax is not None else base.x_max,
        series_order=series_order or base.series_order,
        tail_model=base.tail_model,
    )
    trajectory = TfIntegrator(cfg).integrate(slope)
    _emit(render_rows(("x", "y", "dy"), trajectory.rows(), fmt), out)
    # 有输出文件时分类写标准输出，否则写标准错误以免混入数据
    click.echo(trajectory.status.describe(), err=out is None)


@cli.command()
@click.option('--lo', type=float, default=DEFAULT_SHOOT_LO, show_default=True, help='区间下端（应穿越零点）')
@click.option('--hi', type=float, default=DEFAULT_SHOOT_HI, show_default=True, help='区间上端（应无界）')
@click.option('--tol', type=POSITIVE, default=DEFAULT_SHOOT_TOL, show_default=True, help='区间宽度容差')
@output_options
@click.pass_context
@exit_on_error("打靶")
def shoot(ctx, lo, hi, tol, fmt, out):
    """二分打靶求 B"""
    fmt, out = _resolve(ctx, fmt, out, OutputFormat.TABLE)
    result = TfIntegrator(ctx.obj['config'].integrator).shoot(lo, hi, tol)
    record = {
        "B": result.B,
        "iterations": result.iterations,
        "bracket_lo": result.lo,
        "bracket_hi": result.hi,
        "resolved": result.resolved,
        "B_reference": B_CANONICAL,
    }
    _emit(render_record(record, fmt, title="打靶结果"), out)


@cli.command()
@click.option('--grid', type=click.IntRange(min=2), help='改为输出对数网格上的 N 个点（绘图数据）')
@click.option('--xmin', type=POSITIVE, default=GRID_X_MIN, show_default=True, help='网格起点')
@click.option('--xmax', type=POSITIVE, default=GRID_X_MAX, show_default=True, help='网格终点')
@output_options
@click.pass_context
@exit_on_error("生成表格")
def table(ctx, grid, xmin, xmax, fmt, out):
    """数值解与两个有理近似在参考表各点的比较；--grid 时输出绘图用的曲线数据"""
    solution = TfIntegrator(ctx.obj['config'].integrator).bounded_solution()
    first = RationalApproximant.canonical(ApproximantKind.ANSATZ1)
    second = RationalApproximant.canonical(ApproximantKind.ANSATZ2)

    if grid is not None:
        if not xmin < xmax:
            raise click.BadParameter(f"要求 xmin < xmax，实际 {xmin} >= {xmax}", param_hint="'--xmax'")
        fmt, out = _resolve(ctx, fmt, out, OutputFormat.CSV)
        rows = [
            (x, solution.value(x), first.value(x), second.value(x), singular_solution(x))
            for x in (float(v) for v in np.logspace(np.log10(xmin), np.log10(xmax), grid))
        ]
        _emit(render_rows(("x", "rk4", "ansatz1", "ansatz2", "singular"), rows, fmt), out)
        return

    fmt, out = _resolve(ctx, fmt, out, OutputFormat.TABLE)
    rows = []
    for x, reference_numeric, reference_first, reference_second in REFERENCE_TABLE:
        y = solution.value(x)
        flagged = abs(y - reference_numeric) > TABLE_FLAG_THRESHOLD
        rows.append((x, round(y, 4), round(first.value(x), 4), round(second.value(x), 4), reference_numeric, flagged))
        if flagged:
            note = REFERENCE_TABLE_ANOMALIES.get(x, "")
            click.echo(f"x={x}: 数值解 {y:.4f} 与文献值 {reference_numeric:.4f} 相差超过 {TABLE_FLAG_THRESHOLD} {note}",
                       err=True)
        for column, printed in (("ansatz1", reference_first), ("ansatz2", reference_second)):
            if (x, column) in REFERENCE_ROUNDING_ANOMALIES:
                click.echo(f"x={x}: {column} 四舍五入为 {REFERENCE_ROUNDING_ANOMALIES[(x, column)]:.4f}，"
                           f"文献印作 {printed:.4f}", err=True)

    columns = ("x", "rk4", "ansatz1", "ansatz2", "reference", "flagged")
    _emit(render_rows(columns, rows, fmt, title="Thomas-Fermi 解与有理近似"), out)


@cli.command()
@click.option('--target', type=click.Choice(['numeric', 'approx1', 'approx2']), default='numeric',
              show_default=True, help='求和规则作用的解')
@click.option('--tol', type=click.FloatRange(min=0.0, max=1.0, min_open=True, max_open=True),
              help='积分相对容差')
@click.option('--tail-model', type=click.Choice(TAIL_MODELS), help='数值解锚点以外的衰减律')
@output_options
@click.pass_context
@exit_on_error("求和规则计算")
def sumrules(ctx, target, tol, tail_model, fmt, out):
    """求和规则与能量型积分给出的 B 相对误差"""
    fmt, out = _resolve(ctx, fmt, out, OutputFormat.TABLE)
    config = ctx.obj['config']
    quad = QuadratureConfig(
        rel_tol=tol if tol is not None else config.quadrature.rel_tol,
        split=config.quadrature.split,
        max_depth=config.quadrature.max_depth,
        min_depth=config.quadrature.min_depth,
    )

    if target == 'numeric':
        base = config.integrator
        integrator = TfIntegrator(IntegratorConfig(
            x_start=base.x_start, h=base.h, x_max=base.x_max,
            series_order=base.series_order, tail_model=tail_model or base.tail_model,
        ))
        solution = integrator.bounded_solution()
        kind = None
    else:
        kind = ApproximantKind.ANSATZ1 if target == 'approx1' else ApproximantKind.ANSATZ2
        solution = RationalApproximant.canonical(kind)

    report = SumRuleEvaluator(quad).report(solution, B_CANONICAL)
    _emit(render_record(report.to_dict(), fmt, title=f"求和规则 ({target})"), out)

    if kind is not None and report.rule_energy is not None:
        reference_b, reference_pct = _REFERENCE_ENERGY[kind]
        implied = fractional_error_pct(B_CANONICAL, reference_b)
        if abs(implied - reference_pct) > 0.03:
            click.echo(f"注意: 文献给出的相对误差 {reference_pct}% 与其 B 估计值 {reference_b} 推出的 {implied:.3f}% 不一致，"
                       f"本次计算为 {report.fractional_error_pct:.3f}%", err=True)

    if report.failures:
        for name, message in report.failures.items():
            click.echo(f"求和规则 {name} 未达到精度: {message}", err=True)
        sys.exit(1)


@cli.command()
@click.option('--order', default='9/2', show_default=True, callback=_parse_order, help='截断阶（半整数）')
@click.option('--iterations', type=click.IntRange(min=1), help='迭代次数，缺省时迭代到收敛')
@click.option('--x', 'x', type=click.FloatRange(min=0.0), help='在该点对级数求值')
@click.option('--b', 'b_value', type=POSITIVE, default=B_CANONICAL, show_default=True, help='代入的 B 值')
@output_options
@click.pass_context
@exit_on_error("级数展开")
def series(ctx, order, iterations, x, b_value, fmt, out):
    """小x级数的系数（B 的多项式及其数值）"""
    fmt, out = _resolve(ctx, fmt, out, OutputFormat.TABLE)
    symbolic, used = symbolic_series(order, iterations)
    numeric = substitute_b(symbolic, b_value)

    rows = [(str(p), format_coefficient(c), float(numeric.coefficient(p))) for p, c in symbolic.terms]
    if x is not None:
        rows.append((f"y({x})", "", eval_series(numeric, x)))

    compare = min(order.twice_power, REFERENCE_TWICE_POWER)
    if not series_equal(series_truncate(symbolic, compare), series_truncate(reference_series(B_SYMBOL), compare)):
        click.echo(f"警告: 迭代 {used} 次的结果在 x^{HalfPower(compare)} 以内与参考展开不一致", err=True)

    if fmt is OutputFormat.JSON:
        record = numeric.to_dict()
        symbolic_terms = {p.twice_power: format_coefficient(c) for p, c in symbolic.terms}
        for term in record["terms"]:
            term["symbolic"] = symbolic_terms.get(term["twice_power"], "0")
        record["iterations"] = used
        record["B"] = b_value
        if x is not None:
            record["x"] = x
            record["value"] = rows[-1][2]
        _emit(render_record(record, fmt), out)
    else:
        _emit(render_rows(("power", "symbolic", "numeric"), rows, fmt, title=f"级数展开（迭代 {used} 次）"), out)


@cli.command()
@click.option('--which', type=click.Choice(['1', '2']), default='1', show_default=True, help='近似式编号')
@click.option('--b', 'b_value', type=POSITIVE, default=B_CANONICAL, show_default=True, help='B')
@click.option('--c', 'c_value', type=click.FloatRange(min=0.0), help='C，缺省为 B^2/2')
@output_options
@click.pass_context
@exit_on_error("一致性检查")
def dc(ctx, which, b_value, c_value, fmt, out):
    """检查有理近似的五项动力学一致性性质"""
    fmt, out = _resolve(ctx, fmt, out, OutputFormat.TABLE)
    kind = ApproximantKind.ANSATZ1 if which == '1' else ApproximantKind.ANSATZ2
    c_value = b_value * b_value / 2.0 if c_value is None else c_value
    approximant = RationalApproximant(kind, b_value, c_value)
    if not approximant.has_monotone_denominator:
        click.echo(f"分母导数的最小值 {approximant.min_denominator_slope():.4g} 不为正", err=True)

    report = dc_check(approximant, ctx.obj['config'].dc_tolerances)
    if fmt is OutputFormat.JSON:
        _emit(report.to_json() + "\n", out)
    else:
        rows = [(p.name, p.residual, p.tolerance, p.passed) for p in report.properties]
        columns = ("property", "residual", "tolerance", "pass")
        _emit(render_rows(columns, rows, fmt, title=f"{kind.value} 动力学一致性"), out)


@cli.command()
@click.option('--b', 'b_value', type=POSITIVE, default=B_CANONICAL, show_default=True, help='B')
@click.option('--c', 'c_value', type=click.FloatRange(min=0.0), help='C，缺省为 B^2/2')
@output_options
@click.pass_context
@exit_on_error("求交点")
def crossing(ctx, b_value, c_value, fmt, out):
    """两个有理近似的交点 x0"""
    fmt, out = _resolve(ctx, fmt, out, OutputFormat.TABLE)
    result = find_crossing(b_value, c_value)
    record = {"x0": result.x0, "bracket_lo": result.bracket[0], "bracket_hi": result.bracket[1]}
    _emit(render_record(record, fmt, title="交点"), out)


if __name__ == '__main__':
    cli()
