"""
Málaga 映射 T_α(x, n) = (x + α_n mod 1, n + f(x + α_n mod 1))，f 在 [0,1/2) 取 +1、在 [1/2,1) 取 −1

与广义阶梯的对应：底边 J_m = [0,2)×{m} 经 x ↦ (x−1)/2 mod 1 投影到 [0,1)，
Málaga 层 n 对应矩形 R_{−n}（阶梯中 n 向上递增，上左半边通往下一层）。
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, List, Mapping, Sequence, Tuple, Union

from flatland.core.builders import malaga_staircase
from flatland.core.config import Budget
from flatland.core.enums import TraceStatus
from flatland.core.errors import DomainError
from flatland.core.flow import _check_direction, _trace_finite
from flatland.core.scalar import Scalar, cmp, exact, floor_scalar, sign
from flatland.core.surface import as_finite

logger = logging.getLogger(__name__)

State = Tuple[Scalar, int]
Alphas = Union[Callable[[int], Scalar], Mapping[int, Scalar], Sequence[Scalar]]

HALF = Fraction(1, 2)


def _mod1(x: Scalar) -> Scalar:
    return x - floor_scalar(x)


def _alpha(alphas: Alphas, n: int) -> Scalar:
    if callable(alphas):
        return exact(alphas(n))
    return exact(alphas[n])


def malaga_step(alphas: Alphas, state: State) -> State:
    x, n = state
    a = _alpha(alphas, n)
    if sign(a) < 0 or cmp(a, 1) >= 0:
        raise DomainError(f"α_{n} = {a} must lie in [0, 1)")
    y = _mod1(exact(x) + a)
    return y, n + (1 if cmp(y, HALF) < 0 else -1)


def malaga_orbit(alphas: Alphas, state: State, steps: int) -> List[State]:
    out = [(exact(state[0]), state[1])]
    for _ in range(steps):
        out.append(malaga_step(alphas, out[-1]))
    return out


def malaga_from_staircase(h: Callable[[int], Scalar], direction: Sequence[Scalar]) -> Callable[[int], Scalar]:
    """α_n = h_{−n}·(d_x/d_y)/2 + 1/2 mod 1；水平方向不允许"""
    d = _check_direction(direction)
    if sign(d[1]) == 0:
        raise DomainError("direction must not be horizontal")
    if sign(d[1]) < 0:
        d = (-d[0], -d[1])
    slope = d[0] / d[1]
    return lambda n: _mod1(exact(h(-n)) * slope / 2 + HALF)


@dataclass
class StaircaseReplay:
    states: List[State]
    status: TraceStatus


def malaga_trace_staircase(
    h: Callable[[int], Scalar],
    direction: Sequence[Scalar],
    state: State,
    steps: int,
) -> StaircaseReplay:
    """在广义阶梯上用流追踪重放同一条轨道：每次经底边进入 R_m 记录 ((x−1)/2 mod 1, −m)"""
    d = _check_direction(direction)
    if sign(d[1]) <= 0:
        raise DomainError("replay needs an upward direction")
    surface = malaga_staircase(h)
    X, n = exact(state[0]), state[1]
    m0 = -n
    fs = as_finite(surface, list(range(m0 - steps - 1, m0 + steps + 2)))
    x0 = _mod1((2 * X + 1) / 2) * 2
    # 底边由两条边组成，(1,0) 是顶点
    traj = _trace_finite(fs, m0, (x0, Fraction(0)), d, Budget(max_crossings=8 * steps + 8), detect_closure=False)
    states: List[State] = [(X, n)]
    for seg in traj.segments[1:]:
        if sign(seg.start[1]) == 0:
            states.append((_mod1((seg.start[0] - 1) / 2), -seg.poly))
            if len(states) > steps:
                break
    status = TraceStatus.BUDGET_EXHAUSTED if len(states) > steps else traj.status
    logger.debug("阶梯重放 %s 步，状态 %s", len(states) - 1, status.value)
    return StaircaseReplay(states, status)


def sixths_preserved(alphas: Alphas, levels: Sequence[int]) -> bool:
    """α_n ∈ {1/3, 2/3} 时区间 (k/6, (k+1)/6) 整体映入某个 (k'/6, (k'+1)/6)"""
    for n in levels:
        for k in range(6):
            lo = Fraction(k, 6)
            imgs = set()
            for s in (Fraction(1, 7), HALF, Fraction(6, 7)):
                y, m = malaga_step(alphas, (lo + s / 6, n))
                imgs.add((floor_scalar(y * 6), m))
            if len(imgs) != 1:
                return False
    return True
