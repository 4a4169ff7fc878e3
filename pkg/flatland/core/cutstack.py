"""
切割堆叠：栈族、单步变换、部分 IET、Bratteli-Vershik 图

字母 (i, j) 从 1 开始编号：第 i 个栈按概率向量切出的第 j 块。每个词从下往上堆叠。
宽度只接受精确有理数，合法性检查全部是精确等式。
"""

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from flatland.core.errors import DomainError
from flatland.core.iet import IET, Piece

logger = logging.getLogger(__name__)

Letter = Tuple[int, int]

SHIELDS_MATERIALIZE_LIMIT = 4


@dataclass
class Stack:
    """等宽的若干层；levels[l] 为第 l 层（从下往上）区间的左端点"""

    width: Fraction
    levels: List[Fraction]

    @property
    def height(self) -> int:
        return len(self.levels)


@dataclass
class StackFamily:
    stacks: List[Stack]

    @classmethod
    def unit(cls) -> "StackFamily":
        return cls([Stack(Fraction(1), [Fraction(0)])])

    def measure(self) -> Fraction:
        return sum((s.width * s.height for s in self.stacks), Fraction(0))

    def top_measure(self) -> Fraction:
        """未定义部分的测度：各栈顶层宽度之和"""
        return sum((s.width for s in self.stacks), Fraction(0))


@dataclass
class CutStackStep:
    cuts: List[List[Fraction]]
    words: List[List[Letter]]

    def __post_init__(self):
        self.cuts = [[Fraction(p) for p in row] for row in self.cuts]
        self.words = [[(int(a), int(b)) for a, b in w] for w in self.words]

    def to_json(self) -> Dict[str, Any]:
        return {
            "cuts": [[str(p) for p in row] for row in self.cuts],
            "words": [[[i, j] for i, j in w] for w in self.words],
        }

    @classmethod
    def from_json(cls, obj: Dict[str, Any]) -> "CutStackStep":
        return cls([[Fraction(p) for p in row] for row in obj["cuts"]], obj["words"])


def steps_to_json(steps: Sequence[CutStackStep]) -> str:
    return json.dumps({"steps": [s.to_json() for s in steps]}, ensure_ascii=False, indent=2)


def steps_from_json(text: str) -> List[CutStackStep]:
    obj = json.loads(text)
    return [CutStackStep.from_json(s) for s in obj.get("steps", [])]


def _check_letters(step: CutStackStep, n_stacks: int) -> None:
    if len(step.cuts) != n_stacks:
        raise DomainError(f"step cuts {len(step.cuts)} stacks but the family has {n_stacks}")
    expected = {(i + 1, j + 1) for i, row in enumerate(step.cuts) for j in range(len(row))}
    seen = set()
    for w in step.words:
        if not w:
            raise DomainError("words must be non-empty")
        for letter in w:
            if letter not in expected:
                raise DomainError(f"letter {letter} does not name a cut piece")
            if letter in seen:
                raise DomainError(f"letter {letter} is used twice")
            seen.add(letter)
    missing = expected - seen
    if missing:
        raise DomainError(f"letters {sorted(missing)} are not used by any word")
    for i, row in enumerate(step.cuts):
        if any(p <= 0 for p in row) or sum(row) != 1:
            raise DomainError(f"cut probabilities of stack {i + 1} must be positive and sum to 1")


def apply_step(family: StackFamily, step: CutStackStep) -> StackFamily:
    """按 p_ij 切开每个栈，再按词把小栈自下而上连接；同一词内宽度必须精确相等"""
    _check_letters(step, len(family.stacks))
    pieces: Dict[Letter, Stack] = {}
    for i, (stack, row) in enumerate(zip(family.stacks, step.cuts)):
        offset = Fraction(0)
        for j, p in enumerate(row):
            w = stack.width * p
            pieces[(i + 1, j + 1)] = Stack(w, [x + offset for x in stack.levels])
            offset += w
    out = []
    for w in step.words:
        widths = {pieces[letter].width for letter in w}
        if len(widths) != 1:
            raise DomainError(f"word {w} mixes widths {sorted(widths)}")
        levels: List[Fraction] = []
        for letter in w:
            levels += pieces[letter].levels
        out.append(Stack(widths.pop(), levels))
    return StackFamily(out)


def build_family(steps: Sequence[CutStackStep], k: Optional[int] = None) -> StackFamily:
    family = StackFamily.unit()
    for step in steps[: len(steps) if k is None else k]:
        family = apply_step(family, step)
    return family


@dataclass
class StackIET:
    iet: IET
    undefined_measure: Fraction
    limit_condition: Fraction = field(default=Fraction(0))


def family_to_iet(family: StackFamily, name: Optional[str] = None) -> IET:
    """每层平移到上一层；相邻且平移量相同的层合并"""
    raw: List[Tuple[Fraction, Fraction, Fraction, str]] = []
    for s_idx, s in enumerate(family.stacks):
        for l in range(s.height - 1):
            raw.append((s.levels[l], s.width, s.levels[l + 1] - s.levels[l], f"S{s_idx + 1}.{l + 1}"))
    raw.sort()
    merged: List[List[Any]] = []
    for top, width, shift, label in raw:
        if merged and merged[-1][0] + merged[-1][1] == top and merged[-1][2] == shift:
            merged[-1][1] += width
        else:
            merged.append([top, width, shift, label])
    pieces = [Piece(label, top, width, top + shift) for top, width, shift, label in merged]
    return IET(pieces, total=Fraction(1), name=name)


def to_iet(steps: Sequence[CutStackStep], k: Optional[int] = None) -> StackIET:
    """前 k 步得到的部分 IET f^(k)；空步骤列表给出 (0,1) 上的空映射"""
    family = build_family(steps, k)
    iet = family_to_iet(family, name=f"cut-and-stack f^({len(steps) if k is None else k})")
    undefined = family.top_measure()
    logger.info("切割堆叠 IET：%s 个分量，未定义测度 %s", len(iet.pieces), undefined)
    return StackIET(iet, undefined, undefined)


# ============================================================
# 命名例子
# ============================================================


def odometer_steps(k: int) -> List[CutStackStep]:
    """二进里程表：唯一的栈对半切开，右半叠在左半之上"""
    return [CutStackStep([[Fraction(1, 2), Fraction(1, 2)]], [[(1, 1), (1, 2)]]) for _ in range(k)]


def figure_steps() -> List[CutStackStep]:
    """先把单位区间切成宽 1/2、1/8、3/8 的三个栈，再做 a = (4, 1, 3) 的四词堆叠"""
    split = CutStackStep([[Fraction(1, 2), Fraction(1, 8), Fraction(3, 8)]], [[(1, 1)], [(1, 2)], [(1, 3)]])
    q = Fraction(1, 4)
    t = Fraction(1, 3)
    step = CutStackStep(
        [[q, q, q, q], [Fraction(1)], [t, t, t]],
        [[(3, 3), (1, 1)], [(2, 1), (1, 3)], [(3, 2)], [(1, 2), (3, 1), (1, 4)]],
    )
    return [split, step]


def shields_step(q: int) -> CutStackStep:
    """q 个栈各切成 2q 等份；词 (i, j) = 栈 i 的第 j 块在下、栈 j 的第 q+i 块在上"""
    p = Fraction(1, 2 * q)
    words = [[(i, j), (j, q + i)] for i in range(1, q + 1) for j in range(1, q + 1)]
    return CutStackStep([[p] * (2 * q) for _ in range(q)], words)


def shields_steps(k: int) -> List[CutStackStep]:
    if k < 1:
        raise DomainError("k must be at least 1")
    steps = [CutStackStep([[Fraction(1, 2), Fraction(1, 2)]], [[(1, 1)], [(1, 2)]])]
    q = 2
    for _ in range(k - 1):
        steps.append(shields_step(q))
        q = q * q
    return steps


@dataclass
class ShieldsResult:
    k: int
    q: int
    w: Fraction
    log2_coefficient: Fraction
    family: Optional[StackFamily] = None

    @property
    def invariant(self) -> float:
        """q_k·w_k·log q_k 的数值"""
        return float(self.log2_coefficient) * math.log(2)


def shields_example(k: int) -> ShieldsResult:
    """q_{k+1} = q_k²，w_{k+1} = w_k/(2q_k)；不变量 q_k·w_k·log q_k 以 log 2 的有理系数精确给出"""
    if k < 1:
        raise DomainError("k must be at least 1")
    q, w, log2_q = 2, Fraction(1, 2), 1
    for _ in range(k - 1):
        q, w, log2_q = q * q, w / (2 * q), 2 * log2_q
    family = build_family(shields_steps(k)) if k <= SHIELDS_MATERIALIZE_LIMIT else None
    return ShieldsResult(k, q, w, q * w * log2_q, family)


# ============================================================
# Bratteli-Vershik 图
# ============================================================


@dataclass(frozen=True)
class BratteliEdge:
    level: int
    source: int
    target: int
    s_order: int
    t_order: int


@dataclass
class BratteliDiagram:
    vertices: List[int]
    edges: List[BratteliEdge]

    def level_sizes(self) -> List[int]:
        return list(self.vertices)

    def to_json(self) -> Dict[str, Any]:
        return {
            "levels": self.vertices,
            "edges": [[e.level, e.source, e.target, e.s_order, e.t_order] for e in self.edges],
        }

    def to_dot(self, header: Optional[str] = None) -> str:
        lines = []
        if header:
            lines += [f"// {line}" for line in header.splitlines()]
        lines.append("digraph bratteli {")
        lines.append("  rankdir=TB;")
        for k, n in enumerate(self.vertices):
            names = " ".join(f'"v{k}_{i}"' for i in range(n))
            lines.append(f"  {{ rank=same; {names} }}")
        for e in self.edges:
            lines.append(f'  "v{e.level}_{e.source}" -> "v{e.level + 1}_{e.target}" [label="{e.s_order},{e.t_order}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def to_bratteli(steps: Sequence[CutStackStep]) -> BratteliDiagram:
    """每一步的栈是一层顶点；每个切块是一条边，<_s 取切割次序，<_t 取词内位置"""
    vertices = [1]
    edges: List[BratteliEdge] = []
    n = 1
    for k, step in enumerate(steps):
        _check_letters(step, n)
        for w_idx, w in enumerate(step.words):
            for pos, (i, j) in enumerate(w):
                edges.append(BratteliEdge(k, i - 1, w_idx, j - 1, pos))
        n = len(step.words)
        vertices.append(n)
    return BratteliDiagram(vertices, edges)
