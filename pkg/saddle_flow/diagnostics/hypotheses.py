# -*- coding: utf-8 -*-
"""
收敛定理假设检查

功能：计算基本假设、速率定理与强收敛定理各不等式的裕量，给出情形标签与预测速率指数
作用：在运行前判断参数组合落在哪个收敛结论的适用范围内
创建时间：2026-10-19
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..dynamics.params import DynamicsParams

CASE_HIGH = "q+2p≥1"
CASE_LOW = "q+2p<1"


class CheckStatus(Enum):
    """不等式检查状态"""
    PASSED = "passed"
    FAILED = "failed"


class HypothesisGroup(Enum):
    """假设所属的结论"""
    BASE = "base"
    THM31 = "thm31"
    THM42 = "thm42"


@dataclass(frozen=True)
class HypothesisCheck:
    """单条严格不等式，margin > 0 表示成立"""
    name: str
    group: HypothesisGroup
    margin: float

    @property
    def status(self) -> CheckStatus:
        return CheckStatus.PASSED if self.margin > 0 else CheckStatus.FAILED


@dataclass(frozen=True)
class PredictedRates:
    """定理给出的衰减指数 κ（量级 O(1/t^κ)）"""
    gap: float  # 原始-对偶间隙
    residual: float  # ‖ẋ + γ∇ₓL_t‖ 与 ‖ẏ - γ∇_yL_t‖
    lt_gap: float  # L_t 间隙
    distance: float  # 到 Tikhonov 中心的距离
    combined_gap: float  # 强收敛情形下的间隙

    def to_dict(self) -> dict[str, float]:
        return {
            "gap": self.gap,
            "residual": self.residual,
            "lt_gap": self.lt_gap,
            "distance": self.distance,
            "combined_gap": self.combined_gap,
        }


@dataclass
class HypothesisReport:
    """假设检查报告"""
    params: DynamicsParams
    case_label: str
    predicted: PredictedRates
    checks: list[HypothesisCheck] = field(default_factory=list)

    def _group_ok(self, group: HypothesisGroup) -> bool:
        return all(c.status == CheckStatus.PASSED for c in self.checks if c.group == group)

    @property
    def base_ok(self) -> bool:
        return self._group_ok(HypothesisGroup.BASE)

    @property
    def thm31_ok(self) -> bool:
        return self._group_ok(HypothesisGroup.THM31)

    @property
    def thm42_ok(self) -> bool:
        return self._group_ok(HypothesisGroup.THM42)

    def margins(self, group: HypothesisGroup) -> list[float]:
        return [c.margin for c in self.checks if c.group == group]

    def holds(self, theorem: str | None = None) -> bool:
        """theorem 为 "31" / "42" 时检查对应结论，None 时任一结论成立即可"""
        if theorem is None:
            return self.base_ok and (self.thm31_ok or self.thm42_ok)
        if theorem == "31":
            return self.base_ok and self.thm31_ok
        if theorem == "42":
            return self.base_ok and self.thm42_ok
        raise ValueError(f"未知定理编号: {theorem}")

    def to_key_values(self) -> list[str]:
        """机器可读 key=value 行"""
        lines = [f"{k}={v!r}" for k, v in self.params.to_dict().items()]
        lines += [
            f"base_ok={str(self.base_ok).lower()}",
            f"thm31_ok={str(self.thm31_ok).lower()}",
            f"thm42_ok={str(self.thm42_ok).lower()}",
            f"case={self.case_label}",
        ]
        lines += [f"margin[{c.name}]={c.margin:.6g}" for c in self.checks]
        lines += [f"rate_{k}={v:.6g}" for k, v in self.predicted.to_dict().items()]
        return lines

    def to_text(self) -> str:
        """人类可读报告"""

        def verdict(ok: bool) -> str:
            return "PASS" if ok else "FAIL"

        lines = [
            "假设检查报告",
            f"  基本假设        {verdict(self.base_ok)}",
            f"  速率定理        {verdict(self.thm31_ok)}",
            f"  强收敛定理      {verdict(self.thm42_ok)}",
            f"  情形            {self.case_label}",
            "",
            "  不等式裕量:",
        ]
        for check in self.checks:
            mark = "✓" if check.status == CheckStatus.PASSED else "✗"
            lines.append(f"    {mark} [{check.group.value}] {check.name}: {check.margin:+.6g}")
        lines.append("")
        lines.append("  预测速率指数 (O(1/t^κ)):")
        for key, value in self.predicted.to_dict().items():
            lines.append(f"    {key}: {value:.6g}")
        return "\n".join(lines)

    def to_markdown(self) -> str:
        """生成 Markdown 报告"""
        lines = [
            "# 假设检查报告",
            "",
            f"**情形**: {self.case_label}",
            "",
            "| 结论 | 不等式 | 裕量 | 状态 |",
            "|:---|:---|---:|:---:|",
        ]
        for check in self.checks:
            icon = "✓" if check.status == CheckStatus.PASSED else "✗"
            lines.append(f"| {check.group.value} | {check.name} | {check.margin:.6g} | {icon} |")
        lines.append("")
        return "\n".join(lines)


def predicted_rates(params: DynamicsParams) -> PredictedRates:
    """按参数与情形给出各量的预测衰减指数"""
    q, s, p = params.q, params.s, params.p
    if q + 2 * p >= 1:
        lt_gap = 2 - 2 * q - p
        distance = 1 - 2 * q - (s + p) / 2
    else:
        lt_gap = 1 - q + p
        distance = (1 + p - s) / 2 - 1.5 * q
    return PredictedRates(
        gap=2 * q + s,
        residual=q,
        lt_gap=lt_gap,
        distance=distance,
        combined_gap=min(distance, p),
    )


def check_hypotheses(params: DynamicsParams) -> HypothesisReport:
    """计算全部假设裕量"""
    alpha, q, s, p, gamma, t0 = params.alpha, params.q, params.s, params.p, params.gamma, params.t0
    base, thm31, thm42 = HypothesisGroup.BASE, HypothesisGroup.THM31, HypothesisGroup.THM42
    threshold = (gamma * q) ** (1.0 / (s + 1.0)) if gamma > 0 else 0.0
    checks = [
        HypothesisCheck("alpha>1", base, alpha - 1),
        HypothesisCheck("0<q<1", base, min(q, 1 - q)),
        HypothesisCheck("s>0", base, s),
        HypothesisCheck("t0>(gamma*q)^(1/(s+1))", base, t0 - threshold),
        HypothesisCheck("s>max(0,p-2)", thm31, s - max(0.0, p - 2)),
        HypothesisCheck("p-q-s-1>0", thm31, p - q - s - 1),
        HypothesisCheck("p>0", thm42, p),
        HypothesisCheck("p<1", thm42, 1 - p),
        HypothesisCheck("p-2q-s<0", thm42, 2 * q + s - p),
        HypothesisCheck("4q+s+p-2<0", thm42, 2 - 4 * q - s - p),
        HypothesisCheck("3q+s-p-1<0", thm42, 1 + p - 3 * q - s),
    ]
    return HypothesisReport(
        params=params,
        case_label=CASE_HIGH if q + 2 * p >= 1 else CASE_LOW,
        predicted=predicted_rates(params),
        checks=checks,
    )
