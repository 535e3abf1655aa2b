# -*- coding: utf-8 -*-
"""
功能：Saddle Flow - 鞍点问题的二阶原始-对偶动力系统
作用：积分带 Hessian 阻尼、外推与 Tikhonov 正则化的动力系统，计算 Lyapunov 能量与收敛诊断
创建时间：2026-10-19
最后修改：2026-10-19
"""

__version__ = "1.0.0"
__description__ = "带 Hessian 阻尼与 Tikhonov 正则化的二阶原始-对偶动力系统"
