"""Arbor - 树格上的热力学形式化、符号编码与混合性数值验证"""

__version__ = "0.1.0"
