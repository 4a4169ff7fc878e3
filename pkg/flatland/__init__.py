"""
flatland：平移曲面、区间交换变换与 Hooper-Thurston-Veech 构造的计算工具包
"""

__version__ = "0.3.0"
