"""异常定义

每个异常携带命令行退出码：2 输入校验失败，3 资源上限，4 退化格。
"""


class ArborError(Exception):
    """所有可预期错误的基类"""

    exit_code = 1


class ValidationError(ArborError):
    """输入结构或参数不合法"""

    exit_code = 2


class ResourceCapError(ArborError):
    """枚举上限或内存预算被超出"""

    exit_code = 3


class TruncationError(ResourceCapError):
    """截断不足：射线前缀太短、锥太深或窗口不匹配"""


class DegenerateLatticeError(ArborError):
    """格退化：剪枝后为空，或字母不在任何回路上"""

    exit_code = 4
