"""退出码与报告格式模块"""
import json
from typing import Any, Dict, Optional

from .exceptions import PenPortraitError, ConfigError, DataError


# 退出码定义
class ExitCode:
    SUCCESS = 0
    INTERNAL_ERROR = 1
    CONFIG_ERROR = 2
    DATA_ERROR = 3


# 退出码描述
EXIT_MESSAGES = {
    ExitCode.SUCCESS: "success",
    ExitCode.INTERNAL_ERROR: "internal error",
    ExitCode.CONFIG_ERROR: "configuration error",
    ExitCode.DATA_ERROR: "data error",
}


def get_exit_code(error: Exception) -> int:
    """根据异常类型获取对应的退出码

    Args:
        error: 异常对象

    Returns:
        int: 退出码
    """
    if isinstance(error, ConfigError):
        return ExitCode.CONFIG_ERROR
    elif isinstance(error, DataError):
        return ExitCode.DATA_ERROR
    elif isinstance(error, FileNotFoundError):
        return ExitCode.CONFIG_ERROR
    elif isinstance(error, PenPortraitError):
        return error.exit_code
    return ExitCode.INTERNAL_ERROR


def error_payload(error: Exception) -> Dict[str, Any]:
    """生成错误描述

    Args:
        error: 异常对象

    Returns:
        Dict: 包含退出码、类别与消息的字典
    """
    code = get_exit_code(error)
    payload = {
        "code": code,
        "category": EXIT_MESSAGES.get(code, EXIT_MESSAGES[ExitCode.INTERNAL_ERROR]),
        "message": str(error),
    }
    field = getattr(error, 'field', None)
    if field:
        payload["field"] = field
    return payload


def stage_status(status: str, error: Optional[Exception] = None, **extra: Any) -> Dict[str, Any]:
    """生成阶段状态标记"""
    marker: Dict[str, Any] = {"status": status}
    if error is not None:
        marker["error"] = error_payload(error)
    marker.update(extra)
    return marker


def dump_json(data: Any) -> str:
    """确定性的 JSON 序列化：键排序、无时间戳、以换行结尾"""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
