import os
import time
from functools import wraps

import psutil

from penportrait.api.exceptions import PenPortraitError
from penportrait.api.response import get_exit_code, EXIT_MESSAGES
# 配置日志
from logger import setup_logger

logger = setup_logger(__name__)


def _rss_mb() -> float:
    """当前进程常驻内存（MB）"""
    return psutil.Process(os.getpid()).memory_info().rss / (1024 * 1024)


# 装饰器：记录阶段耗时与内存
def stage_logged(stage: str):
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            rss_before = _rss_mb()
            logger.debug(f"Stage started - rss_mb: {rss_before:.1f}", extra={'stage': stage})
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                logger.error(
                    f"Stage failed - error: {e} - elapsed_s: {time.perf_counter() - start:.3f}",
                    extra={'stage': stage},
                )
                raise
            logger.debug(
                f"Stage finished - elapsed_s: {time.perf_counter() - start:.3f} - "
                f"rss_mb: {_rss_mb():.1f} - rss_delta_mb: {_rss_mb() - rss_before:.1f}",
                extra={'stage': stage},
            )
            return result
        return wrapper
    return decorator


# 装饰器：把异常映射为进程退出码
def exit_on_error(func):
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            result = func(*args, **kwargs)
            return 0 if result is None else result
        except (PenPortraitError, FileNotFoundError) as e:
            code = get_exit_code(e)
            field = getattr(e, 'field', None)
            logger.error(
                f"{EXIT_MESSAGES[code].capitalize()} - command: {func.__name__} - "
                f"{'field: ' + field + ' - ' if field else ''}message: {e}"
            )
            return code
        except Exception as e:
            logger.error(f"Unexpected error in {func.__name__}: {e}", exc_info=True)
            return get_exit_code(e)
    return wrapper
