import os
from dotenv import load_dotenv

# 加载.env文件中的环境变量
load_dotenv()

# 环境
ENV = os.getenv('ENV', 'prod')
# 调试模式
DEBUG = os.getenv('DEBUG', 'false').lower() == 'true'

# 日志配置
LOG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), os.getenv('LOG_DIR', 'logs'))
# 日志时间戳使用的时区
LOG_TIMEZONE = os.getenv('LOG_TIMEZONE', 'Asia/Shanghai')

# 默认配置文件
DEFAULT_CONFIG_PATH = os.getenv('PENPORTRAIT_CONFIG', 'penportrait.ini')

# 路径覆盖：环境变量只允许覆盖路径类配置
PATH_OVERRIDES = {
    'photo': os.getenv('PENPORTRAIT_PHOTO'),
    'labels': os.getenv('PENPORTRAIT_LABELS'),
    'annotations': os.getenv('PENPORTRAIT_ANNOTATIONS'),
    'styles': os.getenv('PENPORTRAIT_STYLES'),
    'checkpoint': os.getenv('PENPORTRAIT_CHECKPOINT'),
    'sketch': os.getenv('PENPORTRAIT_SKETCH'),
    'out_dir': os.getenv('PENPORTRAIT_OUT_DIR'),
}

# 默认随机种子
DEFAULT_SEED = int(os.getenv('PENPORTRAIT_SEED', 20200731))
