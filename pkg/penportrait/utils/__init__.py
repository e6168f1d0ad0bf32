"""配置与文件工具"""
