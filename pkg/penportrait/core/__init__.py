"""流水线编排"""
from .pipeline import cmd_train, cmd_sketch, cmd_plot, cmd_run, RunManifest

__all__ = ['cmd_train', 'cmd_sketch', 'cmd_plot', 'cmd_run', 'RunManifest']
