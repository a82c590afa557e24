"""Top-level package for rknl-machine."""

__author__ = """rknl-machine developers"""
__email__ = 'rknl-machine@users.noreply.github.com'
__version__ = '1.0.0'
