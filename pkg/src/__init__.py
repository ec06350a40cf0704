"""ML certification audit toolkit"""

__version__ = '1.0.0'
