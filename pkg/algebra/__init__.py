"""
algebra/__init__.py
Pointwise algebra package: multivectors, products and extensors.
"""

from .clifford import Multivector
from .extensor import ExtendedExtensor, Extensor11, Extensor2to1, GeneralizedExtensor
