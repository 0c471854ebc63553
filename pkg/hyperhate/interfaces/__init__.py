"""
Interfaces package for hyperhate.
Contains the contracts implemented by the network adapters.
"""

from hyperhate.interfaces.base import ClassifierInterface, ConvWeightSource
