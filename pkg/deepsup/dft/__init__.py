__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "0.1.0"
