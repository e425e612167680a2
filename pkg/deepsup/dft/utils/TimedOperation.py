##
# File:    TimedOperation.py
# Date:    05-Oct-2026
#
# Updates:
##
"""
Function/method wrapper (decorator) that logs the start, completion and
elapsed time of long-running operations (training, evaluation, profiling).

Usage::

    @TimedOperation(logName=__name__)
    def train(...):
        ...

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.001"

import inspect
import logging
import time

import wrapt

ENABLED = True


class TimedOperation(object):
    def __init__(self, logName=None, logLevel=logging.INFO):
        """
        :param string logName: (Optional) logging unit name (defaults to this module's logger)
        :param int logLevel: level of the start/completion messages
        """
        self._log = logging.getLogger(logName or __name__)
        self.__logLevel = logLevel
        self.lastSeconds = None

    @staticmethod
    def __getInfo(wrapped, instance):
        if instance is None:
            return "", wrapped.__name__
        if inspect.isclass(instance):
            return instance.__name__, wrapped.__name__
        return instance.__class__.__name__, wrapped.__name__

    @wrapt.decorator(enabled=ENABLED)
    def __call__(self, wrapped, instance, args, kwargs):
        cName, fName = self.__getInfo(wrapped, instance)
        label = "%s.%s" % (cName, fName) if cName else fName
        self._log.log(self.__logLevel, "Starting %s", label)
        startTime = time.perf_counter()
        ok = False
        try:
            result = wrapped(*args, **kwargs)
            ok = True
            return result
        finally:
            self.lastSeconds = time.perf_counter() - startTime
            if ok:
                self._log.log(self.__logLevel, "Completed %s (%.4f seconds)", label, self.lastSeconds)
            else:
                self._log.log(self.__logLevel, "Failed %s after %.4f seconds", label, self.lastSeconds)
