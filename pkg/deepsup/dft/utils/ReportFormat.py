##
# File:    ReportFormat.py
# Date:    06-Oct-2026
#
# Updates:
##
"""
Buffered writer for aligned-column text reports.

Rows are collected first so column widths can be fitted to the content; the
buffer is then returned as one string.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.001"

import logging
import math

logger = logging.getLogger(__name__)

MAX_INDENT = 100
SPACE = " " * MAX_INDENT


def format_cell(value, precision=4):
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return "%.*f" % (precision, value)
    return str(value)


class ReportFormat(object):
    def __init__(self, precision=4):
        self.__buffer = []
        self.__precision = precision

    def getvalue(self):
        return "".join(self.__buffer)

    def indent(self, strIn, indent=0):
        if 0 < indent < MAX_INDENT:
            self.__buffer.append("%s%s" % (SPACE[:indent], strIn))
        else:
            self.__buffer.append(strIn)

    def title(self, text):
        self.indent("%s\n%s\n" % (text, "=" * len(text)))

    def keyValues(self, pairs, indent=0):
        """``name = value`` lines with the names padded to a common width."""
        if not pairs:
            return
        width = max(len(k) for k, _ in pairs)
        for k, v in pairs:
            self.indent("%-*s = %s\n" % (width, k, format_cell(v, self.__precision)), indent)

    def table(self, columns, rows, indent=0):
        """Aligned table; text columns left-justified, numbers right-justified."""
        cells = [[format_cell(r.get(c), self.__precision) for c in columns] for r in rows]
        widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
        numeric = [all(isinstance(r.get(c), (int, float)) and not isinstance(r.get(c), bool) for r in rows if r.get(c) is not None) for c in columns]

        def line(values):
            out = []
            for i, v in enumerate(values):
                out.append(v.rjust(widths[i]) if numeric[i] else v.ljust(widths[i]))
            return "  ".join(out).rstrip() + "\n"

        self.indent(line(columns), indent)
        self.indent(line(["-" * w for w in widths]), indent)
        for row in cells:
            self.indent(line(row), indent)

    def blank(self):
        self.__buffer.append("\n")
