# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.

# errors.py
# Copyright (C) 2026 Fracpete (fracpete at gmail dot com)


class PathAnalysisError(Exception):
    """
    Base class for all errors raised by the path analysis tools.
    The string representation is a single line: "<code>: <detail>".
    """

    def __init__(self, code, detail):
        """
        Initializes the error.

        :param code: the stable name of the error, eg 'CycleDetected'
        :type code: str
        :param detail: the human-readable detail
        :type detail: str
        """
        super().__init__("%s: %s" % (code, detail))
        self.code = code
        self.detail = detail


class DataError(PathAnalysisError):
    """
    Problems with datasets or correlation matrices.
    """
    pass


class ModelError(PathAnalysisError):
    """
    Problems with causal model files or graphs.
    """
    pass


class EstimationError(PathAnalysisError):
    """
    Problems while fitting structural equations.
    """
    pass
