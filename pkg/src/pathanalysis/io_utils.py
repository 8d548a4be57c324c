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

# io_utils.py
# Copyright (C) 2020-2026 Fracpete (fracpete at gmail dot com)

import os
import sys
from pathanalysis.errors import DataError

COMMENT = "#"


def read_text(path):
    """
    Reads the content of the text file.

    :param path: the file to read
    :type path: str
    :return: the content
    :rtype: str
    """
    try:
        with open(path, "r") as fp:
            return fp.read()
    except OSError as e:
        raise DataError("UnreadableFile", "%s (%s)" % (path, e.strerror))


def strip_comments(text):
    """
    Splits the text into lines, removing comments and empty lines.
    Anything following a '#' is considered a comment.

    :param text: the text to process
    :type text: str
    :return: the list of (1-based line number, stripped content) tuples
    :rtype: list
    """
    result = []
    for i, line in enumerate(text.splitlines(), start=1):
        if COMMENT in line:
            line = line[:line.index(COMMENT)]
        line = line.strip()
        if len(line) > 0:
            result.append((i, line))
    return result


def read_lines(path):
    """
    Reads the line-based text file, removing comments and empty lines.

    :param path: the file to read
    :type path: str
    :return: the list of (1-based line number, stripped content) tuples
    :rtype: list
    """
    return strip_comments(read_text(path))


def output_str(content, path=None, overwrite=False, logger=None):
    """
    Outputs the string content, either to stdout or to a file.
    Raises DataError 'OutputExists' if the file exists and overwriting is off.

    :param content: the string content to output
    :type content: str
    :param path: the file to write to, stdout if None
    :type path: str
    :param overwrite: whether to overwrite existing files
    :type overwrite: bool
    :param logger: the logger instance to use for outputting logging information
    :return: whether a file was generated
    :rtype: bool
    """
    if not content.endswith("\n"):
        content += "\n"
    if path is None:
        sys.stdout.write(content)
        return False
    else:
        if os.path.exists(path) and not overwrite:
            raise DataError("OutputExists", "%s (use --overwrite to replace it)" % path)
        else:
            if logger is not None:
                logger.info("Writing file: %s" % path)
            with open(path, "w") as fp:
                fp.write(content)
            return True
