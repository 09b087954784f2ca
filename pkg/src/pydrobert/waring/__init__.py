# Copyright 2021 Sean Robertson

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Experiments on additive bases generated by Hardy-field functions"""

import abc

__author__ = "Sean Robertson"
__email__ = "sdrobert@cs.toronto.edu"
__license__ = "Apache 2.0"
__copyright__ = "Copyright 2021 Sean Robertson"

__all__ = [
    "AliasedFactory",
    "basis",
    "BudgetExceeded",
    "CertificateError",
    "circle",
    "ClassificationError",
    "config",
    "ConfigError",
    "degree",
    "DomainError",
    "experiment",
    "functions",
    "kamke",
    "represent",
    "RepresentationError",
    "SolveError",
    "util",
    "WaringLabError",
]

try:
    from .version import version as __version__  # type: ignore
except ImportError:
    __version__ = "inplace"


class AliasedFactory(abc.ABC):
    """An abstract interface for initialing concrete subclasses with aliases"""

    aliases = set()

    @classmethod
    def from_alias(cls, alias: str, *args, **kwargs):
        """Factory method for initializing a subclass that goes by an alias

        All subclasses of this class have the class attribute ``aliases``. This
        method matches `alias` to an element in some subclass' ``aliases`` and
        initializes it. Aliases of this class are included in the search. Alias
        conflicts are resolved by always trying to initialize the last
        registered subclass that matches the alias.

        Parameters
        ----------
        alias : str

        Raises
        ------
        ValueError
            Alias can't be found
        """
        return cls.subclass_from_alias(alias)(*args, **kwargs)

    @classmethod
    def subclass_from_alias(cls, alias: str) -> type:
        """Find the (last registered) subclass going by `alias`

        Raises
        ------
        ValueError
            Alias can't be found
        """
        stack = [cls]
        pushed_children = set()
        while stack:
            parent = stack.pop()
            if parent not in pushed_children:
                children = parent.__subclasses__()
                stack.append(parent)
                stack.extend(children)
                pushed_children.add(parent)
            elif alias in parent.aliases:
                return parent
        raise ValueError('Cannot find subclass with alias "{}"'.format(alias))

    @classmethod
    def all_aliases(cls) -> set:
        """Every alias usable with `from_alias`"""
        aliases, stack = set(cls.aliases), list(cls.__subclasses__())
        while stack:
            child = stack.pop()
            aliases |= set(child.aliases)
            stack.extend(child.__subclasses__())
        return aliases


class WaringLabError(Exception):
    """Base class of errors raised by a computation in this package

    Command-line tools map it to exit code 3.
    """

    exit_code = 3


class DomainError(WaringLabError, ValueError):
    """A quantity was evaluated or requested outside of where it is defined

    Raised, for example, when a subexpression takes the log of a non-positive
    number (usually a sign that the shift is too small), when a jet of too high an
    order is requested, or when a routine's precondition fails.
    """


class ClassificationError(WaringLabError):
    """A function could not be classified or its polynomial part extracted

    Attributes
    ----------
    reason : {'growth', 'ambiguous', 'extraction', 'declared'}
    """

    def __init__(self, message: str, reason: str = "growth"):
        super(ClassificationError, self).__init__(message)
        self.reason = reason


class CertificateError(WaringLabError):
    """The gcd of sequence differences is not 1 on the examined prefix

    Attributes
    ----------
    gcd : int
    """

    def __init__(self, message: str, gcd: int):
        super(CertificateError, self).__init__(message)
        self.gcd = gcd


class SolveError(WaringLabError):
    """A scalar equation could not be bracketed or solved"""


class RepresentationError(SolveError):
    """The Hilbert-Kamke system produced by a representation had no solution

    Attributes
    ----------
    instance : pydrobert.waring.kamke.HKInstance
    """

    def __init__(self, message: str, instance=None):
        super(RepresentationError, self).__init__(message)
        self.instance = instance


class BudgetExceeded(WaringLabError):
    """A configured compute or memory budget would be exceeded

    Budgets are never raised automatically. Command-line tools map this to exit
    code 4.
    """

    exit_code = 4


class ConfigError(WaringLabError, ValueError):
    """An experiment configuration could not be parsed

    Attributes
    ----------
    line : int or None
        The 1-indexed line of the offending entry, if known
    """

    exit_code = 2

    def __init__(self, message: str, line: int = None):
        if line is not None:
            message = "line {}: {}".format(line, message)
        super(ConfigError, self).__init__(message)
        self.line = line
