##
# File:    TaskSpec.py
# Date:    06-Oct-2026
#
# Updates:
##
"""
Task definitions for the synthetic instruction data.

Sequence layouts (pivot language; ``A[n]`` is the n-th pivot content id)::

  copy      [copy] p1 .. pn [sep]                      -> p1 .. pn [eos]
  reverse   [reverse] p1 .. pn [sep]                   -> pn .. p1 [eos]
  kv        [kv] k1 v1 .. kn vn [ask] q1 .. qm [sep]   -> v(q1) .. v(qm) [eos]
  add       [add] A[a1] [plus] A[a2] .. A[ak] [sep]    -> A[(a1 + .. + ak) mod modulus] [eos]

``query_len`` bounds the payload (copy/reverse tokens, kv pairs, add
operands); ``answer_len`` bounds the number of kv queries and is ignored by
the other kinds.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.001"

import dataclasses

from deepsup.dft.syndata.LanguageMap import TASK_MARKERS, alphabet_size
from deepsup.dft.utils.DftExceptions import ConfigError

KIND_ALIASES = {"key-value-recall": "kv", "modular-add": "add"}


@dataclasses.dataclass(frozen=True)
class TaskSpec(object):
    kind: str = "kv"
    vocab_size: int = 256
    query_len: tuple = (2, 4)
    answer_len: tuple = (1, 2)
    modulus: int = 10
    seed: int = 0
    max_seq_len: int = 32

    def __post_init__(self):
        object.__setattr__(self, "kind", KIND_ALIASES.get(self.kind, self.kind))
        object.__setattr__(self, "query_len", tuple(int(v) for v in self.query_len))
        object.__setattr__(self, "answer_len", tuple(int(v) for v in self.answer_len))
        self.validate()

    def max_lengths(self):
        """(query tokens, answer tokens) of the longest example this spec can produce."""
        n = self.query_len[1]
        if self.kind in ("copy", "reverse"):
            return n + 2, n + 1
        if self.kind == "kv":
            m = self.answer_len[1]
            return 2 * n + m + 3, m + 1
        return 2 * n + 1, 2

    def validate(self):
        if self.kind not in TASK_MARKERS:
            raise ConfigError("unknown task kind %r (choose from %s)" % (self.kind, ", ".join(sorted(TASK_MARKERS))))
        for name in ("query_len", "answer_len"):
            rng = getattr(self, name)
            if len(rng) != 2 or rng[0] < 1 or rng[1] < rng[0]:
                raise ConfigError("%s must be a (min, max) range with 1 <= min <= max, got %r" % (name, getattr(self, name)))
        h = alphabet_size(self.vocab_size)
        if h < 2:
            raise ConfigError("vocab_size %d leaves no content alphabet" % self.vocab_size)
        if self.kind == "kv":
            if self.query_len[1] > h:
                raise ConfigError("kv task needs %d distinct keys but the alphabet has %d ids" % (self.query_len[1], h))
            if self.answer_len[1] > self.query_len[0]:
                raise ConfigError("kv task asks up to %d keys but may hold only %d pairs" % (self.answer_len[1], self.query_len[0]))
        if self.kind == "add":
            if self.query_len[0] < 2:
                raise ConfigError("add task needs at least two operands")
            if not 2 <= self.modulus <= h:
                raise ConfigError("add modulus must lie in 2..%d, got %d" % (h, self.modulus))
        qMax, aMax = self.max_lengths()
        if qMax + aMax > self.max_seq_len:
            raise ConfigError("longest %s example has %d tokens, over max_seq_len %d" % (self.kind, qMax + aMax, self.max_seq_len))
        return self

    @property
    def marker(self):
        return TASK_MARKERS[self.kind]

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["query_len"] = list(self.query_len)
        d["answer_len"] = list(self.answer_len)
        return d

    @classmethod
    def from_dict(cls, dIn):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(dIn) - known)
        if unknown:
            raise ConfigError("unknown task settings: %s" % ", ".join(unknown))
        return cls(**dIn)
