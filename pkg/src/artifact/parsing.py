"""Tiny scanner shared by the textual grammars."""
from __future__ import annotations

import re
from fractions import Fraction


class ParseError(ValueError):
    def __init__(self, message, text="", pos=0):
        super().__init__(message)
        self.message = message
        self.text = text
        self.pos = pos

    def caret(self):
        return f"{self.text}\n{' ' * self.pos}^\nparse error at column {self.pos + 1}: {self.message}"

    def __str__(self):
        return f"{self.message} (column {self.pos + 1})"


INT = re.compile(r"-?\d+")
RATIONAL = re.compile(r"-?\d+(?:/\d+)?")
NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class Scanner:
    def __init__(self, text, pos=0):
        self.text = text
        self.pos = pos

    def error(self, message, pos=None):
        raise ParseError(message, self.text, self.pos if pos is None else pos)

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self):
        self.ws()
        return self.pos >= len(self.text)

    def peek(self, s):
        return self.text.startswith(s, self.pos)

    def accept(self, s):
        if self.text.startswith(s, self.pos):
            self.pos += len(s)
            return True
        return False

    def expect(self, s):
        if not self.accept(s):
            self.error(f"expected {s!r}")

    def match(self, pattern, what):
        m = pattern.match(self.text, self.pos)
        if not m:
            self.error(f"expected {what}")
        self.pos = m.end()
        return m.group(0)

    def try_match(self, pattern):
        m = pattern.match(self.text, self.pos)
        if not m:
            return None
        self.pos = m.end()
        return m.group(0)

    def integer(self):
        return int(self.match(INT, "integer"))

    def rational(self):
        return Fraction(self.match(RATIONAL, "rational"))

    def until(self, stops, what):
        """Consume up to (not including) the first character in stops, tracking brackets."""
        depth = 0
        start = self.pos
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch in "([":
                depth += 1
            elif ch in ")]":
                if depth == 0 and ch in stops:
                    break
                depth -= 1
            elif depth == 0 and ch in stops:
                break
            self.pos += 1
        if self.pos == start:
            self.error(f"expected {what}")
        return self.text[start:self.pos]

    def finish(self):
        if not self.at_end():
            self.error("unexpected trailing input")


def fmt_frac(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
