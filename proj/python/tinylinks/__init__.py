"""Toolkit for a tiny web language with events and assertions.

Programs are functional expressions over XML values in which links and forms
carry suspended computations. ``event p(v)`` announces that predicate ``p``
holds of value ``v``; ``assert p(v)`` demands that a matching announcement
already happened. The package exposes:

- :func:`run` — evaluate a program and report its value, events, and whether
  it went wrong;
- :func:`analyze` — the safety analyser, which never blesses a program that
  can go wrong;
- :func:`legacy_check` — the original published typing rules, kept faithful
  to their unsound treatment of links and forms;
- :func:`soundness` — enumerate small programs and compare all three
  semantics, demonstrating the difference between the two checkers;
- :func:`parse_pretty` — parse source text and return its canonical form.
"""

from tinylinks._core import analyze, legacy_check, parse_pretty, run, soundness

__all__ = ["analyze", "legacy_check", "parse_pretty", "run", "soundness"]
__version__ = "1.0.0"
