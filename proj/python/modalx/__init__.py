"""Symmetry analysis, exact measures and sampling on finite Kripke frames."""

import json

from ._core import Error, Frame, ParseError, __version__, analyze, decompose, exact_measure, run, sample


def verify(frame_path, spec_path, n=100000, seed=0, tests="rigidity,exchangeability,invariance"):
    """Runs the statistical checks and returns the parsed JSON report."""
    code, out, err = run(["verify", frame_path, "--spec", spec_path, "-n", str(n), "--seed", str(seed),
                          "--tests", tests])
    if code == 2:
        raise Error(err.strip())
    return json.loads(out)


__all__ = ["Error", "Frame", "ParseError", "__version__", "analyze", "decompose", "exact_measure", "run",
           "sample", "verify"]
