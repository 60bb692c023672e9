"""Assessment platform for graphical-loop-invariant programming challenges.

Students model an iterative solution as a drawing (a loop invariant over a
range of values), transpose it into concrete initial/final states, propose a
variant function, and write the matching code in a small C subset.  The
platform grades every piece against a supervisor-authored misconception
rubric and checks that drawing and code tell the same story.
"""

__version__ = "0.1.0"
