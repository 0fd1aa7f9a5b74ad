"""fracdom: escape-time fractal toolkit.

Expression compiler and stack VM, tiled parallel escape-time renderer,
shape-preserving transform builders with orbit-identity verifiers, and a
dominant-term analyzer that predicts embedded Multibrot sets, plus a CLI
and an HTTP tile service.
"""

__version__ = "0.1.0"
