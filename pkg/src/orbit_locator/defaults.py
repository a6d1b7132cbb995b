"""Central table of numeric defaults.

Every entry can be overridden per call (keyword argument) or per run
(CLI flag / problem-file field). Keeping them in one place keeps the
library, the CLI and the test suite in agreement.
"""

import os

TOL = 1e-6        # distance / gauge tolerance
STAB_TOL = 1e-7   # plateau test for the nested-limit stabilisation shortcut
BUDGET = 30       # nested-limit level budget
RANK_TOL = 1e-9   # rank decisions in Gram-Schmidt and basis validation
MEM_TOL = 1e-9    # relative spectral-norm membership band: sigma1 <= n*(1+MEM_TOL)

NET_CAP = 200_000       # epsilon-net size cap before refusing
GRID_CAP = 40_000_000   # grid-oracle enumeration cap
PROBE_SEED = 1729       # seed for projection-certificate probe vectors

MAX_SOLVER_ITERS = 200_000  # first-order fallback iteration budget


def thread_cap() -> int:
    """Worker cap from the ORBIT_LOCATOR_THREADS environment variable.

    Execution is currently sequential, which trivially honours any cap;
    batch loops still consult this so a future parallel backend stays
    within the user's limit.
    """
    raw = os.environ.get("ORBIT_LOCATOR_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(1, value)
