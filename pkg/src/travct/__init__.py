"""Memory-safety checking for array-traversal programs.

Bounded model checking, verification conditions and completeness
thresholds for the class ``for i in [L : s-R] do !a[i+Z]``.
"""

__version__ = "0.1.0"

from .bmc import (UNLIMITED, BmcConfig, CounterExample, NoErrorWithinBounds, check_bounded,
                  replay)
from .ct import (CtSet, OracleReport, SafeForAllSizes, UnsafeAt, closed_form_safety, derive_ct,
                 unbounded_verdict, verify_ct_oracle)
from .interp import (Access, BudgetExhausted, BudgetExhaustedError, ExecConfig, MemError, Safe,
                     run, safe_at_size)
from .lang import (NotTravPattern, ParseError, Program, TravInstance, parse, recognize_trav,
                   render)
from .vcgen import eval_vc, export_smt, gen_memsafe_vc, to_text
