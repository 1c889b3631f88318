"""Ground-state thermodynamics of the XXZ spin-1/2 chain for -1 < Delta < 1.

Dressed charge, root density, dressed energy and momentum from the linear
integral equations on [-Q, Q], Fermi rapidities, large-Q / small-h
asymptotics and the other-bank bound.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AccuracyError,
    BracketError,
    DomainError,
    PoleError,
    SingularSystemError,
    XXZError,
)
from .kernels import (  # noqa: E402
    ClosedForms,
    ModelParams,
    bare_energy,
    bare_momentum,
    bare_phase,
    closed_forms,
    fourier_K,
    kernel_K,
    one_plus_fourier_K,
)
from .linsolve import (  # noqa: E402
    DiscreteSolution,
    QuadratureGrid,
    ResolventTable,
    build_grid,
    neumann_oracle,
    nystrom_extend,
    resolvent,
    solve_lie,
)
from .special import AlphaValue, G_function, R_convolution, R_infinite, alpha, log_gamma  # noqa: E402
from .thermo import (  # noqa: E402
    DressedSet,
    dressed_charge,
    dressed_energy,
    dressed_momentum,
    dressed_set,
    excitation_energy,
    fermi_velocity,
    low_lying_energy,
    magnetization,
    root_density,
)
from .fermi import FermiPoint, solve_fermi_rapidity, solve_magnetic_rapidity  # noqa: E402
from .asympt import asympt_fermi_rapidity, asympt_rho_at_Q, asympt_Z_at_Q, epsilon_gamma  # noqa: E402
from .bank import BankProfile, bank_profile, omega, tail_estimates  # noqa: E402
