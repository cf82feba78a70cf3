"""Direct and inverse Dirichlet spectral problems for the singular operator
-y'' + a(a+1)/x^2 y + q(x) y on [0,1] with integer a >= 0.

Layers, bottom up: `numerics` (grid, quadrature, differentiation, root
finding), `bessel` (Riccati-Bessel functions and the zero-potential
fundamental system), `solutions` (regular/singular solutions by Picard
iteration), `spectrum` (eigenvalues, terminal velocities, gradients, dual
fields), `transform` (the Bessel <-> trigonometric integral operators),
`inverse` (spectral map, explicit inverse differential, potential recovery,
isospectral geometry), plus a CLI (`slspec`).
"""

from .errors import (
    BracketError,
    DegenerateEigenvalueError,
    GridMismatchError,
    MissedEigenvalueError,
    NearDegenerateError,
    PicardDivergenceError,
    SingularArgumentError,
    SlspecError,
    UnsupportedOrderError,
    WronskianAccuracyError,
)
from .numerics import (
    Grid,
    GridFn,
    RealSeq,
    default_grid,
    derivative,
    ell2_tail,
    find_root_bracketed,
    inner,
    integrate,
)
from .potentials import Potential, make_potential
from .solutions import SolutionPair, psi, solve_pair, solve_regular, solve_singular, wronskian
from .spectrum import (
    EigenData,
    SpectralData,
    a_fn,
    dual_fields,
    eigen_data,
    eigenfunction,
    eigenvalues,
    grad_kappa,
    grad_lambda,
    spectral_map,
    terminal_velocity,
    zero_potential_eigenvalues,
)
from .transform import (
    apply_A,
    apply_A_adj,
    apply_B,
    apply_B_adj,
    apply_S,
    apply_S_adj,
    apply_T,
    apply_T_adj,
    commute_check,
    kernel_basis,
    structured_inner,
    verify_bessel_transport,
)
from .inverse import (
    RecoveryReport,
    SpectralTarget,
    differential_apply,
    forward,
    inverse_differential_apply,
    iso_normal,
    iso_tangent,
    recover,
)

__version__ = "0.1.0"
