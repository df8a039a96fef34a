"""Mean-field bistability of a driven cavity holding a BEC and a moving mirror."""

__version__ = "0.1.0"

from .params import (  # noqa: E402
    DerivedCoefficients,
    ExperimentalInputs,
    SystemParams,
    derive_from_experiment,
    derived,
    preset,
)
from .cubic import PhotonCubic, build_cubic, solve_cubic  # noqa: E402
from .steady_state import (  # noqa: E402
    Stability,
    SteadyBranch,
    SweepResult,
    bistable_window,
    classify_stability,
    saturation_scan,
    steady_state_at,
    sweep_1d,
    sweep_2d,
)
from .dynamics import (  # noqa: E402
    FullState,
    MechState,
    Trajectory,
    adiabatic_force,
    integrate_adiabatic,
    integrate_full,
)
from .potential import (  # noqa: E402
    CriticalPoint,
    PotentialGrid,
    effective_potential,
    find_critical_points,
    potential_grid,
    v_s_of_n,
)
