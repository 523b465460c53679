"""Differentially private publication of daily axe inventories.

The package obfuscates per-asset inventory series with continual-observation
mechanisms (windowed and binary-tree partial sums, plus two baselines) and
quantifies the privacy/utility trade-off with a deterministic Monte Carlo
engine: marginal carry P&L, direction-leakage probability and over-axe cost.
"""

from .dp_core import (
    ClipBounds,
    NoiseScale,
    RngHandle,
    adaptive_scale,
    clip,
    fixed_sensitivity,
    laplace_sum_tail,
    sample_laplace,
)
from .errors import InvalidInputError, InvalidParameterError, MechanismStateError
from .finance import (
    AxeTriple,
    MarketQuote,
    inventory_pnl,
    marginal_axe_pnl,
    over_axe_cost,
    over_axe_quantity,
    profit_bounds,
)
from .mechanisms import (
    MECHANISMS,
    BinaryState,
    DeltaStream,
    DpParams,
    NaiveState,
    SimpleState,
    WindowState,
    binary_step,
    clip_deltas,
    naive_publish,
    naive_step,
    publish_paths,
    publish_series,
    simple_publish,
    simple_step,
    split_stream,
    window_step,
)
from .metrics import (
    HistogramRow,
    LeakConfig,
    MetricRow,
    MetricsReport,
    decile_histogram,
    leakage_probability,
    over_axe_frequency,
    pnl_difference,
)
from .simulator import (
    STRATEGIES,
    QuoteSeries,
    ScenarioSpec,
    SimConfig,
    compare_with_without_client,
    epsilon_grid,
    run_monte_carlo,
    run_path,
    sweep,
    synth_concentrated_scenario,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
