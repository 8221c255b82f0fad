"""Sequential zero-sum unitary games on small quantum registers.

Dense-state simulation of a two-player energy game, exact best responses
from passive-state theory, variational search for maximally entangling
defences, Haar-random defence statistics, and work extraction from mixed
qudit pairs.
"""

from .core import (
    BlockUnitary,
    GuardError,
    MixedState,
    PureState,
    Register,
    SchmidtSpectrum,
    apply_block_unitary,
    basis_state,
    bell_state,
    energy_expectation,
    ghz_state,
    partial_trace,
    product_plus_state,
    psi_plus,
    schmidt_spectrum,
    state_preparation_unitary,
    subsystem_entropy,
    tensor_product,
    von_neumann_entropy,
)
from .engine import (
    BestResponse,
    BlockPartition,
    GameConfig,
    GameOutcome,
    SpectrumTable,
    antipassive_energy,
    best_response_energy,
    classical_baseline,
    closed_form_min_energy,
    enumerate_partitions,
    passive_energy,
    play_sequential_game,
    spectrum_table,
)
from .ergotropy import (
    QuditSpec,
    entropy_ascent_two_qudits,
    ergotropy_sweep,
    max_energy_oracle,
    perfect_defence_check,
    single_site_max_energy,
    two_site_closed_form,
)
from .haar import HaarSampleReport, haar_entropy_statistics, sample_haar_unitary
from .search import (
    EntropyLossSpec,
    SearchResult,
    mean_entropy_loss,
    search_max_entropy_state,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
