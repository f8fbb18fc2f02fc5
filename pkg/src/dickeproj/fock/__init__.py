"""Truncated multimode bosonic simulation of the five-photon set-up."""

from .detection import CoincidencePattern, branches, postselect
from .expansion import FockExpansion, ModeId, modes_of, monomial, tensor, transform
from .fidelity import (
    TARGETS,
    SweepPoint,
    best_point,
    enhancement_ratio,
    f_ghz4_analytic,
    f_w4_analytic,
    fidelity_sweep,
    hv_rate,
    simulate_point,
)
from .network import LossModel, apply_loss, distribute, phase_shift
from .sources import (
    SourceParams,
    combine,
    five_photon_terms,
    merge_wcb,
    photon_sector,
    polarization_vector,
    source_state,
    spdc_state,
    wcb_state,
)
