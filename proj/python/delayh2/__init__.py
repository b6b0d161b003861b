# Copyright 2026 The delayh2 Authors
# SPDX-License-Identifier: Apache-2.0

"""H2-optimal controller synthesis under communication delay constraints."""

from ._delayh2 import (
    AssumptionViolated,
    BezoutCheckFailed,
    ConfigError,
    ConstraintSpace,
    DimensionMismatch,
    Error,
    GeneralizedPlant,
    IllPosed,
    NotStronglyConnected,
    QIViolation,
    SolverFailure,
    StateSpaceModel,
    UnstableSystem,
    check_qi,
    closed_loop,
    conforms,
    constraint_space,
    dare_solve,
    delay_matrix,
    h2_norm_sq,
    impulse_response,
    synthesize,
    synthesize_config,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
