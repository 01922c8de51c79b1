"""Certified Baker-method bounds for integral points on the modular
curves attached to normalizers of non-split Cartan subgroups."""

from .baker import (BakerInputs, BoundReport, CombinedUnitDescriptor,
                    combined_unit_descriptor, lambda_zero_bound, matveev_C1,
                    theorem_bounds)
from .cartan import APoint, CartanContext, Cusp, Orbit, build_context, \
    cusp_classes, galois_orbit_action, group_order, orbit_decomposition
from .cyclotomic import CycloNumber, EmbeddingTable, embed, galois_apply, \
    height, log_abs_embeddings, norm_to_K
from .errors import (AllOrdersZero, BadIndex, BadLevel, BadSubgroup,
                     BoundViolation, DomainError, IndependenceFailure,
                     InternalInconsistency, NsBoundError, PrecisionExhausted,
                     TruncationTooSmall, ZeroElement)
from .numerics import (ComplexInterval, RealInterval, certified_lower,
                       certified_upper, with_refinement)
from .pipeline import PipelineResult, run_pipeline
from .qseries import FormalSeries, first_nonzero, log_unit_series, verify_lambda_bounds
from .siegel import (UnitOrderData, bernoulli_ell, eval_siegel, log_u_orbit,
                     order_at_cusp, verify_product_identity)
from .units import (DeltaBetaKappa, IndexBounds, UnitSystem, build_unit_system,
                    delta_beta_kappa, index_bounds, upsilon_heights)

__version__ = "0.1.0"
