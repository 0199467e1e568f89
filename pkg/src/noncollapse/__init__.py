"""Curvature flows of convex hypersurfaces by homogeneous speeds: support-
function geometry, ball-curvature monitors, and property-tested matrix
inequalities."""

__version__ = "0.1.0"

from .errors import (CenterOutside, ConvexityLost, DegenerateSpectrum,
                     DiagonalWitness, DomainError, NotPositiveDefinite,
                     PairTooClose, RunTooShort, SingularShift)
from .speeds import (ArithmeticMean, CertReport, DualSpeed, HarmonicMean,
                     PowerMean, SigmaRatio, SigmaRoot, SpeedFunction, certify,
                     matrix_eval, matrix_hess_form, parse_speed)
from .oracle import (BoundarySample, InteriorSample, OracleVerdict,
                     boundary_closed_sup, boundary_form, boundary_suite,
                     brute_force_boundary, counterexample_search,
                     evaluate_boundary, evaluate_interior, interior_gap,
                     interior_suite, optimal_lambda,
                     q_second_derivative_check)
from .geometry import (BallCurvatureField, ConvexBody, RadiiReport, area,
                       ball_curvature_field, ball_curvature_pair, embed,
                       hausdorff_to_unit_sphere, make_ellipse, make_ellipsoid,
                       make_sphere, principal_curvatures, radii, recenter,
                       scale, tangent_plane_diagnostic, translate)
from .flow import FlowConfig, FlowRun, build_body, build_speed, run, stable_dt, step
from .monitor import (MonitorRow, RatioExtremes, TrendVerdict, assert_trend,
                      eta_default, monitor_rows, phi, ratios, roundness,
                      run_verdicts, write_monitor_csv)
