"""Exact and heuristic minimum-distance computation for classical codes,
quantum stabiliser codes and detector error models."""
from .codes import ClassicalCode, CssCode, StabiliserCode, as_detector_model, dem_from_code
from .decoder import DecoderConfig, ProbeOptions, bp_decode, decoder_distance, osd_postprocess
from .dem import DetectorModel, filter_dem, format_dem, parse_dem
from .estimators import BlockRepresentation, BpOsdDecoder, DemBuilder, DemFilter, DistanceEstimator
from .exact.codeword import bz_distance, distance_via_macwilliams, exhaustive_distance
from .exact.errors import connected_cluster_distance, exhaustive_error_distance, meet_in_middle_distance
from .gf2 import BitMatrix, BitVector
from .heuristic import EvolParams, qdistevol, qdistrnd
from .io import load_code
from .results import DistanceResult, NoResultError, Status, TrialStats
from .solvers import build_milp_model, build_sat_model, serialize_lp, serialize_wcnf
from .undetectable import UESearchParams, cc_search, ge_search, ue_search, undetectable_error_search
from .validation import check_binary_matrix, check_detector_model

__version__ = "0.1.0"
