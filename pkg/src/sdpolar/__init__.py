"""Polar codes with bit- and symbol-decision SC and SC-list decoders."""

from .channel import ChannelParams, channel_ll, transmit, trial_rng
from .code import (CodeSpec, attach_crc, check_crc, construct, encode, extract_info,
                   generator_matrix, place_info, polar_transform)
from .crc import CRC32C, CrcConfig
from .hw import HwParams, LatencyReport, addition_count, gamma_of, latency, speed_gain
from .kernels import APPROX, EXACT, f_transform, g_transform
from .listdec import (DecodeStats, PruneConfig, ca_scl_decode, scl_decode, sdscl_decode,
                      two_stage_prune)
from .sc import sc_decode
from .sim import SweepConfig, parse_decoder, run_sweep
from .symbol import direct_mapping_dist, sdsc_decode, symbol_dist

__version__ = "0.1.0"
