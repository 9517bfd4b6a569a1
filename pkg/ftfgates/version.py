#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

__software__ = "ftfgates"
__author__ = "ftfgates developers"
__email__ = "ftfgates@users.noreply.github.com"
__version__ = "0.1.0"
__description__ = ("Design and verification of controlled-Z gates in fluxonium-transmon-fluxonium circuits: "
                   "mode quantization, static ZZ, capacitance networks, adiabatic and microwave gate calibration "
                   "with error budgets.")
