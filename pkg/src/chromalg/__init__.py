"""chromalg: exact computer algebra for formal group laws at finite truncation,
Hopf algebroids and their comodules, Milnor operations, and the generalized
Chern character between neighbouring chromatic heights."""

__version__ = "0.1.0"
