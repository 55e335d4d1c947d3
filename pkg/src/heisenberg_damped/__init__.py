"""Group-Fourier spectral lab for the damped wave equation on the Heisenberg group."""
