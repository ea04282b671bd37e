"""Path-integral quantization on the phase plane."""
