"""Core modules: root data, Lie algebra and orbits, genus functions, quadrature and both sides of the decomposition."""
