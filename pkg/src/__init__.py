# nonlocal-evolve: Sinc-quadrature solver for parabolic problems with nonlocal initial conditions
__version__ = "1.0.0"
