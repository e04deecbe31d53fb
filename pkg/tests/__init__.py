# Tests for nonlocal-evolve
