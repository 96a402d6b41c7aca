"""Random coupling Ising models on bcc/cubic lattices: lattice chain
complexes, parallel-tempering Monte Carlo, phase-boundary analysis, and
exact small-instance oracles."""

__version__ = "0.1.0"
