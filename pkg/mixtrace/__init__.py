"""mixtrace - anisotropic mixed-norm Lizorkin-Triebel/Besov numerical lab."""

__version__ = "0.1.0"
