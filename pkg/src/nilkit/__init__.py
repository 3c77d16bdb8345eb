"""nilkit: finite cubespaces, nilspace axiom checkers and cocycle calculus."""

__version__ = "0.1.0"
