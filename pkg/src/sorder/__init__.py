"""s-parameterized ordering of boson operators, with a Fock-space oracle."""

__version__ = "0.1.0"
