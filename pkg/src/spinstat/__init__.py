"""spinstat - single-valued spin states, exchange phases and exclusion rules."""

__version__ = "0.1.0"
__app_name__ = "spinstat"
