"""Dark-matter-admixed neutron-star workbench."""

__version__ = "0.1.0"
