"""Fair division: constrained necklace splitting, quantitative Sperner/KKM
machinery on pseudomanifolds, and envy-free cake and rent division."""

__version__ = "0.1.0"
